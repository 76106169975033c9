from typing import Final, Mapping

from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.ports import SamplingOracle
from mc_allocation.settings import Settings

from .base import DEFAULT_STRATEGY, BaseAllocator
from .constant import ConstantAllocator
from .greedy import GreedyAllocator
from .kt import KtAllocator
from .thompson import ThompsonAllocator

# supported strategies
_ALLOCATOR_BY_KEY: Final[Mapping[str, type[BaseAllocator]]] = {
    "kt": KtAllocator,
    "greedy": GreedyAllocator,
    "thompson": ThompsonAllocator,
    "constant": ConstantAllocator,
}


def available_strategies() -> tuple[str, ...]:
    return tuple(_ALLOCATOR_BY_KEY)


def build_allocator(
    strategy: str | None = None,
    *,
    settings: Settings | None = None,
    seed: int = 0,
    oracle: SamplingOracle | None = None,
) -> BaseAllocator:
    """Return the allocator registered under `strategy` (default "kt").

    `oracle` only applies to the thompson strategy.
    """
    key = (strategy or DEFAULT_STRATEGY).lower()
    cls = _ALLOCATOR_BY_KEY.get(key)
    if cls is None:
        raise InvalidInputError(
            f"unsupported strategy {strategy!r}; choose one of {', '.join(_ALLOCATOR_BY_KEY)}",
            field="strategy",
        )
    if cls is ThompsonAllocator:
        return ThompsonAllocator(settings, seed=seed, oracle=oracle)
    return cls(settings, seed=seed)
