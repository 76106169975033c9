from .base import DEFAULT_STRATEGY, BaseAllocator, StrategyKey
from .factory import available_strategies, build_allocator

__all__ = ["DEFAULT_STRATEGY", "BaseAllocator", "StrategyKey", "available_strategies", "build_allocator"]
