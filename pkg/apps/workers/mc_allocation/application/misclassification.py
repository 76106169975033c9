"""Expected misclassification objectives.

g_i: exact, S ~ Binomial(k, p) and the hypothesis is rejected iff S/k <= alpha.
h_i: normal approximation of g_i, differentiable in a continuous k.

Conventions:
  - g_i(k=0): zero samples give an estimate of 0, i.e. a rejection. Correct
    (0) when p <= alpha, certain misclassification (1) otherwise.
  - h_i(p in {0, 1}) = 0: zero variance, classification is certain.
  - h_i(k=0) = 0.5, the k -> 0+ limit (z -> 0).
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats

from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.values import Allocation, ObjectiveValue, PValueSet

# absorbs representation error in alpha * k (e.g. 0.1 / 500 * 5000)
_CUTOFF_EPS = 1e-9
_LOG_HALF = math.log(0.5)


def _check_scalar(p: float, alpha: float, k: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise InvalidInputError(f"p must lie in [0, 1], got {p!r}", field="p")
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}", field="alpha")
    if not (k >= 0.0) or not math.isfinite(k):
        raise InvalidInputError(f"k must be a finite non-negative number, got {k!r}", field="k")


def _check_dims(p: PValueSet, k: Allocation) -> None:
    if p.m != k.m:
        raise InvalidInputError(f"dimension mismatch: {p.m} p-values vs {k.m} budgets", field="allocation")


def rejection_cutoff(alpha: float, k) -> np.ndarray:
    """Largest exceedance count S with S/k <= alpha, i.e. floor(alpha * k)."""
    return np.floor(alpha * np.asarray(k, dtype=np.float64) + _CUTOFF_EPS)


def plus_one_cutoff(alpha: float, k) -> np.ndarray:
    """Largest S with (S + 1)/(k + 1) <= alpha; negative when no S qualifies."""
    return np.floor(alpha * (np.asarray(k, dtype=np.float64) + 1.0) - 1.0 + _CUTOFF_EPS)


def jump_size(alpha: float) -> int:
    """Smallest k at which both 0 and 1 exceedances reject (ceil(1/alpha))."""
    k = max(1, int(math.floor(1.0 / alpha)))
    while rejection_cutoff(alpha, k) < 1.0:
        k += 1
    while k > 1 and rejection_cutoff(alpha, k - 1) >= 1.0:
        k -= 1
    return k


# --- exact objective ----------------------------------------------------------

def g_terms(p: np.ndarray, alpha: float, k: np.ndarray) -> np.ndarray:
    """Vectorised g_i over paired arrays (or broadcastable scalars)."""
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    p, k = np.broadcast_arrays(p, k)
    cutoff = rejection_cutoff(alpha, k)
    below = p <= alpha
    with np.errstate(invalid="ignore"):
        wrongly_kept = stats.binom.sf(cutoff, k, p)
        wrongly_rejected = stats.binom.cdf(cutoff, k, p)
    out = np.where(below, wrongly_kept, wrongly_rejected)
    out = np.where(k == 0, np.where(below, 0.0, 1.0), out)
    return np.clip(out, 0.0, 1.0)


def g_i(p: float, alpha: float, k: int) -> float:
    """P(M_i | k): probability that k samples misclassify hypothesis i."""
    _check_scalar(p, alpha, k)
    if float(k) != math.floor(k):
        raise InvalidInputError(f"k must be an integer, got {k!r}", field="k")
    return float(g_terms(np.array([p]), alpha, np.array([k]))[0])


def g(p: PValueSet, k: Allocation) -> ObjectiveValue:
    """E(M | k) = sum_i g_i(k_i)."""
    _check_dims(p, k)
    if not k.is_discrete:
        raise InvalidInputError("g needs an integer allocation; round the continuous one first", field="allocation")
    return ObjectiveValue.from_terms(g_terms(p.values, p.alpha, k.budgets))


def plus_one_terms(p: np.ndarray, alpha: float, k: np.ndarray) -> np.ndarray:
    """Misclassification probability when classifying with (S + 1)/(k + 1) <= alpha."""
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    p, k = np.broadcast_arrays(p, k)
    cutoff = plus_one_cutoff(alpha, k)
    below = p <= alpha
    with np.errstate(invalid="ignore"):
        reject_prob = np.where(cutoff >= 0, stats.binom.cdf(np.maximum(cutoff, 0), k, p), 0.0)
    out = np.where(below, 1.0 - reject_prob, reject_prob)
    return np.clip(out, 0.0, 1.0)


def expected_plus_one(p: PValueSet, k: Allocation) -> ObjectiveValue:
    """Exact expected misclassifications of the empirical (plus-one) protocol."""
    _check_dims(p, k)
    if not k.is_discrete:
        raise InvalidInputError("needs an integer allocation", field="allocation")
    return ObjectiveValue.from_terms(plus_one_terms(p.values, p.alpha, k.budgets))


# --- normal approximation -----------------------------------------------------

def _sigma(p: np.ndarray) -> np.ndarray:
    return np.sqrt(p * (1.0 - p))


def z_score(p, alpha: float, k) -> np.ndarray:
    """z = sqrt(k) (alpha - p) / sqrt(p (1 - p))."""
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.sqrt(k) * (alpha - p) / _sigma(p)


def h_terms(p: np.ndarray, alpha: float, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised h_i; also returns the mask of zero-variance hypotheses."""
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    p, k = np.broadcast_arrays(p, k)
    certain = (p <= 0.0) | (p >= 1.0)
    safe_p = np.where(certain, 0.5, p)
    z = z_score(safe_p, alpha, k)
    below = p <= alpha
    out = np.where(below, stats.norm.sf(z), stats.norm.cdf(z))
    out = np.where(certain, 0.0, out)
    return np.clip(out, 0.0, 1.0), certain


def h_i(p: float, alpha: float, k: float) -> float:
    """Normal approximation of g_i for a continuous budget k."""
    _check_scalar(p, alpha, k)
    terms, _ = h_terms(np.array([p]), alpha, np.array([k]))
    return float(terms[0])


def h(p: PValueSet, k: Allocation) -> ObjectiveValue:
    """h(k) = sum_i h_i(k_i); accepts continuous and discrete allocations."""
    _check_dims(p, k)
    terms, certain = h_terms(p.values, p.alpha, k.budgets)
    return ObjectiveValue.from_terms(terms, np.flatnonzero(certain))


def log_abs_dh_dk(p: np.ndarray, alpha: float, log_k: np.ndarray) -> np.ndarray:
    """log |dh_i/dk_i| evaluated at k = exp(log_k); p must avoid {0, 1, alpha}.

    Stays finite where the derivative itself would underflow.
    """
    p = np.asarray(p, dtype=np.float64)
    log_k = np.asarray(log_k, dtype=np.float64)
    sigma = _sigma(p)
    gap = np.abs(p - alpha)
    z = np.exp(0.5 * log_k) * gap / sigma
    return np.log(gap) + _LOG_HALF - 0.5 * log_k - np.log(sigma) + stats.norm.logpdf(z)


def dh_dk_terms(p: np.ndarray, alpha: float, k: np.ndarray) -> np.ndarray:
    """Vectorised dh_i/dk_i = -|p - alpha| / (2 sqrt(k p (1-p))) * phi(z)."""
    p = np.asarray(p, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    p, k = np.broadcast_arrays(p, k)
    flat = (p <= 0.0) | (p >= 1.0) | (p == alpha)
    safe_p = np.where(flat, 0.5, p)
    safe_alpha_gap = np.where(flat, 1.0, np.abs(safe_p - alpha))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        sigma = _sigma(safe_p)
        z = np.sqrt(k) * safe_alpha_gap / sigma
        out = -safe_alpha_gap / (2.0 * np.sqrt(k) * sigma) * stats.norm.pdf(z)
    return np.where(flat, 0.0, out)


def dh_dk(p: float, alpha: float, k: float) -> float:
    """Derivative of h_i in k; negative and increasing towards 0.

    Returns 0 for p == alpha (flat at h_i = 0.5) and for p in {0, 1}.
    """
    _check_scalar(p, alpha, k)
    if k == 0.0 and 0.0 < p < 1.0 and p != alpha:
        return -math.inf
    return float(dh_dk_terms(np.array([p]), alpha, np.array([k]))[0])
