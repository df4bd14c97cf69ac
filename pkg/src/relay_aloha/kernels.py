"""Scalar numeric kernels shared by the analytic throughput model.

Everything in :mod:`relay_aloha.model` is assembled from three ingredients:
the weighted exponential sums H_m(x) = sum_{n>=0} x^n n^m / n!, Poisson
probabilities, and binomial coefficients.  This module provides all three,
with a brute-force series evaluator of H_m kept around as an independent
cross-check of the fast recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_TOL = 1e-14

# Binomial coefficients up to this n are converted from exact integers, so
# small alternating sums carry no rounding noise from the coefficients.
_EXACT_COMB_MAX_N = 1000


class NonConvergenceError(RuntimeError):
    """A truncated series hit its hard cap before meeting the tolerance."""


@dataclass(frozen=True)
class SeriesTruncation:
    """Truncation policy for the infinite sums over the slot occupancy n.

    ``tol`` is an absolute bound on the first omitted term, ``n_max_hard``
    the largest summation index ever attempted.
    """

    tol: float = DEFAULT_TOL
    n_max_hard: int = 200

    def __post_init__(self) -> None:
        if not (self.tol > 0.0):
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.n_max_hard < 1:
            raise ValueError(f"n_max_hard must be >= 1, got {self.n_max_hard}")


def default_truncation(g: float, tol: float = DEFAULT_TOL) -> SeriesTruncation:
    """Truncation for Poisson-weighted sums at mean occupancy ``g``.

    The cap leaves a dozen standard deviations of headroom past the mean,
    so the omitted tail is far below ``tol`` whenever the cap is reached
    through the normal stopping rule.
    """
    if g < 0.0:
        raise ValueError(f"g must be non-negative, got {g}")
    hard = max(200, math.ceil(g + 12.0 * math.sqrt(g) + 50.0))
    return SeriesTruncation(tol=tol, n_max_hard=hard)


@dataclass
class HCache:
    """Memo table for H_m(x), keyed by exact (order, bit-pattern of x).

    Entries are immutable once inserted: a value is computed at most once
    per key and every later lookup returns the identical float.  Inserts
    are idempotent, so the cache may be shared across threads that only
    read or re-insert equal values.
    """

    max_order: int = 32
    values: dict[tuple[int, float], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_order < 0:
            raise ValueError(f"max_order must be >= 0, got {self.max_order}")


_SHARED_CACHE = HCache()


def ancillary_h(m: int, x: float, cache: HCache | None = None) -> float:
    """H_m(x) = sum_{n>=0} x^n n^m / n!, via the order recursion.

    H_0(x) = e^x and, for m >= 1,

        H_m(x) = x * sum_{l=0}^{m-1} C(m-1, l) H_l(x),

    which follows from shifting the summation index and expanding
    (t+1)^(m-1) binomially.  The leading factor x is essential: it gives
    H_1(x) = x e^x, matching the series definition (checked against
    :func:`ancillary_h_oracle` in the test suite).
    """
    if m < 0:
        raise ValueError(f"order m must be non-negative, got {m}")
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"x must be finite and non-negative, got {x}")
    if cache is None:
        cache = _SHARED_CACHE
    if m > cache.max_order:
        raise ValueError(
            f"order {m} exceeds cache max_order {cache.max_order}"
        )
    hit = cache.values.get((m, x))
    if hit is not None:
        return hit
    # Fill all lower orders at this x; each is needed by the recursion.
    known: list[float] = []
    for j in range(m + 1):
        v = cache.values.get((j, x))
        if v is None:
            if j == 0:
                v = math.exp(x)
            else:
                v = x * math.fsum(
                    math.comb(j - 1, l) * known[l] for l in range(j)
                )
            cache.values[(j, x)] = v
        known.append(v)
    return known[m]


def ancillary_h_oracle(
    m: int, x: float, trunc: SeriesTruncation | None = None
) -> float:
    """Direct partial sum of x^n n^m / n!, the slow reference for H_m.

    Terms are accumulated until the sequence is past its maximum and the
    first omitted term is below ``trunc.tol``.  Independent of the
    recursion in :func:`ancillary_h` by construction.
    """
    if m < 0:
        raise ValueError(f"order m must be non-negative, got {m}")
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"x must be finite and non-negative, got {x}")
    if trunc is None:
        trunc = default_truncation(x + m)
    total = 0.0
    weight = 1.0  # x^n / n!
    prev = math.inf
    n = 0
    while n <= trunc.n_max_hard:
        term = weight * float(n) ** m if n > 0 else (1.0 if m == 0 else 0.0)
        total += term
        if n >= 1 and term < trunc.tol and term <= prev and n > x:
            return total
        prev = term
        n += 1
        weight *= x / n
    raise NonConvergenceError(
        f"H_{m}({x}) series did not meet tol={trunc.tol} "
        f"within {trunc.n_max_hard} terms"
    )


def poisson_pmf(n: int, g: float) -> float:
    """P[N = n] for N Poisson with mean g, i.e. g^n e^-g / n!.

    Evaluated directly for small n and in the log domain otherwise, so
    large counts neither overflow nor underflow prematurely.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if not (g >= 0.0):
        raise ValueError(f"g must be non-negative, got {g}")
    if g == 0.0:
        return 1.0 if n == 0 else 0.0
    if n < 30 and g < 500.0:
        return g**n * math.exp(-g) / math.factorial(n)
    return math.exp(n * math.log(g) - g - math.lgamma(n + 1))


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k).  Exact-integer path for every n this package uses."""
    if n < 0 or k < 0:
        raise ValueError(f"n and k must be non-negative, got n={n}, k={k}")
    if k > n:
        raise ValueError(f"k must not exceed n, got n={n}, k={k}")
    if n <= _EXACT_COMB_MAX_N:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
