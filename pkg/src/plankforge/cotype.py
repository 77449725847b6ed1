"""Sign-combination cotype experiments and row-level duality checks.

The cotype ratio of a finite vector set is the best of 2^(n-1) sign
combinations (the other half mirrors by symmetry): max over signs of
||sum gamma_k x_k|| divided by (sum ||x_k||^p)^(1/p).  Enumeration is
exact up to n = 24; beyond that an explicitly labeled sampling mode
yields a lower bound only.

The row checks pair a weight matrix with a vector sequence: a Holder
product that must clear 1 on every row, a growth/decay cross-check of
partial sums against analytic divergence verdicts, and an empirical
operator constant for weighted pairing averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidInputError,
    NoCertificateError,
    ResourceLimitError,
)
from .seeding import rng_for
from .spaces import EUCLIDEAN_COMPLEX, EUCLIDEAN_REAL, LP, SUP, Space, dual_norm, norm, pair
from .summability import WeightMatrix, ordered_sum

ENUMERATION_CAP = 24
_CHUNK = 1 << 14


def _row_norms(space: Space, rows: np.ndarray) -> np.ndarray:
    """Model norm of each row of a (chunk x dim) array."""
    if space.kind in (EUCLIDEAN_REAL, EUCLIDEAN_COMPLEX):
        return np.linalg.norm(rows, axis=1)
    if space.kind == SUP:
        return np.max(np.abs(rows), axis=1)
    if space.kind == LP:
        return np.sum(np.abs(rows) ** space.p, axis=1) ** (1.0 / space.p)
    raise InvalidInputError(f"unknown space kind {space.kind!r}")


def pattern_from_index(index: int, n: int) -> np.ndarray:
    """Sign pattern number ``index``: gamma_1 = +1, remaining signs read
    off the binary digits (0 -> +1, 1 -> -1), lowest bit first."""
    bits = (index >> np.arange(n - 1)) & 1
    return np.concatenate([[1], 1 - 2 * bits]).astype(np.int64)


def signed_combination_norms(space: Space, xs) -> np.ndarray:
    """||sum gamma_k x_k|| for every pattern with gamma_1 = +1, ordered by
    pattern index.  Mirrored patterns have equal norms, so averages over
    this half equal averages over all 2^n patterns."""
    n = len(xs)
    if n == 0:
        raise InvalidInputError("need a nonempty vector set")
    if n - 1 >= 63:
        raise ResourceLimitError("pattern space too large to index")
    X = np.stack([x.coords for x in xs])
    total = 1 << (n - 1)
    out = np.empty(total)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        bits = (idx[:, None] >> np.arange(n - 1)[None, :]) & 1
        signs = np.hstack([np.ones((idx.size, 1)), 1.0 - 2.0 * bits])
        out[start : start + idx.size] = _row_norms(space, signs.astype(X.dtype) @ X)
    return out


@dataclass
class CotypeReport:
    """Best sign-combination ratio with the pattern that achieves it."""

    ratio: float
    pattern: list
    n: int
    p: float
    enumerated: int
    exact: bool

    def to_json_obj(self) -> dict:
        return {
            "ratio": self.ratio,
            "pattern": [int(s) for s in self.pattern],
            "n": self.n,
            "p": self.p if not math.isinf(self.p) else "inf",
            "enumerated": self.enumerated,
            "exact": self.exact,
        }


def _denominator(norms: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(norms))
    return float(ordered_sum(norms**p) ** (1.0 / p))


def cotype_ratio(
    space: Space,
    xs,
    p: float,
    sampling: bool = False,
    n_samples: int = 4096,
    seed: int = 0,
) -> CotypeReport:
    """max_gamma ||sum gamma_k x_k|| / (sum ||x_k||^p)^(1/p), exact by
    enumeration for n <= 24.

    Ties go to the lowest pattern index.  ``sampling=True`` replaces the
    enumeration by seeded random patterns and the result is only a lower
    bound, flagged by ``exact=False``.
    """
    n = len(xs)
    if n < 1:
        raise InvalidInputError("need at least one vector")
    if not p >= 1.0:
        raise InvalidInputError("exponent must be >= 1")
    norms = np.array([norm(x) for x in xs])
    denom = _denominator(norms, p)
    if denom == 0.0:
        raise InvalidInputError("all-zero vector sets have no ratio")
    if not sampling:
        if n > ENUMERATION_CAP:
            raise ResourceLimitError(
                f"{n} vectors need 2^{n - 1} patterns; enumeration caps at "
                f"{ENUMERATION_CAP} — use sampling mode for a lower bound"
            )
        combo_norms = signed_combination_norms(space, xs)
        best = int(np.argmax(combo_norms))  # argmax takes the first maximum
        return CotypeReport(
            ratio=float(combo_norms[best]) / denom,
            pattern=[int(s) for s in pattern_from_index(best, n)],
            n=n,
            p=float(p),
            enumerated=combo_norms.size,
            exact=True,
        )
    if n_samples < 1:
        raise InvalidInputError("sampling mode needs at least one pattern")
    X = np.stack([x.coords for x in xs])
    rng = rng_for(seed)
    best_norm, best_pattern = -math.inf, None
    for _ in range(n_samples):
        signs = np.concatenate([[1.0], 1.0 - 2.0 * rng.integers(0, 2, n - 1)])
        value = float(_row_norms(space, (signs.astype(X.dtype) @ X)[None, :])[0])
        if value > best_norm:
            best_norm, best_pattern = value, signs
    return CotypeReport(
        ratio=best_norm / denom,
        pattern=[int(s) for s in best_pattern],
        n=n,
        p=float(p),
        enumerated=n_samples,
        exact=False,
    )


def cotype_constant_estimate(space: Space, test_sets, p: float) -> float:
    """Infimum over the supplied sets of the best sign-combination ratio."""
    if not test_sets:
        raise InvalidInputError("need at least one test set")
    return min(cotype_ratio(space, xs, p).ratio for xs in test_sets)


# ---------------------------------------------------------------------------
# row-level checks
# ---------------------------------------------------------------------------


@dataclass
class HolderCheck:
    """Product of the weighted-norm and inverse-norm factors on one row."""

    row: int
    lhs: float
    factor_weighted: float
    factor_dual: float
    product: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "row": self.row,
            "lhs": self.lhs,
            "factor_weighted": self.factor_weighted,
            "factor_dual": self.factor_dual,
            "product": self.product,
            "passed": self.passed,
        }


def holder_row_check(
    matrix: WeightMatrix, xs, exponents, n: int, tol: float = 1e-9
) -> HolderCheck:
    """Row-n duality product (sum (w_m ||x_m||)^p)^(1/p) * (sum ||x_m||^(-p'))^(1/p')
    with the max form at p = inf; a stochastic row forces the product >= 1.
    """
    cols, weights = matrix.row(n)
    if cols.size == 0:
        raise InvalidInputError(f"row {n} has empty support")
    if cols[-1] > len(xs):
        raise InvalidInputError(
            f"row {n} references column {cols[-1]} but only {len(xs)} vectors given"
        )
    p, pp = exponents.p, exponents.p_prime
    norms = np.array([norm(xs[m - 1]) for m in cols])
    if np.any(norms == 0.0):
        raise InvalidInputError(f"zero-norm vector on the support of row {n}")
    if math.isinf(p):
        factor1 = float(np.max(weights * norms))
    else:
        factor1 = float(ordered_sum((weights * norms) ** p) ** (1.0 / p))
    factor2 = float(ordered_sum(norms ** (-pp)) ** (1.0 / pp))
    product = factor1 * factor2
    return HolderCheck(
        row=n,
        lhs=1.0,
        factor_weighted=factor1,
        factor_dual=factor2,
        product=product,
        passed=bool(product >= 1.0 - tol),
    )


@dataclass
class NecessaryReport:
    """Partial-sum growth of sum a_n^(-p') against the analytic verdict."""

    family: str
    p_prime: float
    horizon: int
    quarter_sum: float
    half_sum: float
    full_sum: float
    verdict: str | None
    consistent: object  # True / False / "indeterminate"
    growth_factor: float

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "p_prime": self.p_prime,
            "horizon": self.horizon,
            "quarter_sum": self.quarter_sum,
            "half_sum": self.half_sum,
            "full_sum": self.full_sum,
            "verdict": self.verdict if self.verdict is not None else "none",
            "consistent": self.consistent,
            "growth_factor": self.growth_factor,
        }


def necessary_condition_check(fam, exponents, horizon: int) -> NecessaryReport:
    """Cross-check partial sums of a_n^(-p') against the analytic verdict.

    Divergent verdicts expect strictly increasing sums with the full sum
    at least 1.1x the half sum; convergent verdicts expect the late
    increment to fall below the analytic tail bound.  Families without a
    certificate get an "indeterminate" flag — partial sums never prove
    divergence.  The 1.1x growth gate is horizon-sensitive for slowly
    divergent families (log-like growth thins out as the horizon grows).
    """
    if horizon < 8:
        raise InsufficientDataError("need horizon >= 8 for quarter/half/full sums")
    q = exponents.p_prime
    sums = fam.partial_sums(q, horizon)
    quarter = float(sums[horizon // 4 - 1])
    half = float(sums[horizon // 2 - 1])
    full = float(sums[-1])
    growth = full / half if half > 0 else math.inf
    try:
        verdict = "divergent" if fam.diverges(q) else "convergent"
    except NoCertificateError:
        verdict = None
    if verdict == "divergent":
        consistent = bool(quarter < half < full and full >= 1.1 * half)
    elif verdict == "convergent":
        consistent = bool(full - half <= fam.tail_bound(q, horizon // 2))
    else:
        consistent = "indeterminate"
    return NecessaryReport(
        family=fam.descriptor(),
        p_prime=float(q),
        horizon=horizon,
        quarter_sum=quarter,
        half_sum=half,
        full_sum=full,
        verdict=verdict,
        consistent=consistent,
        growth_factor=growth,
    )


def sup_functional_bound(
    matrix: WeightMatrix, xs, functionals, p_prime: float = 1.0
) -> float:
    """Empirical operator constant: max over rows and sampled functionals of
    sum_m w_{n,m} |f(x_m)|^{p'} / ||f||^{p'}.

    The default p' = 1 gives the plain weighted average of |f(x_m)|.
    This is a sample maximum, reported as evidence only — it never proves
    the true constant.
    """
    if not functionals:
        raise InvalidInputError("need at least one functional")
    if matrix.max_column > len(xs):
        raise InvalidInputError(
            f"matrix references column {matrix.max_column} but only "
            f"{len(xs)} vectors given"
        )
    best = 0.0
    for f in functionals:
        fn = dual_norm(f)
        if fn == 0.0:
            raise InvalidInputError("zero functional has no normalized average")
        pairings = np.array([abs(pair(f, x)) for x in xs]) ** p_prime
        for n in range(1, matrix.n_rows + 1):
            cols, weights = matrix.row(n)
            if cols.size == 0:
                raise InvalidInputError(f"row {n} has empty support")
            avg = ordered_sum(weights * pairings[cols - 1])
            best = max(best, avg / fn**p_prime)
    return best
