"""Parametric norm families and the two weight-family constructions.

A norm family prescribes the norms a_n > 0 of a sequence.  For the two
parametric variants (pure power and power-with-log), divergence of
sum a_n^(-q) is decided analytically; explicit value lists never receive
a divergence verdict because numeric divergence detection is unsound.

Two weight families are built from a family: triangular prefix weights
(row n averages over columns 1..n with weights proportional to a_m^(-2),
or a caller-chosen exponent), and disjoint block weights (row k averages
over one block of a partition with weights proportional to a_m^(-p')).
The block construction requires block sums that can be pushed past any
target, i.e. a divergent inverse-power sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import (
    BoundViolationError,
    ConstructionImpossibleError,
    InvalidInputError,
    NoCertificateError,
    ResourceLimitError,
)
from .seeding import rng_for
from .spaces import (
    EUCLIDEAN_COMPLEX,
    EUCLIDEAN_REAL,
    LP,
    Functional,
    Space,
    Vector,
    dual_norm,
    random_rotation,
)
from .summability import WeightMatrix, ordered_sum

POWER = "power"
POWERLOG = "powerlog"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class NormFamily:
    """Prescribed norms a_n, either parametric or an explicit list.

    power(c, alpha): a_n = c * n^alpha, c > 0.
    powerlog(alpha, beta): a_n = n^alpha * ln(n+1)^beta.
    explicit(values): a finite list of positives; no analytic certificates.
    """

    variant: str
    c: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in (POWER, POWERLOG, EXPLICIT):
            raise InvalidInputError(f"unknown family variant {self.variant!r}")
        if self.variant == POWER and not self.c > 0:
            raise InvalidInputError("power family needs c > 0")
        if self.variant == EXPLICIT:
            arr = np.asarray(self.values, dtype=np.float64).copy()
            if arr.ndim != 1 or arr.size == 0:
                raise InvalidInputError("explicit family needs a nonempty value list")
            if not np.all(arr > 0):
                raise InvalidInputError("explicit family values must be positive")
            arr.flags.writeable = False
            object.__setattr__(self, "values", arr)

    # -- constructors ---------------------------------------------------

    @classmethod
    def power(cls, c: float, alpha: float) -> "NormFamily":
        return cls(POWER, c=float(c), alpha=float(alpha))

    @classmethod
    def powerlog(cls, alpha: float, beta: float) -> "NormFamily":
        return cls(POWERLOG, alpha=float(alpha), beta=float(beta))

    @classmethod
    def explicit(cls, values) -> "NormFamily":
        return cls(EXPLICIT, values=values)

    # -- evaluation -----------------------------------------------------

    def value(self, n: int) -> float:
        """a_n for 1-based n."""
        return float(self.values_range(n, n)[0])

    def values_range(self, lo: int, hi: int) -> np.ndarray:
        """a_lo..a_hi inclusive, vectorized."""
        if lo < 1 or hi < lo:
            raise InvalidInputError(f"bad range {lo}..{hi}")
        if self.variant == EXPLICIT:
            if hi > self.values.size:
                raise InvalidInputError(
                    f"explicit family has {self.values.size} values, needs {hi}"
                )
            return self.values[lo - 1 : hi]
        n = np.arange(lo, hi + 1, dtype=np.float64)
        if self.variant == POWER:
            return self.c * n**self.alpha
        return n**self.alpha * np.log(n + 1.0) ** self.beta

    def values_upto(self, horizon: int) -> np.ndarray:
        return self.values_range(1, horizon)

    # -- divergence of sum a_n^(-q) -------------------------------------

    def diverges(self, q: float) -> bool:
        """Analytic verdict on divergence of sum a_n^(-q); q > 0.

        Raises :class:`NoCertificateError` for explicit lists, which only
        support partial sums.
        """
        if not q > 0:
            raise InvalidInputError("divergence exponent must be positive")
        if self.variant == EXPLICIT:
            raise NoCertificateError(
                "explicit families carry no divergence certificate; "
                "use partial sums instead"
            )
        qa = q * self.alpha
        if self.variant == POWER:
            return qa <= 1.0
        qb = q * self.beta
        return qa < 1.0 or (qa == 1.0 and qb <= 1.0)

    def partial_sum(self, q: float, horizon: int) -> float:
        """sum_{n<=horizon} a_n^(-q), accumulated in increasing n."""
        return ordered_sum(self.values_upto(horizon) ** (-q))

    def partial_sums(self, q: float, horizon: int) -> np.ndarray:
        """All prefix sums of a_n^(-q) up to the horizon."""
        return np.cumsum(self.values_upto(horizon) ** (-q))

    def tail_bound(self, q: float, start: int) -> float:
        """Upper bound on sum_{n>start} a_n^(-q) via the integral test.

        Only valid for a convergent verdict; assumes the terms are
        nonincreasing from ``start`` on, which holds for the parametric
        variants once start is past any initial log hump.
        """
        if self.diverges(q):
            raise InvalidInputError("tail bound requires a convergent certificate")
        qa = q * self.alpha
        if self.variant == POWER:
            return self.c ** (-q) * start ** (1.0 - qa) / (qa - 1.0)
        qb = q * self.beta
        with warnings.catch_warnings():
            # the integrand decays like a power of log; quad converges but
            # keeps flagging slow subdivision on the infinite tail
            warnings.simplefilter("ignore", IntegrationWarning)
            est, err = quad(
                lambda x: x ** (-qa) * math.log(x + 1.0) ** (-qb),
                start,
                np.inf,
                limit=200,
            )
        return est + err

    # -- descriptors ----------------------------------------------------

    def descriptor(self) -> str:
        if self.variant == POWER:
            return f"power:{format(self.c, '.17g')}:{format(self.alpha, '.17g')}"
        if self.variant == POWERLOG:
            return f"powerlog:{format(self.alpha, '.17g')}:{format(self.beta, '.17g')}"
        return f"explicit:<{self.values.size} values>"


def parse_family(text: str) -> NormFamily:
    """Parse ``power:c:alpha``, ``powerlog:alpha:beta`` or ``explicit:@file``."""
    parts = text.strip().split(":")
    try:
        if parts[0] == POWER and len(parts) == 3:
            return NormFamily.power(float(parts[1]), float(parts[2]))
        if parts[0] == POWERLOG and len(parts) == 3:
            return NormFamily.powerlog(float(parts[1]), float(parts[2]))
        if parts[0] == EXPLICIT and len(parts) == 2 and parts[1].startswith("@"):
            raw = np.loadtxt(parts[1][1:], delimiter=",", ndmin=1)
            return NormFamily.explicit(np.ravel(raw))
    except (ValueError, OSError) as exc:
        raise InvalidInputError(f"bad family descriptor {text!r}: {exc}") from exc
    raise InvalidInputError(f"bad family descriptor {text!r}")


@dataclass(frozen=True)
class ExponentPair:
    """Conjugate exponents p in [2, inf], p' in [1, 2] with 1/p + 1/p' = 1."""

    p: float
    p_prime: float

    def __post_init__(self):
        if not 2.0 <= self.p:
            raise InvalidInputError("p must lie in [2, inf]")
        if not 1.0 <= self.p_prime <= 2.0:
            raise InvalidInputError("p' must lie in [1, 2]")
        inv_p = 0.0 if math.isinf(self.p) else 1.0 / self.p
        if abs(inv_p + 1.0 / self.p_prime - 1.0) > 1e-12:
            raise InvalidInputError(
                f"p={self.p} and p'={self.p_prime} are not conjugate"
            )

    @classmethod
    def from_p(cls, p: float) -> "ExponentPair":
        p = float(p)
        if math.isinf(p):
            return cls(p, 1.0)
        if p == 2.0:
            return cls(2.0, 2.0)
        return cls(p, p / (p - 1.0))

    @classmethod
    def from_p_prime(cls, p_prime: float) -> "ExponentPair":
        p_prime = float(p_prime)
        if p_prime == 1.0:
            return cls(math.inf, 1.0)
        if p_prime == 2.0:
            return cls(2.0, 2.0)
        return cls(p_prime / (p_prime - 1.0), p_prime)


# ---------------------------------------------------------------------------
# triangular prefix construction
# ---------------------------------------------------------------------------


def scaled_basis_sequence(
    space: Space, fam: NormFamily, count: int, rotation_seed: int | None = None
):
    """Vectors x_n = a_n e_n for an orthonormal basis of a Euclidean model.

    With ``rotation_seed`` the canonical basis is replaced by the columns
    of a seeded rotation, which keeps all norms and mutual pairings.
    """
    if space.kind not in (EUCLIDEAN_REAL, EUCLIDEAN_COMPLEX):
        raise InvalidInputError("scaled basis sequences live in Euclidean models")
    if count > space.dim:
        raise InvalidInputError(
            f"need dimension >= {count}, space has {space.dim}"
        )
    a = fam.values_upto(count)
    if rotation_seed is None:
        basis = np.eye(space.dim, count, dtype=space.dtype)
    else:
        basis = random_rotation(space, rotation_seed).matrix[:, :count]
    return [Vector(space, a[n] * basis[:, n]) for n in range(count)]


def prefix_weights(
    fam: NormFamily, n_rows: int, exponent: float = 2.0
) -> WeightMatrix:
    """Triangular weight matrix: row n carries weights a_m^(-exponent),
    m <= n, normalized by the prefix sum."""
    if n_rows < 1:
        raise InvalidInputError("need at least one row")
    inv = fam.values_upto(n_rows) ** (-float(exponent))
    prefix = np.cumsum(inv)
    return WeightMatrix.from_scaled_slices(
        base=inv,
        starts=np.ones(n_rows, dtype=np.int64),
        stops=np.arange(2, n_rows + 2, dtype=np.int64),
        scales=1.0 / prefix,
    )


# ---------------------------------------------------------------------------
# block construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockPartition:
    """Boundaries 0 = b_0 < b_1 < ... < b_K with block k = (b_{k-1}, b_k],
    the recorded block sums S_k = sum over block k of a_j^(-p'), and p'."""

    boundaries: np.ndarray
    sums: np.ndarray
    p_prime: float

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=np.int64).copy()
        s = np.asarray(self.sums, dtype=np.float64).copy()
        if b.ndim != 1 or b.size < 2 or b[0] != 0:
            raise InvalidInputError("boundaries must start at 0 and name every block")
        if np.any(np.diff(b) <= 0):
            raise InvalidInputError("boundaries must be strictly increasing")
        if s.shape != (b.size - 1,):
            raise InvalidInputError("one recorded sum per block is required")
        b.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "sums", s)
        object.__setattr__(self, "p_prime", float(self.p_prime))

    @property
    def n_blocks(self) -> int:
        return self.boundaries.size - 1

    @property
    def horizon(self) -> int:
        return int(self.boundaries[-1])

    def block(self, k: int):
        """1-based inclusive column range of block k."""
        if not 1 <= k <= self.n_blocks:
            raise InvalidInputError(f"block {k} outside 1..{self.n_blocks}")
        return int(self.boundaries[k - 1]) + 1, int(self.boundaries[k])

    @classmethod
    def from_family(cls, fam: NormFamily, boundaries, p_prime: float):
        """Partition with sums recomputed from the family."""
        b = np.asarray(boundaries, dtype=np.int64)
        sums = [
            ordered_sum(fam.values_range(int(lo) + 1, int(hi)) ** (-float(p_prime)))
            for lo, hi in zip(b[:-1], b[1:])
        ]
        return cls(b, np.array(sums), p_prime)

    def recomputed_sums(self, fam: NormFamily) -> np.ndarray:
        return BlockPartition.from_family(fam, self.boundaries, self.p_prime).sums

    def to_json_obj(self) -> dict:
        return {
            "boundaries": [int(x) for x in self.boundaries],
            "sums": [float(x) for x in self.sums],
            "p_prime": self.p_prime,
        }

    @classmethod
    def from_json_obj(cls, data) -> "BlockPartition":
        return cls(
            np.asarray(data["boundaries"], dtype=np.int64),
            np.asarray(data["sums"], dtype=np.float64),
            float(data["p_prime"]),
        )


def block_partition(
    fam: NormFamily,
    p_prime: float,
    n_blocks: int,
    growth_target: float,
    horizon_cap: int = 10_000_000,
) -> BlockPartition:
    """Greedy partition whose block sums satisfy S_k >= growth_target * k.

    Later blocks are additionally extended to S_k >= S_1 so the final
    block never undercuts the first.  Requires an analytic divergence
    certificate for sum a_n^(-p'); a convergent family cannot supply
    blocks with unboundedly growing sums, and the horizon cap bounds the
    scan for families that diverge too slowly.
    """
    if n_blocks < 1:
        raise InvalidInputError("need at least one block")
    if growth_target < 0:
        raise InvalidInputError("growth target must be >= 0")
    if not fam.diverges(p_prime):
        raise ConstructionImpossibleError(
            f"sum a_n^(-{p_prime}) converges for family {fam.descriptor()}; "
            "blocks with sums exceeding every target do not exist"
        )
    chunk = 1 << 16
    horizon = min(chunk, horizon_cap)
    inv = fam.values_upto(horizon) ** (-float(p_prime))
    cum = np.cumsum(inv)

    def extend_to(total_needed: float) -> bool:
        nonlocal horizon, inv, cum
        while cum[-1] < total_needed:
            if horizon >= horizon_cap:
                return False
            new_horizon = min(horizon * 2, horizon_cap)
            extra = fam.values_range(horizon + 1, new_horizon) ** (-float(p_prime))
            inv = np.concatenate([inv, extra])
            cum = np.concatenate([cum, cum[-1] + np.cumsum(extra)])
            horizon = new_horizon
        return True

    boundaries = [0]
    sums = []
    first_sum = None
    for k in range(1, n_blocks + 1):
        lo = boundaries[-1]
        target = growth_target * k
        if first_sum is not None:
            target = max(target, first_sum)
        base = cum[lo - 1] if lo > 0 else 0.0
        if not extend_to(base + target):
            raise ResourceLimitError(
                f"block {k} needs a horizon beyond the cap {horizon_cap}"
            )
        hi = int(np.searchsorted(cum, base + target)) + 1
        hi = max(hi, lo + 1)  # every block holds at least one column
        s_k = ordered_sum(inv[lo:hi])
        # prefix arithmetic can land a hair under the target; patch forward
        while s_k < target:
            if hi >= horizon_cap:
                raise ResourceLimitError(
                    f"block {k} needs a horizon beyond the cap {horizon_cap}"
                )
            if not extend_to(cum[hi - 1] + inv[hi - 1]):
                raise ResourceLimitError(
                    f"block {k} needs a horizon beyond the cap {horizon_cap}"
                )
            hi += 1
            s_k = ordered_sum(inv[lo:hi])
        boundaries.append(hi)
        sums.append(s_k)
        if first_sum is None:
            first_sum = s_k
    return BlockPartition(
        np.array(boundaries, dtype=np.int64), np.array(sums), float(p_prime)
    )


def block_weights(fam: NormFamily, part: BlockPartition) -> WeightMatrix:
    """Row k carries weights a_m^(-p') / S_k on block k, zero elsewhere."""
    inv = fam.values_upto(part.horizon) ** (-part.p_prime)
    return WeightMatrix.from_scaled_slices(
        base=inv,
        starts=part.boundaries[:-1] + 1,
        stops=part.boundaries[1:] + 1,
        scales=1.0 / part.sums,
    )


def block_basis(
    space: Space,
    part: BlockPartition,
    perturb_seed: int | None = None,
    noise_scale: float = 0.03,
    distortion_cap: float = 1.0 / 8.0,
    n_check: int = 100,
    max_retries: int = 10,
):
    """Unit vectors e_1..e_{horizon} in an lp model, grouped by the partition.

    The canonical basis realizes the lp norm on block coefficients with
    zero distortion.  With ``perturb_seed`` each vector receives seeded
    coordinate noise and is renormalized; the draw is retried (up to
    ``max_retries`` times) until the distortion measured on ``n_check``
    random in-block coefficient vectors stays below ``distortion_cap``.
    """
    if space.kind != LP:
        raise InvalidInputError("block bases are built in lp models")
    if space.dim < part.horizon:
        raise InvalidInputError(
            f"need dimension >= {part.horizon}, space has {space.dim}"
        )
    if perturb_seed is None:
        return [space.basis_vector(n) for n in range(1, part.horizon + 1)]
    for attempt in range(max_retries):
        vectors = []
        for n in range(1, part.horizon + 1):
            rng = rng_for(perturb_seed, attempt * part.horizon + (n - 1))
            z = rng.standard_normal(space.dim)
            z /= float(np.sum(np.abs(z) ** space.p) ** (1.0 / space.p))
            e = np.zeros(space.dim)
            e[n - 1] = 1.0
            v = e + noise_scale * z
            v /= float(np.sum(np.abs(v) ** space.p) ** (1.0 / space.p))
            vectors.append(Vector(space, v))
        lo, hi = block_distortion(
            space, part, vectors, n_samples=n_check, seed=derive_check_seed(perturb_seed, attempt)
        )
        if 1.0 - distortion_cap < lo and hi < 1.0 + distortion_cap:
            return vectors
    raise ResourceLimitError(
        f"distortion stayed >= {distortion_cap} after {max_retries} perturbation draws"
    )


def derive_check_seed(seed: int, attempt: int) -> int:
    # distortion checks draw from a stream disjoint from the vector noise
    return (int(seed) ^ (0x5EED << 40) ^ int(attempt)) & ((1 << 64) - 1)


def block_distortion(space, part, basis, n_samples: int = 100, seed: int = 0):
    """Extreme ratios of ||sum b_j e_j|| to the lp norm of b, over seeded
    in-block coefficient draws.  (1.0, 1.0) up to rounding for the
    canonical basis."""
    rng = rng_for(seed)
    lo, hi = math.inf, -math.inf
    coords = np.stack([v.coords for v in basis], axis=1)
    for k in range(1, part.n_blocks + 1):
        a, b = part.block(k)
        width = b - a + 1
        for _ in range(n_samples):
            coeff = rng.standard_normal(width)
            combo = coords[:, a - 1 : b] @ coeff
            num = float(np.sum(np.abs(combo) ** space.p) ** (1.0 / space.p))
            den = float(np.sum(np.abs(coeff) ** space.p) ** (1.0 / space.p))
            ratio = num / den
            lo = min(lo, ratio)
            hi = max(hi, ratio)
    return lo, hi


@dataclass
class BoundCheck:
    """One verified row-level inequality lhs <= constant * ||f||^p' / S_row."""

    row: int
    lhs: float
    rhs: float
    constant: float
    functional_norm: float
    measured_constant: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def block_transform_bound(
    space: Space,
    fam: NormFamily,
    part: BlockPartition,
    f: Functional,
    row: int,
    basis=None,
    constant: float | None = None,
) -> BoundCheck:
    """Row-k average of |f(x_m)|^{p'} against the decay bound C ||f||^{p'} / S_k.

    x_m = a_m e_m over the block basis (canonical unless ``basis`` is the
    perturbed one).  C defaults to 1 for the exact basis and 2 for a
    perturbed basis.  Raises :class:`BoundViolationError` when the bound
    fails, which signals a broken invariant rather than bad input.
    """
    if basis is None:
        basis = [space.basis_vector(n) for n in range(1, part.horizon + 1)]
        if constant is None:
            constant = 1.0
    elif constant is None:
        constant = 2.0
    pp = part.p_prime
    lo, hi = part.block(row)
    a = fam.values_range(lo, hi)
    pairings = np.array(
        [abs(np.vdot(f.coords, basis[m - 1].coords)) for m in range(lo, hi + 1)]
    )
    weights = a ** (-pp) / part.sums[row - 1]
    lhs = ordered_sum(weights * (a * pairings) ** pp)
    fn = dual_norm(f)
    rhs = constant * fn**pp / float(part.sums[row - 1])
    measured = lhs * float(part.sums[row - 1]) / fn**pp if fn > 0 else 0.0
    if lhs > rhs:
        raise BoundViolationError(
            f"row {row}: weighted pairing average {lhs} exceeds bound {rhs}"
        )
    return BoundCheck(
        row=row,
        lhs=lhs,
        rhs=rhs,
        constant=float(constant),
        functional_norm=fn,
        measured_constant=measured,
    )
