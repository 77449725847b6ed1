"""Planks, cylinders, coverage sampling, and witness search.

A plank is the slab of points within half a width of a hyperplane; a
point h "separates" a sequence (x_n) when every |<h, x_n>| clears the
same threshold, which certifies that the planks built from the sequence
miss h.  Witness search is a nonconvex feasibility problem, so only
positive certificates are trusted: a failed search is reported as "not
found within budget", never as nonexistence.

Cylinders generalize planks to a handful of base directions; the demo
routine exhibits a family of slim cylinders that swallows every
finitely-supported probe even though the cubed base radii sum to a
bounded value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import (
    InvalidInputError,
    PreconditionError,
    SpaceMismatchError,
)
from .seeding import rng_for
from .spaces import (
    EUCLIDEAN_COMPLEX,
    ProductVector,
    Space,
    Vector,
    norm,
    product_pair_sq,
)
from .summability import ordered_sum


@dataclass(frozen=True)
class Plank:
    """Slab {v : |<v - offset, direction>| <= width/2} with unit direction."""

    direction: Vector
    width: float
    offset: Vector | None = None

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidInputError("plank width must be positive")
        if abs(norm(self.direction) - 1.0) > 1e-9:
            raise InvalidInputError("plank direction must have unit norm")
        if self.offset is None:
            object.__setattr__(self, "offset", self.direction.space.zero())
        elif self.offset.space != self.direction.space:
            raise SpaceMismatchError("plank offset lives in a different space")

    @property
    def space(self) -> Space:
        return self.direction.space


def plank_contains(plank: Plank, v: Vector) -> bool:
    """Non-strict membership |<v - offset, direction>| <= width/2."""
    if v.space != plank.space:
        raise SpaceMismatchError("vector and plank live in different spaces")
    z = np.vdot(plank.direction.coords, v.coords - plank.offset.coords)
    return bool(abs(z) <= plank.width / 2.0)


def planks_from_sequence(xs) -> list:
    """Centered planks with direction x_n/||x_n|| and width 1/||x_n||."""
    planks = []
    for x in xs:
        nx = norm(x)
        if nx == 0.0:
            raise InvalidInputError("zero vector yields no plank")
        planks.append(Plank(Vector(x.space, x.coords / nx), 1.0 / nx))
    return planks


def budget_sums(planks):
    """(sum of widths, sum of squared widths), accumulated in list order."""
    if not planks:
        return 0.0, 0.0
    w = np.array([p.width for p in planks])
    return ordered_sum(w), ordered_sum(w**2)


def parallel_cover_decision(planks, radius: float) -> bool:
    """Exact covering decision for planks sharing one direction.

    Membership in a parallel family depends only on the projection onto
    the shared axis, so the ball of the given radius (centered at the
    origin) is covered iff the union of projection intervals contains
    [-radius, radius].  The interval union is computed exactly.
    """
    if not planks:
        return False
    if not radius > 0:
        raise InvalidInputError("radius must be positive")
    e0 = planks[0].direction.coords
    intervals = []
    for p in planks:
        s = np.vdot(e0, p.direction.coords)
        if abs(abs(s) - 1.0) > 1e-9:
            raise InvalidInputError("interval decision requires parallel planks")
        s = 1.0 if s.real > 0 else -1.0
        c = complex(np.vdot(p.direction.coords, p.offset.coords)).real
        lo, hi = (c - p.width / 2.0) * s, (c + p.width / 2.0) * s
        intervals.append((min(lo, hi), max(lo, hi)))
    intervals.sort()
    reach = -radius
    for lo, hi in intervals:
        if lo > reach:
            return False
        reach = max(reach, hi)
        if reach >= radius:
            return True
    return reach >= radius


@dataclass
class CoverageReport:
    """Monte Carlo estimate of the ball fraction missed by a plank family."""

    uncovered_fraction: float
    samples: int
    radius: float
    seed: int
    n_planks: int
    uncovered_points: list = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "uncovered_fraction": self.uncovered_fraction,
            "samples": self.samples,
            "radius": self.radius,
            "seed": self.seed,
            "n_planks": self.n_planks,
            "uncovered_points": self.uncovered_points,
        }


def _ball_point(space: Space, radius: float, rng) -> np.ndarray:
    # Gaussian direction, radial CDF inversion: uniform in the ball
    d = space.dim
    if space.kind == EUCLIDEAN_COMPLEX:
        g = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        d_eff = 2 * d
    else:
        g = rng.standard_normal(d)
        d_eff = d
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return np.zeros(d, dtype=space.dtype)
    r = radius * rng.uniform() ** (1.0 / d_eff)
    return (r / g_norm) * g.astype(space.dtype)


def coverage_mc(planks, radius: float, samples: int, seed: int) -> CoverageReport:
    """Uniform-ball sampling against a plank family.

    Sample i draws from its own counter-derived stream, so the estimate
    does not depend on evaluation order.  Up to ten uncovered points are
    kept, lowest sample index first.
    """
    if not radius > 0:
        raise InvalidInputError("radius must be positive")
    if samples < 1:
        raise InvalidInputError("need at least one sample")
    if not planks:
        return CoverageReport(1.0, samples, radius, seed, 0, [])
    space = planks[0].direction.space
    for p in planks:
        if p.space != space:
            raise SpaceMismatchError("planks live in different spaces")
    dirs = np.stack([np.conj(p.direction.coords) for p in planks])
    centers = np.array(
        [np.vdot(p.direction.coords, p.offset.coords) for p in planks]
    )
    half = np.array([p.width / 2.0 for p in planks])
    uncovered = 0
    kept: list = []
    for i in range(samples):
        rng = rng_for(seed, i)
        v = _ball_point(space, radius, rng)
        proj = dirs @ v - centers
        if not bool(np.any(np.abs(proj) <= half)):
            uncovered += 1
            if len(kept) < 10:
                kept.append([float(c) for c in np.real(v)])
    return CoverageReport(
        uncovered_fraction=uncovered / samples,
        samples=samples,
        radius=radius,
        seed=seed,
        n_planks=len(planks),
        uncovered_points=kept,
    )


# ---------------------------------------------------------------------------
# witness search
# ---------------------------------------------------------------------------


@dataclass
class WitnessReport:
    """Best point found by the separation search, with honest margins."""

    witness: Vector
    margins: list
    min_margin: float
    witness_norm: float
    target_radius: float
    iterations: int
    seed: int
    budget: int
    success: bool
    target_margin: float
    restarts: int

    def __post_init__(self):
        if self.margins and abs(self.min_margin - min(self.margins)) > 1e-12:
            raise InvalidInputError("min margin must match the margin list")

    def to_json_obj(self) -> dict:
        from .spaces import vector_to_json_obj

        return {
            "witness": vector_to_json_obj(self.witness),
            "margins": [float(m) for m in self.margins],
            "min_margin": self.min_margin,
            "witness_norm": self.witness_norm,
            "target_radius": self.target_radius,
            "iterations": self.iterations,
            "seed": self.seed,
            "budget": self.budget,
            "success": self.success,
            "target_margin": self.target_margin,
            "restarts": self.restarts,
        }


def _softmin(m: np.ndarray, tau: float) -> float:
    return float(-tau * logsumexp(-m / tau))


def witness_search(
    xs,
    target_margin: float = 0.5,
    budget: int = 10_000,
    seed: int = 0,
    restarts: int = 32,
    epsilon: float = 0.1,
    delta: float = 0.2,
) -> WitnessReport:
    """Search for h with |<h, x_n>| strictly above the target for every n.

    Multi-start ascent on the smoothed minimum of the margins, temperature
    annealed from 1 to 0.01 over ten geometric stages with backtracking
    steps; iterates stay inside the ball of radius R + epsilon where
    R^2 = sum ||x_n||^(-2).  When the sequence is mutually orthogonal the
    first start is the coordinate-wise solution with pairings
    (1 + delta) * target_margin, which already separates.  The best point
    by true minimum margin is returned even on failure; success means the
    re-evaluated minimum margin is strictly positive.
    """
    if not xs:
        raise InvalidInputError("witness search needs a nonempty sequence")
    space = xs[0].space
    norms = []
    for x in xs:
        if x.space != space:
            raise SpaceMismatchError("sequence vectors live in different spaces")
        nx = norm(x)
        if nx == 0.0:
            raise InvalidInputError("zero vector admits no positive margin")
        norms.append(nx)
    norms = np.array(norms)
    X = np.stack([x.coords for x in xs])
    n, d = X.shape
    radius = math.sqrt(float(np.sum(norms**-2.0)))
    cap = radius + epsilon

    gram = X @ np.conj(X.T)
    off = np.abs(gram - np.diag(np.diag(gram)))
    orthogonal = bool(np.all(off <= 1e-8 * np.outer(norms, norms)))

    def evaluate(h):
        z = np.conj(X) @ h
        return z, np.abs(z) - target_margin

    best_h = None
    best_min = -math.inf
    total_evals = 0
    taus = np.geomspace(1.0, 0.01, 10)

    for r in range(restarts):
        if r == 0 and orthogonal:
            coeff = (1.0 + delta) * target_margin / norms**2.0
            h = X.T @ coeff.astype(X.dtype)
        else:
            rng = rng_for(seed, r)
            g = rng.standard_normal(d)
            if space.kind == EUCLIDEAN_COMPLEX:
                g = g + 1j * rng.standard_normal(d)
            h = (0.8 * cap / np.linalg.norm(g)) * g.astype(X.dtype)
        hn = float(np.linalg.norm(h))
        if hn > cap:
            h = h * (cap / hn)
        z, m = evaluate(h)
        evals = 1
        if float(np.min(m)) > best_min:
            best_min, best_h = float(np.min(m)), h.copy()
        for tau in taus:
            stage_cap = evals + max(1, budget // len(taus))
            stalls = 0
            while evals < min(stage_cap, budget) and stalls < 3:
                weights = np.exp((-m / tau) - np.max(-m / tau))
                weights /= np.sum(weights)
                absz = np.abs(z)
                phase = np.where(absz > 0, z / np.where(absz > 0, absz, 1.0), 1.0)
                direction = X.T @ (weights * phase).astype(X.dtype)
                gn = float(np.linalg.norm(direction))
                if gn < 1e-14:
                    break
                u = direction / gn
                step = 0.5 * max(target_margin, 1e-3)
                accepted = False
                phi_old = _softmin(m, tau)
                for _ in range(6):
                    cand = h + step * u
                    cn = float(np.linalg.norm(cand))
                    if cn > cap:
                        cand = cand * (cap / cn)
                    z2, m2 = evaluate(cand)
                    evals += 1
                    if float(np.min(m2)) > best_min:
                        best_min, best_h = float(np.min(m2)), cand.copy()
                    if _softmin(m2, tau) > phi_old + 1e-15:
                        h, z, m = cand, z2, m2
                        accepted = True
                        break
                    step *= 0.5
                    if evals >= budget:
                        break
                stalls = 0 if accepted else stalls + 1
                if evals >= budget:
                    break
            if evals >= budget:
                break
        total_evals += evals

    witness = Vector(space, best_h)
    _, final_margins = evaluate(best_h)
    margins = [float(v) for v in final_margins]
    return WitnessReport(
        witness=witness,
        margins=margins,
        min_margin=float(np.min(final_margins)),
        witness_norm=norm(witness),
        target_radius=cap,
        iterations=total_evals,
        seed=seed,
        budget=budget,
        success=bool(np.min(final_margins) > 0.0),
        target_margin=target_margin,
        restarts=restarts,
    )


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """Membership set {g : sum_{j<=k} |<g_j, x>|^2 <= t} with base radius
    sqrt(t)/||x||."""

    x: Vector
    k: int
    t: float = 1.0
    radius: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError("component count must be >= 1")
        if not self.t > 0:
            raise InvalidInputError("threshold must be positive")
        nx = norm(self.x)
        if nx == 0.0:
            raise InvalidInputError("defining vector must be nonzero")
        implied = math.sqrt(self.t) / nx
        if self.radius is None:
            object.__setattr__(self, "radius", implied)
        elif abs(self.radius - implied) > 1e-9:
            raise InvalidInputError(
                f"recorded radius {self.radius} disagrees with sqrt(t)/norm {implied}"
            )


def cylinder_contains(cyl: Cylinder, g: ProductVector) -> bool:
    """sum_j |<g_j, x>|^2 <= t, non-strict."""
    if len(g.components) != cyl.k:
        raise SpaceMismatchError(
            f"probe has {len(g.components)} components, cylinder expects {cyl.k}"
        )
    if g.space != cyl.x.space:
        raise SpaceMismatchError("probe and cylinder live in different spaces")
    return bool(product_pair_sq(g, cyl.x) <= cyl.t)


def separating_neighborhood(g: ProductVector, xs):
    """(min over n of sum_j |<g_j, x_n>|^2, 1-based argmin; first index on ties).

    g separates xs from the origin iff the minimum exceeds the threshold
    in use (1 by default in the demo)."""
    if not xs:
        raise InvalidInputError("need a nonempty sequence")
    values = np.array([product_pair_sq(g, x) for x in xs])
    idx = int(np.argmin(values))  # np.argmin takes the first minimum
    return float(values[idx]), idx + 1


@dataclass
class DemoReport:
    """Bounded cubed-radius budget versus full coverage of supported probes."""

    family: str
    horizon: int
    k: int
    t: float
    r3_partial_sum: float
    r3_tail_bound: float
    a2_partial_sum: float
    probes: list

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "horizon": self.horizon,
            "k": self.k,
            "t": self.t,
            "r3_partial_sum": self.r3_partial_sum,
            "r3_tail_bound": self.r3_tail_bound,
            "a2_partial_sum": self.a2_partial_sum,
            "probes": self.probes,
        }


def counterexample_demo(fam, n: int, probe_seeds) -> DemoReport:
    """Cylinders around x_m = a_m e_m swallow every probe supported in 1..n.

    Requires sum a_m^(-2) divergent but sum a_m^(-3) convergent (both
    certified analytically).  Cylinders C_m (k = 3, t = 1) are tested
    against seeded probes g with three unit components supported in
    coordinates 1..n; C_{n+1} contains every such probe because its
    defining vector is orthogonal to the probe support, and the same
    orthogonality keeps min_m sum_j |<g_j, x_m>|^2 at 0, so no probe
    separates the sequence.  Cubed base radii are reported with their
    analytic tail bound; squared inverse norms keep growing with n.
    """
    if n < 1:
        raise InvalidInputError("horizon must be >= 1")
    if not fam.diverges(2.0):
        raise PreconditionError(
            "demo requires sum a_m^(-2) to diverge (analytic certificate)"
        )
    if fam.diverges(3.0):
        raise PreconditionError(
            "demo requires sum a_m^(-3) to converge (analytic certificate)"
        )
    horizon = n + 1
    a = fam.values_upto(horizon)
    r3 = ordered_sum(a**-3.0)
    a2 = ordered_sum(a**-2.0)
    tail = fam.tail_bound(3.0, horizon)
    probes = []
    for probe_seed in probe_seeds:
        comps = np.empty((3, horizon))
        for j in range(3):
            g = rng_for(probe_seed, j).standard_normal(n)
            comps[j, :n] = g / np.linalg.norm(g)
            comps[j, n] = 0.0
        # <g_j, x_m> = a_m * g_j[m]; membership needs the squared sum <= t
        values = a**2.0 * np.sum(comps**2.0, axis=0)
        covered = np.flatnonzero(values <= 1.0) + 1
        min_idx = int(np.argmin(values))
        probes.append(
            {
                "seed": int(probe_seed),
                "covering_indices": [int(i) for i in covered[:10]],
                "covering_count": int(covered.size),
                "tail_covered": bool(values[horizon - 1] <= 1.0),
                "min_value": float(values[min_idx]),
                "min_index": min_idx + 1,
                "separates": bool(values[min_idx] > 1.0),
            }
        )
    return DemoReport(
        family=fam.descriptor(),
        horizon=n,
        k=3,
        t=1.0,
        r3_partial_sum=r3,
        r3_tail_bound=tail,
        a2_partial_sum=a2,
        probes=probes,
    )
