"""Finite-dimensional normed space models.

Four kinds of truncation model are supported: real and complex Euclidean
space, coordinate ``lp`` spaces (1 <= p < inf), and the sup-norm space.
Vectors and functionals are immutable numpy arrays tagged with the space
they live in; the pairing is the coordinate pairing, conjugate-linear in
the functional slot and linear in the vector slot.  Duality is exact in
finite dimension: the dual of lp(p) carries the conjugate-exponent norm,
the dual of the sup model carries the l1 norm.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SpaceMismatchError
from .seeding import rng_for

EUCLIDEAN_REAL = "euclidean-real"
EUCLIDEAN_COMPLEX = "euclidean-complex"
LP = "lp"
SUP = "sup"

_KINDS = (EUCLIDEAN_REAL, EUCLIDEAN_COMPLEX, LP, SUP)


@dataclass(frozen=True)
class Space:
    """A finite-dimensional normed space model.

    ``p`` is only meaningful for the ``lp`` kind and must be >= 1.
    """

    kind: str
    dim: int
    p: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown space kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidInputError("space dimension must be >= 1")
        if self.kind == LP:
            if self.p is None or not (self.p >= 1.0) or math.isinf(self.p):
                raise InvalidInputError("lp spaces need a finite exponent p >= 1")
        elif self.p is not None:
            raise InvalidInputError(f"kind {self.kind!r} takes no exponent")

    # -- constructors ---------------------------------------------------

    @classmethod
    def euclidean(cls, dim: int) -> "Space":
        return cls(EUCLIDEAN_REAL, dim)

    @classmethod
    def euclidean_complex(cls, dim: int) -> "Space":
        return cls(EUCLIDEAN_COMPLEX, dim)

    @classmethod
    def lp_space(cls, p: float, dim: int) -> "Space":
        return cls(LP, dim, float(p))

    @classmethod
    def sup_space(cls, dim: int) -> "Space":
        return cls(SUP, dim)

    # -- structure ------------------------------------------------------

    @property
    def is_complex(self) -> bool:
        return self.kind == EUCLIDEAN_COMPLEX

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    @property
    def dual_exponent(self) -> float:
        """Exponent of the dual coordinate norm (1 for the sup model)."""
        if self.kind == SUP:
            return 1.0
        if self.kind == LP:
            if self.p == 1.0:
                return math.inf
            return self.p / (self.p - 1.0)
        return 2.0

    # -- descriptors ----------------------------------------------------

    def descriptor(self) -> str:
        """``kind:param:dimension`` string, empty param when not applicable."""
        param = format(self.p, ".17g") if self.kind == LP else ""
        return f"{self.kind}:{param}:{self.dim}"

    @classmethod
    def from_descriptor(cls, text: str) -> "Space":
        parts = text.strip().split(":")
        if len(parts) == 2:  # shorthand without the param slot
            parts = [parts[0], "", parts[1]]
        if len(parts) != 3:
            raise InvalidInputError(f"bad space descriptor {text!r}")
        kind, param, dim_s = parts
        try:
            dim = int(dim_s)
        except ValueError as exc:
            raise InvalidInputError(f"bad dimension in descriptor {text!r}") from exc
        if kind == LP:
            if not param:
                raise InvalidInputError(f"lp descriptor needs an exponent: {text!r}")
            return cls(LP, dim, float(param))
        if param:
            raise InvalidInputError(f"kind {kind!r} takes no parameter: {text!r}")
        return cls(kind, dim)

    # -- elements -------------------------------------------------------

    def vector(self, coords) -> "Vector":
        return Vector(self, coords)

    def functional(self, coords) -> "Functional":
        return Functional(self, coords)

    def basis_vector(self, m: int) -> "Vector":
        """m-th canonical unit vector, 1-based."""
        if not 1 <= m <= self.dim:
            raise InvalidInputError(f"basis index {m} outside 1..{self.dim}")
        e = np.zeros(self.dim, dtype=self.dtype)
        e[m - 1] = 1.0
        return Vector(self, e)

    def zero(self) -> "Vector":
        return Vector(self, np.zeros(self.dim, dtype=self.dtype))


# module-level constructor aliases
euclidean = Space.euclidean
euclidean_complex = Space.euclidean_complex
lp_space = Space.lp_space
sup_space = Space.sup_space


def _as_coords(space: Space, coords) -> np.ndarray:
    arr = np.asarray(coords)
    if space.is_complex:
        arr = arr.astype(np.complex128)
    else:
        if np.iscomplexobj(arr):
            raise InvalidInputError("complex coordinates in a real space")
        arr = arr.astype(np.float64)
    if arr.ndim != 1 or arr.shape[0] != space.dim:
        raise InvalidInputError(
            f"expected {space.dim} coordinates, got shape {arr.shape}"
        )
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Vector:
    """An element of a space model; coordinates are immutable."""

    space: Space
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_coords(self.space, self.coords))

    def scaled(self, c) -> "Vector":
        return type(self)(self.space, c * self.coords)


class Functional(Vector):
    """A dual element; same storage as a vector, measured in the dual norm."""


@dataclass(frozen=True, eq=False)
class ProductVector:
    """An element of the k-fold direct sum of one base space.

    The product norm is the square root of the summed squared component
    norms, matching an orthogonal direct sum.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 1:
            raise InvalidInputError("product vector needs at least one component")
        base = comps[0].space
        for c in comps[1:]:
            if c.space != base:
                raise SpaceMismatchError("product components live in different spaces")
        object.__setattr__(self, "components", comps)

    @property
    def space(self) -> Space:
        return self.components[0].space

    @property
    def k(self) -> int:
        return len(self.components)

    def norm(self) -> float:
        return math.sqrt(sum(norm(c) ** 2 for c in self.components))


# ---------------------------------------------------------------------------
# norms and pairings
# ---------------------------------------------------------------------------


def _coordinate_norm(x: np.ndarray, exponent: float) -> float:
    a = np.abs(x)
    if math.isinf(exponent):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a**exponent) ** (1.0 / exponent))


def norm(v: Vector) -> float:
    """Norm of ``v`` in its own space model."""
    kind = v.space.kind
    if kind in (EUCLIDEAN_REAL, EUCLIDEAN_COMPLEX):
        return float(np.linalg.norm(v.coords))
    if kind == SUP:
        return _coordinate_norm(v.coords, math.inf)
    return _coordinate_norm(v.coords, v.space.p)


def dual_norm(f: Functional) -> float:
    """Norm of ``f`` in the dual of its space model."""
    kind = f.space.kind
    if kind in (EUCLIDEAN_REAL, EUCLIDEAN_COMPLEX):
        return float(np.linalg.norm(f.coords))
    return _coordinate_norm(f.coords, f.space.dual_exponent)


def pair(f: Vector, v: Vector):
    """Coordinate pairing, conjugate-linear in the first (functional) slot.

    Returns a float in real models and a complex scalar in complex ones.
    """
    if f.space != v.space:
        raise SpaceMismatchError(
            f"pairing across spaces {f.space.descriptor()} and {v.space.descriptor()}"
        )
    out = np.vdot(f.coords, v.coords)
    return complex(out) if f.space.is_complex else float(out.real)


def product_pair_sq(g: ProductVector, x: Vector) -> float:
    """Sum of squared pairing moduli of the components of ``g`` against ``x``."""
    if g.space != x.space:
        raise SpaceMismatchError("product components and point live in different spaces")
    return float(sum(abs(pair(c, x)) ** 2 for c in g.components))


# ---------------------------------------------------------------------------
# seeded generation
# ---------------------------------------------------------------------------


def _gaussian(space: Space, rng: np.random.Generator) -> np.ndarray:
    if space.is_complex:
        return rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
    return rng.standard_normal(space.dim)


def random_unit(space: Space, seed: int) -> Vector:
    """Deterministic unit vector: Gaussian draw normalized in the model norm."""
    rng = rng_for(seed)
    z = _gaussian(space, rng)
    v = Vector(space, z)
    n = norm(v)
    while n == 0.0:  # essentially unreachable; continue the same stream
        z = _gaussian(space, rng)
        v = Vector(space, z)
        n = norm(v)
    return Vector(space, z / n)


def random_functional(space: Space, seed: int) -> Functional:
    """Deterministic dual element normalized in the dual norm."""
    rng = rng_for(seed)
    z = _gaussian(space, rng)
    f = Functional(space, z)
    n = dual_norm(f)
    while n == 0.0:
        z = _gaussian(space, rng)
        f = Functional(space, z)
        n = dual_norm(f)
    return Functional(space, z / n)


@dataclass(frozen=True, eq=False)
class Rotation:
    """Orthogonal (unitary in the complex case) map on a Euclidean model."""

    space: Space
    matrix: np.ndarray


def random_rotation(space: Space, seed: int) -> Rotation:
    """Seeded orthonormalization of a Gaussian matrix; Euclidean kinds only.

    Column phases are fixed so the result is unique, hence reproducible
    across BLAS builds up to rounding.
    """
    if space.kind not in (EUCLIDEAN_REAL, EUCLIDEAN_COMPLEX):
        raise InvalidInputError("rotations are defined on Euclidean models only")
    rng = rng_for(seed)
    a = _gaussian_matrix(space, rng)
    q, r = np.linalg.qr(a)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    q = q * (d / np.abs(d))
    q = np.ascontiguousarray(q)
    q.flags.writeable = False
    return Rotation(space, q)


def _gaussian_matrix(space: Space, rng: np.random.Generator) -> np.ndarray:
    d = space.dim
    if space.is_complex:
        return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return rng.standard_normal((d, d))


def apply_rotation(rot: Rotation, v: Vector) -> Vector:
    """Apply the map; functionals stay functionals, vectors stay vectors."""
    if rot.space != v.space:
        raise SpaceMismatchError("rotation and vector live in different spaces")
    return type(v)(v.space, rot.matrix @ v.coords)


def rotation_adjoint(rot: Rotation) -> Rotation:
    m = np.ascontiguousarray(rot.matrix.conj().T)
    m.flags.writeable = False
    return Rotation(rot.space, m)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def vector_to_json_obj(v: Vector) -> list:
    """JSON array form; complex entries become [re, im] pairs."""
    if v.space.is_complex:
        return [[float(z.real), float(z.imag)] for z in v.coords]
    return [float(x) for x in v.coords]


def vector_from_json_obj(space: Space, data) -> Vector:
    if space.is_complex:
        coords = np.array([complex(re, im) for re, im in data])
    else:
        coords = np.asarray(data, dtype=np.float64)
    return Vector(space, coords)


def write_vectors_csv(path, vectors) -> None:
    """One vector per row; complex coordinates as alternating re,im columns."""
    vectors = list(vectors)
    if not vectors:
        raise InvalidInputError("no vectors to write")
    is_complex = vectors[0].space.is_complex
    with open(path, "w", newline="") as fh:
        fh.write(f"complex={'true' if is_complex else 'false'}\n")
        writer = csv.writer(fh)
        for v in vectors:
            if is_complex:
                row = []
                for z in v.coords:
                    row.extend((format(z.real, ".17g"), format(z.imag, ".17g")))
            else:
                row = [format(x, ".17g") for x in v.coords]
            writer.writerow(row)


def read_vectors_csv(path, space: Space | None = None) -> list:
    """Read vectors written by :func:`write_vectors_csv`.

    Files without a ``complex=`` header line are treated as real.  When
    ``space`` is omitted, a Euclidean model of the observed dimension is
    assumed.
    """
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        is_complex = None
        rows = []
        if first.startswith("complex="):
            is_complex = first.split("=", 1)[1].strip().lower() == "true"
        elif first:
            rows.append(next(csv.reader([first])))
        for row in csv.reader(fh):
            if row:
                rows.append(row)
    if not rows:
        raise InvalidInputError(f"no vector rows in {path}")
    if is_complex is None:
        is_complex = False
    out = []
    for row in rows:
        vals = [float(x) for x in row]
        if is_complex:
            if len(vals) % 2:
                raise InvalidInputError("odd column count in complex vector file")
            coords = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
        else:
            coords = np.asarray(vals)
        if space is None:
            d = coords.shape[0]
            space = Space.euclidean_complex(d) if is_complex else Space.euclidean(d)
        out.append(Vector(space, coords))
    return out
