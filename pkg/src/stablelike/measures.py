"""Jump measures of stable type and their scalar functionals.

A stable-type jump measure factors into a finite measure on the unit
sphere (discrete atoms, or an isotropic mass) and the radial profile
r**(-1-alpha).  Everything downstream -- symbols, samplers, generators --
consumes these objects, so construction is strict about the invariants:
unit directions, nonnegative weights, and the centering requirement at
alpha = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import betaln, ndtri

from .errors import DivergentIntegralError, InvalidInputError, UndecidableError

_UNIT_TOL = 1e-12
_ALPHA1_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SphericalMeasure:
    """Finite measure on the unit sphere: weighted atoms or an isotropic mass.

    Continuous anisotropic measures are not represented; discretize them
    into atoms.  ``dim == 1`` uses the two-point sphere {-1, +1}.
    """

    dim: int
    atoms: Optional[tuple] = None            # (directions (k,d), weights (k,))
    isotropic_mass: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError(f"dim must be >= 1, got {self.dim}")
        if (self.atoms is None) == (self.isotropic_mass is None):
            raise InvalidInputError("exactly one of atoms / isotropic_mass required")
        if self.atoms is not None:
            dirs, w = self.atoms
            dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
            w = np.asarray(w, dtype=float).ravel()
            if dirs.shape[1] != self.dim:
                raise InvalidInputError(
                    f"atom directions have dim {dirs.shape[1]}, measure has dim {self.dim}")
            if dirs.shape[0] != w.shape[0]:
                raise InvalidInputError("number of directions != number of weights")
            norms = np.linalg.norm(dirs, axis=1)
            if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
                raise InvalidInputError("atom directions must be unit vectors (within 1e-12)")
            if np.any(w < 0):
                raise InvalidInputError("atom weights must be nonnegative")
            if w.sum() <= 0:
                raise InvalidInputError("total mass must be positive")
            object.__setattr__(self, "atoms", (dirs, w))
        else:
            if self.isotropic_mass <= 0:
                raise InvalidInputError("isotropic mass must be positive")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_atoms(cls, directions, weights) -> "SphericalMeasure":
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        return cls(dim=dirs.shape[1], atoms=(dirs, np.asarray(weights, dtype=float)))

    @classmethod
    def isotropic(cls, dim: int, mass: float) -> "SphericalMeasure":
        return cls(dim=dim, isotropic_mass=float(mass))

    @classmethod
    def axis_symmetric(cls, dim: int, weight: float = 1.0) -> "SphericalMeasure":
        """Atoms +-e_i with equal weights (the cylindrical configuration)."""
        eye = np.eye(dim)
        dirs = np.vstack([eye, -eye])
        return cls.from_atoms(dirs, np.full(2 * dim, float(weight)))

    # -- basic functionals --------------------------------------------

    @property
    def is_isotropic(self) -> bool:
        return self.isotropic_mass is not None

    def total_mass(self) -> float:
        if self.is_isotropic:
            return float(self.isotropic_mass)
        return float(self.atoms[1].sum())

    def mean_direction(self) -> np.ndarray:
        """The vector integral of theta over the measure."""
        if self.is_isotropic:
            return np.zeros(self.dim)
        dirs, w = self.atoms
        return dirs.T @ w

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        """True when the measure is invariant under theta -> -theta."""
        if self.is_isotropic:
            return True
        dirs, w = self.atoms
        for d, wi in zip(dirs, w):
            j = _find_direction(dirs, -d, tol=1e-9)
            if j is None or abs(w[j] - wi) > tol:
                return False
        return True

    def directional_integral(self, theta0: np.ndarray, alpha: float) -> float:
        """Integral of |theta0 . theta|**alpha over the measure (theta0 unit)."""
        theta0 = np.asarray(theta0, dtype=float)
        if self.is_isotropic:
            return self.isotropic_mass * _isotropic_angular_mean(self.dim, alpha)
        dirs, w = self.atoms
        return float(w @ np.abs(dirs @ theta0) ** alpha)

    def scaled(self, c: float) -> "SphericalMeasure":
        if c <= 0:
            raise InvalidInputError("scale must be positive")
        if self.is_isotropic:
            return SphericalMeasure.isotropic(self.dim, c * self.isotropic_mass)
        dirs, w = self.atoms
        return SphericalMeasure.from_atoms(dirs, c * w)

    def rotated(self, q: np.ndarray) -> "SphericalMeasure":
        if self.is_isotropic:
            return self
        dirs, w = self.atoms
        new_dirs = dirs @ np.asarray(q, dtype=float).T
        new_dirs /= np.linalg.norm(new_dirs, axis=1)[:, None]
        return SphericalMeasure.from_atoms(new_dirs, w)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        if self.is_isotropic:
            return {"dim": self.dim, "isotropic": self.isotropic_mass}
        dirs, w = self.atoms
        return {"dim": self.dim,
                "atoms": [[list(map(float, d)), float(wi)] for d, wi in zip(dirs, w)]}

    @classmethod
    def from_dict(cls, d: dict) -> "SphericalMeasure":
        if "isotropic" in d:
            return cls.isotropic(int(d["dim"]), float(d["isotropic"]))
        dirs = [a[0] for a in d["atoms"]]
        weights = [a[1] for a in d["atoms"]]
        return cls.from_atoms(np.asarray(dirs), np.asarray(weights))


@dataclass(frozen=True, eq=False)
class StableMeasure:
    """Pair (alpha, spherical measure): jump density r**(-1-alpha) radially.

    At alpha = 1 the spherical measure must be centered (vector mean zero);
    otherwise the compensated small-jump integral is ill defined.
    """

    alpha: float
    spherical: SphericalMeasure

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise InvalidInputError(f"alpha must lie in (0, 2), got {self.alpha}")
        if abs(self.alpha - 1.0) < 1e-14:
            resid = self.spherical.mean_direction()
            if np.linalg.norm(resid) > _ALPHA1_TOL:
                raise InvalidInputError(
                    "alpha = 1 requires a centered spherical measure; "
                    f"residual norm {np.linalg.norm(resid):.3e}")

    @property
    def dim(self) -> int:
        return self.spherical.dim

    def scaled(self, c: float) -> "StableMeasure":
        return StableMeasure(self.alpha, self.spherical.scaled(c))

    def to_dict(self) -> dict:
        d = self.spherical.to_dict()
        d["alpha"] = self.alpha
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StableMeasure":
        return cls(float(d["alpha"]), SphericalMeasure.from_dict(d))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "StableMeasure":
        return cls.from_dict(json.loads(s))


# ---------------------------------------------------------------------------
# scalar functionals


def _find_direction(dirs: np.ndarray, target: np.ndarray, tol: float = 1e-9):
    dist = np.linalg.norm(dirs - target[None, :], axis=1)
    j = int(np.argmin(dist))
    return j if dist[j] <= tol else None


@lru_cache(maxsize=256)
def _isotropic_angular_mean(dim: int, alpha: float) -> float:
    """Mean of |u . theta|**alpha over the uniform unit sphere (any unit u).

    For dim >= 2 the projection t = u.theta has density prop. to
    (1-t^2)^((d-3)/2), giving a beta-function ratio; dim == 1 gives 1.
    """
    if dim == 1:
        return 1.0
    return math.exp(betaln((alpha + 1) / 2, (dim - 1) / 2) - betaln(0.5, (dim - 1) / 2))


def _sphere_grid(dim: int) -> np.ndarray:
    """Deterministic quasi-uniform search grid on the unit sphere."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        phi = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
        return np.column_stack([np.cos(phi), np.sin(phi)])
    if dim == 3:
        n = 16384
        i = np.arange(n) + 0.5
        golden = (1 + 5 ** 0.5) / 2
        z = 1 - 2 * i / n
        phi = 2 * np.pi * i / golden
        r = np.sqrt(np.maximum(1 - z * z, 0.0))
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    # generalized golden-ratio lattice mapped through the normal quantile
    n = 16384
    g = _harmonious(dim)
    i = np.arange(1, n + 1)[:, None]
    u = np.mod(i * g[None, :], 1.0)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    pts = ndtri(u)
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def _harmonious(dim: int) -> np.ndarray:
    x = 2.0
    for _ in range(64):
        x = (1 + x) ** (1 / (dim + 1))
    return np.array([x ** -(j + 1) for j in range(dim)])


def nondegeneracy_constant(spherical: SphericalMeasure, alpha: float) -> float:
    """Infimum over unit theta0 of the directional integral |theta0.theta|^alpha.

    Strictly positive iff no direction is invisible to the measure.  Dense
    grid search followed by local refinement; for discrete measures in the
    plane the kink candidates (directions orthogonal to an atom) are
    evaluated exactly, since the infimum of a sum of |cos|^alpha terms sits
    at such a kink whenever it is degenerate or nearly so.
    """
    if not (0.0 < alpha < 2.0):
        raise InvalidInputError(f"alpha must lie in (0, 2), got {alpha}")
    if spherical.is_isotropic:
        return spherical.isotropic_mass * _isotropic_angular_mean(spherical.dim, alpha)

    dirs, w = spherical.atoms
    if dirs.shape[1] != spherical.dim:
        raise InvalidInputError("dimension mismatch between atoms and dim")

    def value(units: np.ndarray) -> np.ndarray:
        return np.abs(units @ dirs.T) ** alpha @ w

    if spherical.dim == 1:
        return float(w.sum())

    grid = _sphere_grid(spherical.dim)
    vals = value(grid)
    order = np.argsort(vals)
    candidates = [grid[j] for j in order[:4]]

    # exact kink candidates: directions orthogonal to each atom (planar case)
    if spherical.dim == 2:
        perp = np.column_stack([-dirs[:, 1], dirs[:, 0]])
        candidates.extend(perp)

    best = float(vals[order[0]])
    for c in candidates:
        best = min(best, float(value(c[None, :])[0]))
        res = minimize(
            lambda v: float(value((v / np.linalg.norm(v))[None, :])[0]),
            c, method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 400})
        if res.fun < best:
            best = float(res.fun)
    return max(best, 0.0)


def check_alpha1_symmetry(spherical: SphericalMeasure):
    """Residual vector of the sphere integral of theta, and whether it vanishes."""
    resid = spherical.mean_direction()
    return bool(np.linalg.norm(resid) <= _ALPHA1_TOL), resid


def truncated_moment(measure: StableMeasure, radius: float, power: float) -> float:
    """Integral of |y|**power over {|y| <= radius}, in closed form.

    Requires power > alpha for convergence at the origin.
    """
    if radius < 0:
        raise InvalidInputError("radius must be nonnegative")
    if power <= measure.alpha:
        raise DivergentIntegralError(
            f"power {power} <= alpha {measure.alpha}: integral diverges at 0")
    if radius == 0:
        return 0.0
    mass = measure.spherical.total_mass()
    return mass * radius ** (power - measure.alpha) / (power - measure.alpha)


def tail_mass(measure: StableMeasure, radius: float) -> float:
    """Total mass of {|y| > radius}; the compound-Poisson rate above radius."""
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    mass = measure.spherical.total_mass()
    return mass * radius ** (-measure.alpha) / measure.alpha


def dominates(nu1: StableMeasure, nu2: StableMeasure) -> bool:
    """True iff nu1 <= nu2 atomwise (sufficient condition for domination).

    Raises UndecidableError when the supports are incomparable in this
    representation; that is different from returning False.
    """
    if abs(nu1.alpha - nu2.alpha) > 1e-14:
        raise InvalidInputError("domination comparison requires equal alpha")
    s1, s2 = nu1.spherical, nu2.spherical
    if s1.dim != s2.dim:
        raise InvalidInputError("dimension mismatch")
    if s1.is_isotropic and s2.is_isotropic:
        return s1.isotropic_mass <= s2.isotropic_mass * (1 + 1e-15)
    if s1.is_isotropic or s2.is_isotropic:
        raise UndecidableError("cannot compare isotropic with atomic support")
    dirs1, w1 = s1.atoms
    dirs2, w2 = s2.atoms
    for d, wi in zip(dirs1, w1):
        if wi == 0:
            continue
        j = _find_direction(dirs2, d)
        if j is None:
            raise UndecidableError(f"atom {d} of the smaller measure missing in the larger")
        if wi > w2[j] * (1 + 1e-15):
            return False
    return True


# ---------------------------------------------------------------------------
# state-dependent model


def as_matrix_field(sigma) -> Callable:
    """Lift a constant matrix to a (t, x) -> matrix callback."""
    if callable(sigma):
        return sigma
    mat = np.asarray(sigma, dtype=float)
    return lambda t, x: mat


def as_vector_field(b) -> Optional[Callable]:
    if b is None:
        return None
    if callable(b):
        return b
    vec = np.asarray(b, dtype=float)
    return lambda t, x: vec


def as_scalar_field(m) -> Callable:
    if callable(m):
        return m
    val = float(m)
    return lambda t, x: val


@dataclass(frozen=True, eq=False)
class LowerOrderPart:
    """Subordinate jump part: beta-stable cap with beta < alpha of the model."""

    beta: float
    nu_bar: StableMeasure
    sigma_bar: Callable = field(default=None)
    b_bar: Optional[Callable] = None

    def __post_init__(self):
        if abs(self.nu_bar.alpha - self.beta) > 1e-14:
            raise InvalidInputError("nu_bar must carry the lower-order exponent beta")
        object.__setattr__(self, "sigma_bar",
                           as_matrix_field(self.sigma_bar if self.sigma_bar is not None
                                           else np.eye(self.nu_bar.dim)))
        object.__setattr__(self, "b_bar", as_vector_field(self.b_bar))


@dataclass(frozen=True, eq=False)
class LevyModel:
    """State-dependent jump model: nu_(t,x) = m(t,x) * base, plus sigma and drift.

    The scalar modulation keeps the two-sided domination
    m_min * base <= nu_(t,x) <= m_max * base checkable by construction.
    The drift is consulted only at alpha = 1; the lower-order drift only at
    alpha in (1, 2).
    """

    base: StableMeasure
    m_min: float = 1.0
    m_max: float = 1.0
    modulation: Callable = 1.0
    sigma: Callable = None
    drift: Optional[Callable] = None
    lower_order: Optional[LowerOrderPart] = None

    def __post_init__(self):
        if self.m_min <= 0:
            raise InvalidInputError("m_min must be positive")
        if self.m_max < self.m_min:
            raise InvalidInputError("m_max must be >= m_min")
        object.__setattr__(self, "modulation", as_scalar_field(self.modulation))
        object.__setattr__(self, "sigma",
                           as_matrix_field(self.sigma if self.sigma is not None
                                           else np.eye(self.base.dim)))
        object.__setattr__(self, "drift", as_vector_field(self.drift))
        if self.lower_order is not None:
            if self.lower_order.beta >= self.base.alpha:
                raise InvalidInputError("lower-order exponent must be < alpha")
        self.validate_on_probes()

    @property
    def alpha(self) -> float:
        return self.base.alpha

    @property
    def dim(self) -> int:
        return self.base.dim

    def measure_at(self, t: float, x: np.ndarray) -> StableMeasure:
        return self.base.scaled(self.modulation(t, np.asarray(x, dtype=float)))

    def default_probes(self, n: int = 64, box: float = 5.0):
        rng = np.random.Generator(np.random.Philox(key=(0xC0FFEE, 0)))
        xs = rng.uniform(-box, box, size=(n, self.dim))
        ts = np.array([0.0, 0.5, 1.0])
        return ts, xs

    def validate_on_probes(self, n: int = 64, box: float = 5.0):
        ts, xs = self.default_probes(n, box)
        for t in ts:
            for x in xs:
                m = self.modulation(t, x)
                if not (self.m_min - 1e-12 <= m <= self.m_max + 1e-12):
                    raise InvalidInputError(
                        f"modulation {m} outside [{self.m_min}, {self.m_max}] at x={x}")
                s = np.asarray(self.sigma(t, x), dtype=float)
                smin = np.linalg.svd(s, compute_uv=False)[-1]
                if smin <= 0:
                    raise InvalidInputError(f"sigma singular at t={t}, x={x}")

    def min_singular_value(self, t: float = 0.0, probes=None) -> float:
        if probes is None:
            _, probes = self.default_probes()
        return min(float(np.linalg.svd(np.asarray(self.sigma(t, x), dtype=float),
                                       compute_uv=False)[-1])
                   for x in probes)
