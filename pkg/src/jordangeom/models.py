"""Parametric models of positive functionals and their pullback metric.

A model maps points of an open box in ``R^k`` to positive functionals. Its
metric at ``m`` is the Gram matrix of ``G_{j(m)}`` on the coordinate tangents,
defined whenever every tangent is absolutely continuous with respect to
``j(m)`` (J-regularity).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import expm, expm_frechet

from jordangeom.algebra import DEFAULT_TOL, AlgebraShape, operator_norm, sa_coordinates
from jordangeom.errors import DomainError, JRegularityError, NotPositiveError, NumericalError
from jordangeom.functionals import Functional, is_nplf, qq_norm, support_projection
from jordangeom.metric import gram_matrix

FD_STEP = 1e-5
IDENTIFIABILITY_TOL = 1e-8

PointMap = Callable[[np.ndarray], Functional]
TangentMap = Callable[[np.ndarray, np.ndarray], Functional]


@dataclass(frozen=True, eq=False)
class ParametricModel:
    shape: AlgebraShape
    param_dim: int
    lower: np.ndarray
    upper: np.ndarray
    point_map: PointMap
    tangent_map: Optional[TangentMap] = None
    name: str = "model"

    def __post_init__(self):
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.param_dim,)).copy()
        hi = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.param_dim,)).copy()
        if np.any(lo >= hi):
            raise ValueError("empty parameter box")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, m) -> bool:
        m = np.asarray(m, dtype=float)
        return m.shape == (self.param_dim,) and bool(np.all(m > self.lower) and np.all(m < self.upper))

    def _require_inside(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=float).reshape(-1)
        if m.shape != (self.param_dim,):
            raise DomainError(f"{self.name} takes {self.param_dim} parameters, got {m.shape[0]}")
        if not self.contains(m):
            raise DomainError(f"point {m.tolist()} is outside the open domain of {self.name}")
        return m

    def __call__(self, m) -> Functional:
        return self.point_map(self._require_inside(m))

    @property
    def has_analytic_tangents(self) -> bool:
        return self.tangent_map is not None


@dataclass(frozen=True)
class MetricMatrix:
    base: np.ndarray
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        return bool(np.abs(self.entries - self.entries.T).max(initial=0.0) <= tol)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0]) if self.dim else 0.0

    def is_psd(self, tol: float = DEFAULT_TOL) -> bool:
        return self.min_eigenvalue() >= -tol

    def upper(self) -> np.ndarray:
        """Upper triangle in row-major order: g_11, g_12, ..., g_1k, g_22, ..."""
        return self.entries[np.triu_indices(self.dim)]


# -- tangents ---------------------------------------------------------------

def _fd_step(m: np.ndarray, step: float | None) -> float:
    return (FD_STEP if step is None else step) * max(1.0, float(np.abs(m).max(initial=0.0)))


def tangent(
    model: ParametricModel,
    m,
    direction,
    method: str = "auto",
    step: float | None = None,
) -> Functional:
    """Differential of the point map at ``m`` along ``direction``.

    ``method`` is ``"analytic"``, ``"fd"`` or ``"auto"`` (analytic when the
    model provides it). Finite differences are central with one Richardson
    step, so the error is O(h^4).
    """
    m = model._require_inside(m)
    d = np.asarray(direction, dtype=float).reshape(-1)
    if d.shape != (model.param_dim,):
        raise ValueError(f"direction must have {model.param_dim} components")
    if method not in ("auto", "analytic", "fd"):
        raise ValueError(f"unknown tangent method {method!r}")
    if method == "analytic" and model.tangent_map is None:
        raise ValueError(f"{model.name} has no analytic tangent map")
    if method != "fd" and model.tangent_map is not None:
        return model.tangent_map(m, d)

    h = _fd_step(m, step)
    if not np.any(d):
        return Functional(model.point_map(m).density * 0.0)
    if np.all(m + h * d == m):
        raise NumericalError("finite-difference step underflows at this point")
    for s in (h, -h):
        if not model.contains(m + s * d):
            raise DomainError(f"finite-difference stencil leaves the domain at {m.tolist()}")

    def central(hh):
        plus = model.point_map(m + hh * d).density
        minus = model.point_map(m - hh * d).density
        return (plus - minus) / (2.0 * hh)

    coarse, fine = central(h), central(0.5 * h)
    return Functional((4.0 * fine - coarse) / 3.0)


def coordinate_tangents(model: ParametricModel, m, method: str = "auto", step: float | None = None):
    eye = np.eye(model.param_dim)
    return [tangent(model, m, eye[i], method, step) for i in range(model.param_dim)]


# -- pointwise checks ---------------------------------------------------------

def is_locally_identifiable(
    model: ParametricModel, m, tol: float = IDENTIFIABILITY_TOL, method: str = "auto"
) -> bool:
    """Coordinate tangents are linearly independent (numerical rank = k)."""
    point = model(m)
    tangents = coordinate_tangents(model, m, method)
    jac = np.array([sa_coordinates(t.density) for t in tangents]).T
    s = np.linalg.svd(jac, compute_uv=False)
    scale = max(1.0, operator_norm(point.density))
    return int((s > tol * scale).sum()) == model.param_dim


def _irregular_direction(point: Functional, tangents, tol, dec):
    for i, t in enumerate(tangents):
        qn = qq_norm(t, point, dec)
        if qn > tol * max(1.0, operator_norm(t.density)):
            return i, qn
    return None


def check_j_regular(model: ParametricModel, m, tol: float = DEFAULT_TOL, method: str = "auto") -> bool:
    point = model(m)
    dec = support_projection(point)
    return _irregular_direction(point, coordinate_tangents(model, m, method), tol, dec) is None


def pullback_metric(
    point: Functional,
    tangents: Sequence[Functional],
    base=None,
    tol: float = DEFAULT_TOL,
) -> MetricMatrix:
    """Gram matrix of ``G_point`` on explicit tangents, after the J-regularity check."""
    base = np.zeros(len(tangents)) if base is None else np.asarray(base, dtype=float)
    if not is_nplf(point, tol * max(1.0, operator_norm(point.density))):
        raise NotPositiveError(f"model value at {base.tolist()} is not positive")
    dec = support_projection(point)
    bad = _irregular_direction(point, tangents, tol, dec)
    if bad is not None:
        i, qn = bad
        raise JRegularityError(
            f"tangent along coordinate {i + 1} at {base.tolist()} has qq norm {qn:.3e}",
            point=base,
            direction=i,
            qq_norm=qn,
        )
    g = gram_matrix(point, tangents, tol, dec)
    if not np.all(np.isfinite(g)):
        raise NumericalError(f"non-finite metric at {base.tolist()}")
    return MetricMatrix(base, g)


def metric_tensor(
    model: ParametricModel,
    m,
    method: str = "auto",
    step: float | None = None,
    tol: float = DEFAULT_TOL,
) -> MetricMatrix:
    m = model._require_inside(m)
    return pullback_metric(model.point_map(m), coordinate_tangents(model, m, method, step), m, tol)


def evaluate_grid(
    model: ParametricModel,
    points: Sequence[np.ndarray],
    method: str = "auto",
    step: float | None = None,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> list[MetricMatrix]:
    """Metric at every point, in input order regardless of ``jobs``."""

    def one(p):
        return metric_tensor(model, p, method, step, tol)

    if jobs <= 1:
        return [one(p) for p in points]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, points))


# -- model zoo ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassicalModel(ParametricModel):
    """Model of positive measures on a finite sample space.

    Keeps the raw weight map and its Jacobian so that closed-form checks can
    be computed without going through the Jordan machinery.
    """

    weights: Optional[Callable[[np.ndarray], np.ndarray]] = None
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def n_outcomes(self) -> int:
        return self.shape.num_blocks


def make_classical_model(
    weights: Callable[[np.ndarray], np.ndarray],
    param_dim: int,
    n_outcomes: int,
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
    lower=-np.inf,
    upper=np.inf,
    name: str = "classical",
) -> ClassicalModel:
    """Model of positive measures on ``n_outcomes`` points.

    ``weights(m)`` returns the outcome weights, ``jacobian(m)`` (optional) the
    ``n_outcomes x param_dim`` matrix of their partial derivatives.
    """

    def point_map(m):
        w = np.asarray(weights(m), dtype=float)
        if w.shape != (n_outcomes,):
            raise ValueError(f"weights must have {n_outcomes} entries")
        return Functional.from_weights(w)

    tangent_map = None
    if jacobian is not None:

        def tangent_map(m, d):
            return Functional.from_weights(np.asarray(jacobian(m), dtype=float) @ d)

    return ClassicalModel(
        AlgebraShape.abelian(n_outcomes),
        param_dim,
        lower,
        upper,
        point_map,
        tangent_map,
        name,
        weights=weights,
        jacobian=jacobian,
    )


def make_simplex_model(n_outcomes: int) -> ClassicalModel:
    """``j(m) = diag(m)`` on the open positive orthant."""
    return make_classical_model(
        lambda m: m,
        n_outcomes,
        n_outcomes,
        jacobian=lambda m: np.eye(n_outcomes),
        lower=0.0,
        upper=np.inf,
        name=f"simplex{n_outcomes}",
    )


def make_exponential_family_model(features, base_weights=None) -> ClassicalModel:
    """Unnormalized exponential family ``w_x(m) = b_x exp(sum_j m_j f_j(x))``.

    ``features`` is the ``n_outcomes x k`` table of ``f_j(x)``.
    """
    f = np.atleast_2d(np.asarray(features, dtype=float))
    n, k = f.shape
    b = np.ones(n) if base_weights is None else np.asarray(base_weights, dtype=float)
    if b.shape != (n,) or np.any(b <= 0):
        raise ValueError("base weights must be strictly positive, one per outcome")

    def weights(m):
        return b * np.exp(f @ m)

    def jacobian(m):
        return weights(m)[:, None] * f

    return make_classical_model(weights, k, n, jacobian, name=f"expfam{n}x{k}")


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# cube inscribed in the unit Bloch ball, so every point of the box is a faithful state
BLOCH_HALF_WIDTH = 1.0 / np.sqrt(3.0)


def make_bloch_model() -> ParametricModel:
    """``j(r) = (1 + r . sigma) / 2`` on the cube ``|r_i| < 1/sqrt3``."""

    def point_map(r):
        return Functional.from_matrix(0.5 * (np.eye(2) + sum(x * s for x, s in zip(r, PAULI))))

    def tangent_map(r, d):
        return Functional.from_matrix(0.5 * sum(x * s for x, s in zip(d, PAULI)))

    return ParametricModel(
        AlgebraShape((2,)), 3, -BLOCH_HALF_WIDTH, BLOCH_HALF_WIDTH, point_map, tangent_map, "bloch"
    )


def _combine(generators, coeffs) -> np.ndarray:
    out = np.zeros_like(generators[0])
    for c, h in zip(coeffs, generators):
        out = out + c * h
    return out


def _state(phi, generators, m) -> np.ndarray:
    return expm(1j * _combine(generators, m)) @ phi


def _vector_tangent(phi, generators, m, direction) -> np.ndarray:
    _, dexp = expm_frechet(1j * _combine(generators, m), 1j * _combine(generators, direction))
    return dexp @ phi


def _rank_one_tangent(psi: np.ndarray, v: np.ndarray) -> Functional:
    return Functional.from_matrix(np.outer(v, psi.conj()) + np.outer(psi, v.conj()))


@dataclass(frozen=True, eq=False)
class RankOneUnitaryModel(ParametricModel):
    """``m -> |U(m) phi><U(m) phi|`` with ``U(m) = exp(i sum_j m_j H_j)``."""

    phi: np.ndarray = field(default=None)
    generators: tuple[np.ndarray, ...] = field(default=())

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.phi, self.phi).real)

    def unitary(self, m) -> np.ndarray:
        return expm(1j * _combine(self.generators, m))

    def state_vector(self, m) -> np.ndarray:
        return _state(self.phi, self.generators, m)

    def vector_tangent(self, m, direction) -> np.ndarray:
        """Derivative of ``U(m) phi`` along ``direction`` (Frechet derivative of expm)."""
        return _vector_tangent(self.phi, self.generators, m, direction)

    def identity_vectors(self) -> list[np.ndarray]:
        """Tangent vectors ``i H_j phi`` at the group identity."""
        return [1j * h @ self.phi for h in self.generators]

    def left_invariant_vectors(self, m) -> list[np.ndarray]:
        """``U(m) i H_j phi``: left translates of the identity tangents."""
        u = self.unitary(m)
        return [u @ v for v in self.identity_vectors()]

    def left_invariant_tangents(self, m) -> list[Functional]:
        psi = self.state_vector(m)
        return [_rank_one_tangent(psi, v) for v in self.left_invariant_vectors(m)]


def make_rank_one_unitary_model(phi, generators) -> RankOneUnitaryModel:
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if not np.any(phi):
        raise ValueError("reference vector must be nonzero")
    gens = []
    for h in generators:
        h = np.asarray(h, dtype=complex)
        if h.shape != (phi.size, phi.size):
            raise ValueError(f"generator of shape {h.shape} does not act on C^{phi.size}")
        if np.abs(h - h.conj().T).max() > 1e-10 * max(1.0, np.abs(h).max()):
            raise ValueError("generators must be Hermitian")
        gens.append(0.5 * (h + h.conj().T))
    if not gens:
        raise ValueError("at least one generator is required")
    gens = tuple(gens)

    def point_map(m):
        psi = _state(phi, gens, m)
        return Functional.from_matrix(np.outer(psi, psi.conj()))

    def tangent_map(m, d):
        return _rank_one_tangent(_state(phi, gens, m), _vector_tangent(phi, gens, m, d))

    return RankOneUnitaryModel(
        AlgebraShape((phi.size,)),
        len(gens),
        -np.inf,
        np.inf,
        point_map,
        tangent_map,
        f"rank_one{phi.size}",
        phi=phi,
        generators=gens,
    )


def left_invariant_metric(model: RankOneUnitaryModel, m, tol: float = DEFAULT_TOL) -> MetricMatrix:
    """Metric on the left-invariant frame ``X_j(g) = g . (i H_j)``."""
    m = model._require_inside(m)
    return pullback_metric(model.point_map(m), model.left_invariant_tangents(m), m, tol)
