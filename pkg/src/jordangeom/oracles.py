"""Brute-force reference computations for cross-checking the main modules.

These deliberately avoid the eigenbasis lift, the support decomposition and
the Gram-matrix assembly used elsewhere. Speed is not a goal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from jordangeom.algebra import AlgebraElement, hermitian_part
from jordangeom.errors import DomainError, NotFaithfulError, NumericalError
from jordangeom.functionals import Functional
from jordangeom.metric import LiftedElement
from jordangeom.models import ClassicalModel, MetricMatrix

ORACLE_RANK_TOL = 1e-10


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_abs_error: float
    sample_count: int
    tolerance: float
    passed: bool
    detail: str = ""

    @classmethod
    def from_errors(cls, name: str, errors, tolerance: float, detail: str = "") -> "OracleReport":
        errors = np.asarray(list(errors), dtype=float)
        worst = float(errors.max()) if errors.size else 0.0
        return cls(name, worst, int(errors.size), tolerance, bool(worst <= tolerance), detail)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} {self.name}: max_abs_error={self.max_abs_error:.3e} "
            f"tolerance={self.tolerance:.1e} samples={self.sample_count}"
        )
        return f"{text} ({self.detail})" if self.detail else text


# -- anticommutator equation by dense linear algebra -------------------------

def _real_embedding(z: np.ndarray) -> np.ndarray:
    return np.block([[z.real, -z.imag], [z.imag, z.real]])


def _solve_block(rho: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    # column-major vec: vec(rho a + a rho) = (I kron rho + rho^T kron I) vec(a)
    op = np.kron(np.eye(n), rho) + np.kron(rho.T, np.eye(n))
    b = rhs.reshape(-1, order="F")
    x = np.linalg.solve(_real_embedding(op), np.concatenate([b.real, b.imag]))
    return (x[: n * n] + 1j * x[n * n :]).reshape(n, n, order="F")


def lift_oracle(omega: Functional, eta) -> LiftedElement:
    """Solve ``rho a + a rho = 2 eta`` as one real linear system per block.

    Only defined for faithful ``omega``; otherwise the system is singular.
    """
    value = getattr(eta, "value", eta)
    blocks = []
    for rho, e in zip(omega.density.blocks, value.density.blocks):
        smin = np.linalg.svd(rho, compute_uv=False).min()
        if smin <= ORACLE_RANK_TOL * max(1.0, np.abs(rho).max()):
            raise NotFaithfulError("the dense lift solve needs a faithful base point")
        blocks.append(_solve_block(rho, 2.0 * e))
    return LiftedElement(hermitian_part(AlgebraElement(omega.shape, tuple(blocks))), omega)


def gram_oracle(omega: Functional, tangents) -> np.ndarray:
    """Metric on explicit tangents at a faithful point: ``Tr(eta_j a_i)`` by trace loop."""
    lifts = [lift_oracle(omega, t).a for t in tangents]
    values = [getattr(t, "value", t).density for t in tangents]
    k = len(tangents)
    g = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            g[i, j] = sum(np.trace(e @ a).real for e, a in zip(values[j].blocks, lifts[i].blocks))
    return g


_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bures_helstrom_oracle(r) -> MetricMatrix:
    """Metric of the Bloch model ``(1 + r.sigma)/2`` from the dense lift solve."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or r @ r >= 1.0:
        raise DomainError("Bloch vector must lie in the open unit ball")
    rho = Functional.from_matrix(0.5 * (np.eye(2) + sum(x * s for x, s in zip(r, _SIGMA))))
    tangents = [Functional.from_matrix(0.5 * s) for s in _SIGMA]
    return MetricMatrix(r, gram_oracle(rho, tangents))


# -- classical closed form ----------------------------------------------------

def fisher_rao_oracle(model: ClassicalModel, m) -> MetricMatrix:
    """``g_ij = sum_x d_i w_x d_j w_x / w_x`` from the model's own Jacobian."""
    if model.jacobian is None:
        raise ValueError("the Fisher-Rao oracle needs analytic weight derivatives")
    m = np.asarray(m, dtype=float)
    w = np.asarray(model.weights(m), dtype=float)
    if np.any(w <= 0):
        raise DomainError(f"zero or negative weight at {m.tolist()}")
    jac = np.asarray(model.jacobian(m), dtype=float)
    return MetricMatrix(m, jac.T @ (jac / w[:, None]))


# -- absolute continuity by enumerating kernel projections --------------------

def _kernel_basis(rho: np.ndarray, cut: float) -> np.ndarray:
    u, s, _ = np.linalg.svd(rho)
    return u[:, s <= cut]


def _kernel_probes(kernel: np.ndarray, rng, samples: int):
    d = kernel.shape[1]
    # diagonal and pairwise units span the Hermitian matrices on the kernel
    for i in range(d):
        yield kernel[:, i]
    for i in range(d):
        for j in range(i + 1, d):
            yield (kernel[:, i] + kernel[:, j]) / np.sqrt(2.0)
            yield (kernel[:, i] + 1j * kernel[:, j]) / np.sqrt(2.0)
    if rng is not None and d:
        for _ in range(samples):
            z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            yield kernel @ (z / np.linalg.norm(z))


def ac_enumeration_oracle(
    xi: Functional,
    omega: Functional,
    samples: int = 32,
    rng: np.random.Generator | None = None,
    tol: float = 1e-9,
    support_tol: float = 1e-10,
) -> bool:
    """Check ``xi(P) = 0`` for rank-one projections ``P`` annihilated by ``omega``."""
    scale_omega = max(np.linalg.svd(b, compute_uv=False).max() for b in omega.density.blocks)
    if scale_omega == 0.0:
        raise NumericalError("zero base functional has no support")
    cut = support_tol * scale_omega
    bound = tol * max(1.0, max(np.linalg.svd(b, compute_uv=False).max() for b in xi.density.blocks))
    for rho, x in zip(omega.density.blocks, xi.density.blocks):
        kernel = _kernel_basis(rho, cut)
        for v in _kernel_probes(kernel, rng, samples):
            if abs(np.vdot(v, x @ v)) > bound:
                return False
    return True


# -- pure states --------------------------------------------------------------

def fubini_study_gram(phi, vectors) -> np.ndarray:
    """``Re <v_perp | w_perp>`` with components along ``phi`` removed, for unit-normalized ``phi``."""
    phi = np.asarray(phi, dtype=complex)
    unit = phi / np.linalg.norm(phi)
    perp = [v - unit * np.vdot(unit, v) for v in vectors]
    return np.array([[np.vdot(v, w).real for w in perp] for v in perp])


def rank_one_closed_form(phi, vectors, imag_tol: float = 1e-8) -> np.ndarray:
    """``2 C (<X|Y> + <Y|X>) + 4 <X|phi><Y|phi>`` with ``C = <phi|phi>``.

    The second term must come out real; a complex value signals tangents that
    violate the normalization constraint and raises :class:`NumericalError`.
    """
    phi = np.asarray(phi, dtype=complex)
    c = np.vdot(phi, phi).real
    k = len(vectors)
    g = np.zeros((k, k), dtype=complex)
    for i, x in enumerate(vectors):
        for j, y in enumerate(vectors):
            g[i, j] = 2.0 * c * (np.vdot(x, y) + np.vdot(y, x)) + 4.0 * np.vdot(x, phi) * np.vdot(y, phi)
    scale = max(1.0, float(np.abs(g).max(initial=0.0)))
    if np.abs(g.imag).max(initial=0.0) > imag_tol * scale:
        raise NumericalError("closed-form rank-one metric has a non-real entry")
    return g.real
