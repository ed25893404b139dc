"""Completely positive unital maps in Kraus form and their predual action.

A map ``Phi: A -> B`` is stored block by block: for block ``k`` a family of
``n_k x m_k`` matrices ``K_i`` with ``Phi(a)_k = sum_i K_i^dagger a_k K_i``.
Unitality is ``sum_i K_i^dagger K_i = 1``. The dual sends a density ``w`` on
``B`` to ``sum_i K_i w K_i^dagger`` on ``A`` and preserves the trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from jordangeom.algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    hermitian_part,
    random_unitary,
)
from jordangeom.errors import NotAbsolutelyContinuousError, NotUnitalError, ShapeMismatchError
from jordangeom.functionals import Functional, is_absolutely_continuous, qq_norm, support_projection
from jordangeom.metric import TangentFunctional, inner_product

UNITAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausMap:
    domain_shape: AlgebraShape
    codomain_shape: AlgebraShape
    kraus: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        if self.domain_shape.num_blocks != self.codomain_shape.num_blocks:
            raise ShapeMismatchError("only block-diagonal Kraus families are supported")
        if len(self.kraus) != self.domain_shape.num_blocks:
            raise ShapeMismatchError("need one Kraus family per block")
        frozen = []
        for k, (family, n, m) in enumerate(
            zip(self.kraus, self.domain_shape.block_dims, self.codomain_shape.block_dims)
        ):
            ops = tuple(np.array(K, dtype=np.complex128) for K in family)
            if not ops:
                raise NotUnitalError(f"block {k} has an empty Kraus family")
            for K in ops:
                if K.shape != (n, m):
                    raise ShapeMismatchError(f"Kraus operator of shape {K.shape}, expected {(n, m)}")
                K.setflags(write=False)
            err = np.abs(sum(K.conj().T @ K for K in ops) - np.eye(m)).max()
            if err > UNITAL_TOL:
                raise NotUnitalError(f"block {k}: sum K^dagger K deviates from identity by {err:.2e}")
            frozen.append(ops)
        object.__setattr__(self, "kraus", tuple(frozen))

    @classmethod
    def from_operators(cls, operators: Sequence[np.ndarray]) -> "KrausMap":
        """Single-block map from a list of ``n x m`` Kraus operators."""
        ops = [np.atleast_2d(np.asarray(K, dtype=np.complex128)) for K in operators]
        if not ops:
            raise NotUnitalError("empty Kraus family")
        n, m = ops[0].shape
        return cls(AlgebraShape((n,)), AlgebraShape((m,)), (tuple(ops),))

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return apply(self, a)


def apply(phi: KrausMap, a: AlgebraElement) -> AlgebraElement:
    if a.shape != phi.domain_shape:
        raise ShapeMismatchError(f"map acts on {phi.domain_shape}, got {a.shape}")
    blocks = tuple(sum(K.conj().T @ x @ K for K in fam) for fam, x in zip(phi.kraus, a.blocks))
    return AlgebraElement(phi.codomain_shape, blocks)


def dual_apply(phi: KrausMap, omega: Functional) -> Functional:
    if omega.shape != phi.codomain_shape:
        raise ShapeMismatchError(f"dual acts on functionals of {phi.codomain_shape}, got {omega.shape}")
    blocks = tuple(sum(K @ w @ K.conj().T for K in fam) for fam, w in zip(phi.kraus, omega.blocks))
    return Functional(hermitian_part(AlgebraElement(phi.domain_shape, blocks)))


@dataclass(frozen=True)
class MonotonicityResult:
    lhs: float
    rhs: float
    holds: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.holds))


def check_monotonicity(
    phi: KrausMap,
    omega: Functional,
    eta: TangentFunctional | Functional,
    tol: float = DEFAULT_TOL,
) -> MonotonicityResult:
    """Compare ``G_rho(Phi* eta, Phi* eta)`` with ``G_omega(eta, eta)``, ``rho = Phi* omega``.

    Precondition failures (``eta`` or its image not absolutely continuous)
    raise :class:`NotAbsolutelyContinuousError`; only the inequality itself
    is reported through ``holds``.
    """
    value = eta.value if isinstance(eta, TangentFunctional) else eta
    dec_omega = support_projection(omega)
    if not is_absolutely_continuous(value, omega, tol, dec_omega):
        raise NotAbsolutelyContinuousError("eta is not absolutely continuous with respect to omega")
    rho = dual_apply(phi, omega)
    pushed = dual_apply(phi, value)
    dec_rho = support_projection(rho)
    if not is_absolutely_continuous(pushed, rho, tol, dec_rho):
        raise NotAbsolutelyContinuousError(
            f"pushed tangent charges the kernel of the pushed base point (qq norm "
            f"{qq_norm(pushed, rho, dec_rho):.2e})"
        )
    rhs = inner_product(omega, value, value, tol, dec_omega)
    lhs = inner_product(rho, pushed, pushed, tol, dec_rho)
    return MonotonicityResult(lhs, rhs, lhs <= rhs + tol)


# -- constructors ----------------------------------------------------------

def identity_map(shape: AlgebraShape) -> KrausMap:
    return KrausMap(shape, shape, tuple((np.eye(n),) for n in shape.block_dims))


def unitary_map(*unitaries: np.ndarray) -> KrausMap:
    """``a -> U^dagger a U`` blockwise; its dual is ``w -> U w U^dagger``."""
    shape = AlgebraShape(tuple(np.shape(u)[0] for u in unitaries))
    return KrausMap(shape, shape, tuple((np.asarray(u),) for u in unitaries))


def pinching(n: int) -> KrausMap:
    """Projection onto the diagonal of ``M_n``."""
    ops = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        ops.append(e)
    return KrausMap.from_operators(ops)


def pauli_depolarizing(lam: float) -> KrausMap:
    """Unital qubit map ``a -> (1 - lam) a + lam Tr(a) 1/2``, ``0 <= lam <= 4/3``."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    return KrausMap.from_operators(
        [np.sqrt(1 - 3 * lam / 4) * np.eye(2), np.sqrt(lam / 4) * sx, np.sqrt(lam / 4) * sy, np.sqrt(lam / 4) * sz]
    )


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry ``C^cols -> C^rows`` (requires ``rows >= cols``)."""
    if rows < cols:
        raise ValueError("an isometry needs rows >= cols")
    return random_unitary(rows, rng)[:, :cols]


def random_unital_map(
    domain_dim: int, codomain_dim: int, env_dim: int, rng: np.random.Generator
) -> KrausMap:
    """Unital CP map ``M_domain -> M_codomain`` with ``env_dim`` Kraus operators.

    Draws an isometry ``V: C^m -> C^n (x) C^e`` and slices it along the
    environment factor, so ``sum K^dagger K = V^dagger V = 1`` by construction.
    """
    n, m, e = domain_dim, codomain_dim, env_dim
    if n * e < m:
        raise ValueError(f"need domain_dim * env_dim >= codomain_dim, got {n}*{e} < {m}")
    v = random_isometry(n * e, m, rng).reshape(n, e, m)
    return KrausMap.from_operators([v[:, i, :] for i in range(e)])
