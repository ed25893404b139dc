"""Jordan-product geometry at a positive functional.

Every ``eta`` absolutely continuous with respect to ``omega`` can be written as
``eta(b) = omega({a, b})`` for a self-adjoint ``a`` that is unique once its qq
corner (relative to the support of ``omega``) is set to zero. Finding ``a`` is
the Jordan lift; the inner product is then ``G(eta_1, eta_2) = eta_2(a_1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from jordangeom.algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    hermitian_part,
    jordan_product,
    jordan_triple,
    operator_norm,
    require_self_adjoint,
    sa_coordinates,
    block_sa_basis,
)
from jordangeom.errors import NotAbsolutelyContinuousError, NotFaithfulError
from jordangeom.functionals import (
    Functional,
    SupportDecomposition,
    evaluate,
    is_absolutely_continuous,
    qq_norm,
    support_projection,
)

# lift denominators lambda_i + lambda_j below this fraction of the largest
# eigenvalue are treated as zero
SINGULAR_TOL = 1e-12
RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TangentFunctional:
    """A self-adjoint functional ``value`` in AC of the positive functional ``base``."""

    base: Functional
    value: Functional

    @classmethod
    def at(
        cls,
        base: Functional,
        value: Functional,
        tol: float = DEFAULT_TOL,
        dec: SupportDecomposition | None = None,
    ) -> "TangentFunctional":
        """Validated constructor: rejects values that charge the kernel of ``base``."""
        dec = support_projection(base) if dec is None else dec
        if not is_absolutely_continuous(value, base, tol, dec):
            raise NotAbsolutelyContinuousError(
                f"tangent has qq block of norm {qq_norm(value, base, dec):.3e} outside the support"
            )
        return cls(base, value)

    @property
    def density(self) -> AlgebraElement:
        return self.value.density


@dataclass(frozen=True, eq=False)
class LiftedElement:
    """Self-adjoint representative ``a`` with vanishing qq corner."""

    a: AlgebraElement
    base: Functional


TangentLike = Union[TangentFunctional, Functional]


def _value(eta: TangentLike) -> Functional:
    return eta.value if isinstance(eta, TangentFunctional) else eta


def eta_from_element(omega: Functional, a: AlgebraElement, tol: float = DEFAULT_TOL) -> TangentFunctional:
    """Tangent ``b -> omega({a, b})``, whose density is ``(rho a + a rho) / 2``."""
    require_self_adjoint(a, tol * max(1.0, operator_norm(a)), "a")
    return TangentFunctional(omega, Functional(jordan_product(omega.density, a)))


def jordan_lift(
    omega: Functional,
    eta: TangentLike,
    tol: float = DEFAULT_TOL,
    dec: SupportDecomposition | None = None,
) -> LiftedElement:
    """Solve ``rho a + a rho = 2 eta`` in the eigenbasis of ``rho``.

    ``a_ij = 2 eta_ij / (lambda_i + lambda_j)`` off the qq corner and zero on
    it. Raises :class:`NotAbsolutelyContinuousError` when ``eta`` has a
    qq component, i.e. leaves the tangent cone at ``omega``.
    """
    dec = support_projection(omega) if dec is None else dec
    value = _value(eta)
    if not is_absolutely_continuous(value, omega, tol, dec):
        raise NotAbsolutelyContinuousError(
            f"tangent has qq block of norm {qq_norm(value, omega, dec):.3e} outside the support"
        )
    lam_max = max(float(w[-1]) for w in dec.eigenvalues)
    cut = SINGULAR_TOL * lam_max
    blocks = []
    for w, v, mask, e in zip(dec.eigenvalues, dec.eigenvectors, dec.in_support, value.density.blocks):
        e_eig = v.conj().T @ e @ v
        denom = w[:, None] + w[None, :]
        keep = (denom > cut) & (mask[:, None] | mask[None, :])
        a_eig = np.zeros_like(e_eig)
        a_eig[keep] = 2.0 * e_eig[keep] / denom[keep]
        blocks.append(v @ a_eig @ v.conj().T)
    return LiftedElement(hermitian_part(AlgebraElement(omega.shape, tuple(blocks))), omega)


def inner_product(
    omega: Functional,
    eta1: TangentLike,
    eta2: TangentLike,
    tol: float = DEFAULT_TOL,
    dec: SupportDecomposition | None = None,
) -> float:
    """``G_omega(eta1, eta2) = omega({a1, a2}) = eta2(a1)``."""
    dec = support_projection(omega) if dec is None else dec
    v2 = _value(eta2)
    if not is_absolutely_continuous(v2, omega, tol, dec):
        raise NotAbsolutelyContinuousError("second tangent is not absolutely continuous")
    a1 = jordan_lift(omega, eta1, tol, dec).a
    return float(evaluate(v2, a1).real)


def gram_matrix(
    omega: Functional,
    tangents: Sequence[TangentLike],
    tol: float = DEFAULT_TOL,
    dec: SupportDecomposition | None = None,
) -> np.ndarray:
    """Matrix of ``G_omega`` on a list of tangents, one lift per tangent."""
    dec = support_projection(omega) if dec is None else dec
    lifts = [jordan_lift(omega, t, tol, dec).a for t in tangents]
    values = [_value(t) for t in tangents]
    k = len(tangents)
    g = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            g[i, j] = evaluate(values[j], lifts[i]).real
    return 0.5 * (g + g.T)


def jordan_tensor(xi: Functional, a: AlgebraElement, b: AlgebraElement) -> float:
    """``R_xi(a, b) = xi({a, b})`` for any self-adjoint functional ``xi``."""
    return float(evaluate(xi, jordan_product(a, b)).real)


def anticommutator_matrix(xi: Functional) -> list[np.ndarray]:
    """Per block, the real matrix of ``a -> (xi a + a xi)/2`` on self-adjoint coordinates."""
    mats = []
    for d in xi.density.blocks:
        n = d.shape[0]
        cols = []
        for e in block_sa_basis(n):
            out = AlgebraElement.from_matrix(0.5 * (d @ e + e @ d))
            cols.append(sa_coordinates(out))
        mats.append(np.array(cols).T)
    return mats


def distribution_dim(xi: Functional, tol: float = RANK_TOL) -> int:
    """Dimension of the canonical distribution of the Jordan tensor at ``xi``.

    Rank of the anticommutator map on the self-adjoint part, counting singular
    values above ``tol`` times the largest one.
    """
    svals = [np.linalg.svd(m, compute_uv=False) for m in anticommutator_matrix(xi)]
    s_max = max(float(s.max()) for s in svals)
    if s_max == 0.0:
        return 0
    return int(sum((s > tol * s_max).sum() for s in svals))


def triple_tensor(
    omega: Functional,
    eta_a: TangentLike,
    eta_b: TangentLike,
    eta_c: TangentLike,
    tol: float = DEFAULT_TOL,
) -> float:
    """``T_omega(eta_a, eta_b, eta_c) = omega({a, b, c})``; faithful ``omega`` only."""
    dec = support_projection(omega)
    if not dec.is_full:
        raise NotFaithfulError("the triple tensor is only defined at faithful functionals")
    a, b, c = (jordan_lift(omega, e, tol, dec).a for e in (eta_a, eta_b, eta_c))
    return float(evaluate(omega, jordan_triple(a, b, c)).real)
