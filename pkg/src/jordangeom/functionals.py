"""Normal self-adjoint functionals represented by density elements.

A functional ``xi`` on an algebra of shape ``(n_1, ..., n_B)`` is stored as a
self-adjoint density ``D`` with ``xi(a) = sum_k Tr(D_k a_k)``. Positive
densities are the normal positive linear functionals; nothing is normalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from jordangeom.algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    hermitian_part,
    identity,
    is_positive,
    operator_norm,
)
from jordangeom.errors import NotPositiveError, NotSelfAdjointError, NumericalError

SUPPORT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Functional:
    density: AlgebraElement

    def __post_init__(self):
        d = self.density
        scale = max(1.0, operator_norm(d))
        if any(np.max(np.abs(m - m.conj().T), initial=0.0) > DEFAULT_TOL * scale for m in d.blocks):
            raise NotSelfAdjointError("functional density must be self-adjoint")
        object.__setattr__(self, "density", hermitian_part(d))

    @classmethod
    def from_matrix(cls, m) -> "Functional":
        return cls(AlgebraElement.from_matrix(m))

    @classmethod
    def from_blocks(cls, blocks) -> "Functional":
        return cls(AlgebraElement.from_blocks(blocks))

    @classmethod
    def from_weights(cls, weights) -> "Functional":
        """Measure on a finite sample space, as a functional on the Abelian algebra."""
        return cls(AlgebraElement.diagonal(np.asarray(weights, dtype=float)))

    @property
    def shape(self) -> AlgebraShape:
        return self.density.shape

    @property
    def blocks(self) -> tuple[np.ndarray, ...]:
        return self.density.blocks

    def __call__(self, a: AlgebraElement) -> complex:
        return evaluate(self, a)

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(self.density + other.density)

    def __sub__(self, other: "Functional") -> "Functional":
        return Functional(self.density - other.density)

    def __mul__(self, scalar: float) -> "Functional":
        return Functional(self.density * float(scalar))

    __rmul__ = __mul__

    def mass(self) -> float:
        """``xi(1)``; the norm of a positive functional."""
        return float(self.density.trace().real)

    def norm(self) -> float:
        """Dual (trace) norm."""
        return float(sum(np.abs(np.linalg.eigvalsh(m)).sum() for m in self.density.blocks))

    def normalized(self) -> "Functional":
        return Functional(self.density / self.mass())


def evaluate(xi: Functional, a: AlgebraElement) -> complex:
    xi.density._check(a)
    return complex(sum(np.sum(d.T * m) for d, m in zip(xi.density.blocks, a.blocks)))


def is_nplf(xi: Functional, tol: float = DEFAULT_TOL) -> bool:
    return is_positive(xi.density, tol)


def is_faithful(xi: Functional, tol: float = DEFAULT_TOL) -> bool:
    return all(np.linalg.eigvalsh(m)[0] > tol for m in xi.density.blocks)


def _require_nplf(omega: Functional, tol: float = DEFAULT_TOL):
    scale = max(1.0, operator_norm(omega.density))
    if not is_nplf(omega, tol * scale):
        raise NotPositiveError("base functional is not positive")


@dataclass(frozen=True, eq=False)
class SupportDecomposition:
    """Support projection ``p`` of a positive functional and ``q = 1 - p``.

    The per-block eigendecomposition of the density is kept so that callers
    (the Jordan lift in particular) do not repeat it.
    """

    p: AlgebraElement
    q: AlgebraElement
    ranks: tuple[int, ...]
    eigenvalues: tuple[np.ndarray, ...]
    eigenvectors: tuple[np.ndarray, ...]
    in_support: tuple[np.ndarray, ...]

    @property
    def shape(self) -> AlgebraShape:
        return self.p.shape

    @property
    def is_full(self) -> bool:
        return all(r == n for r, n in zip(self.ranks, self.shape.block_dims))


def support_projection(omega: Functional, tol: float = SUPPORT_TOL) -> SupportDecomposition:
    """Spectral projection onto the eigenvalues above ``tol * max eigenvalue``."""
    _require_nplf(omega)
    decomps = [np.linalg.eigh(m) for m in omega.density.blocks]
    lam_max = max(float(w[-1]) for w, _ in decomps)
    cut = tol * lam_max if lam_max > 0 else np.inf
    p_blocks, masks = [], []
    for w, v in decomps:
        mask = w > cut
        vs = v[:, mask]
        p_blocks.append(vs @ vs.conj().T)
        masks.append(mask)
    p = hermitian_part(AlgebraElement(omega.shape, tuple(p_blocks)))
    return SupportDecomposition(
        p=p,
        q=identity(omega.shape) - p,
        ranks=tuple(int(m.sum()) for m in masks),
        eigenvalues=tuple(w for w, _ in decomps),
        eigenvectors=tuple(v for _, v in decomps),
        in_support=tuple(masks),
    )


def block_decompose(a: AlgebraElement, dec: SupportDecomposition):
    """Return ``(pap, paq, qap, qaq)``; the four parts sum to ``a``."""
    p, q = dec.p, dec.q
    return p @ a @ p, p @ a @ q, q @ a @ p, q @ a @ q


def in_gelfand_ideal(a: AlgebraElement, omega: Functional, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``omega(a^dagger a)`` vanishes.

    Cross-checked against the block characterization ``a p = 0`` (the pp and
    qp corners vanish); disagreement means the input sits at the threshold.
    """
    by_value = evaluate(omega, a.H @ a).real <= tol
    dec = support_projection(omega)
    a_pp, _, a_qp, _ = block_decompose(a, dec)
    lam = [w[m] for w, m in zip(dec.eigenvalues, dec.in_support) if m.any()]
    lam_min = min((float(x.min()) for x in lam), default=1.0)
    block_tol = np.sqrt(tol / lam_min)
    by_blocks = operator_norm(a_pp) <= block_tol and operator_norm(a_qp) <= block_tol
    if by_value != by_blocks:
        raise NumericalError("Gel'fand ideal membership is ambiguous at this tolerance")
    return by_value


def is_absolutely_continuous(
    xi: Functional, omega: Functional, tol: float = DEFAULT_TOL, dec: SupportDecomposition | None = None
) -> bool:
    """Whether ``xi`` vanishes on every projection annihilated by ``omega``.

    In finite dimensions this is the vanishing of the qq corner of the density
    of ``xi``. The tolerance is relative to ``max(1, ||xi||)``.
    """
    return qq_norm(xi, omega, dec) <= tol * max(1.0, operator_norm(xi.density))


def qq_norm(xi: Functional, omega: Functional, dec: SupportDecomposition | None = None) -> float:
    dec = support_projection(omega) if dec is None else dec
    return operator_norm(dec.q @ xi.density @ dec.q)


def ac_dimension(omega: Functional, dec: SupportDecomposition | None = None) -> int:
    """Real dimension of AC_omega: ``sum_k n_k^2 - (n_k - r_k)^2``."""
    dec = support_projection(omega) if dec is None else dec
    return sum(n * n - (n - r) ** 2 for n, r in zip(omega.shape.block_dims, dec.ranks))
