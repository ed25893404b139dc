"""Finite-dimensional W*-algebras as direct sums of full matrix blocks.

An algebra is described by an :class:`AlgebraShape` ``(n_1, ..., n_B)`` and its
elements are tuples of dense complex ``n_k x n_k`` matrices. The Abelian
algebra on ``N`` points is the shape ``(1,) * N`` and ``B(C^n)`` is ``(n,)``.

All products below act blockwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from jordangeom.errors import NotSelfAdjointError, ShapeMismatchError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class AlgebraShape:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if len(dims) == 0:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def of(cls, *dims: int) -> "AlgebraShape":
        return cls(tuple(dims))

    @classmethod
    def abelian(cls, n_points: int) -> "AlgebraShape":
        return cls((1,) * n_points)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra (= real dimension of its self-adjoint part)."""
        return sum(n * n for n in self.block_dims)

    @property
    def is_abelian(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    def __str__(self):
        return "+".join(f"M{n}" for n in self.block_dims)


def _freeze(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.complex128, copy=True)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    shape: AlgebraShape
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(_freeze(b) for b in self.blocks)
        if len(blocks) != self.shape.num_blocks:
            raise ShapeMismatchError(
                f"expected {self.shape.num_blocks} blocks, got {len(blocks)}"
            )
        for k, (b, n) in enumerate(zip(blocks, self.shape.block_dims)):
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block {k} has shape {b.shape}, expected {(n, n)}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, blocks: Sequence[np.ndarray]) -> "AlgebraElement":
        """Build an element, inferring the shape from the block sizes."""
        blocks = [np.atleast_2d(np.asarray(b, dtype=np.complex128)) for b in blocks]
        return cls(AlgebraShape(tuple(b.shape[0] for b in blocks)), tuple(blocks))

    @classmethod
    def from_matrix(cls, m) -> "AlgebraElement":
        return cls.from_blocks([m])

    @classmethod
    def diagonal(cls, values) -> "AlgebraElement":
        """Element of the Abelian algebra with the given pointwise values."""
        values = np.asarray(values, dtype=np.complex128).ravel()
        return cls(AlgebraShape.abelian(len(values)), tuple(v.reshape(1, 1) for v in values))

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatchError(f"shape {self.shape} vs {other.shape}")

    def _map(self, f) -> "AlgebraElement":
        return AlgebraElement(self.shape, tuple(f(b) for b in self.blocks))

    def _zip(self, other, f) -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, tuple(f(x, y) for x, y in zip(self.blocks, other.blocks)))

    def __add__(self, other):
        return self._zip(other, np.add)

    def __sub__(self, other):
        return self._zip(other, np.subtract)

    def __neg__(self):
        return self._map(np.negative)

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            raise TypeError("use @ or multiply() for the algebra product")
        return self._map(lambda b: b * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._map(lambda b: b / scalar)

    def __matmul__(self, other):
        return multiply(self, other)

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def to_dense(self) -> np.ndarray:
        """Block-diagonal dense matrix of size ``sum(n_k)``."""
        from scipy.linalg import block_diag

        return block_diag(*self.blocks)

    def __repr__(self):
        return f"AlgebraElement(shape={self.shape}, blocks={[b.tolist() for b in self.blocks]})"


def identity(shape: AlgebraShape) -> AlgebraElement:
    return AlgebraElement(shape, tuple(np.eye(n) for n in shape.block_dims))


def zeros(shape: AlgebraShape) -> AlgebraElement:
    return AlgebraElement(shape, tuple(np.zeros((n, n)) for n in shape.block_dims))


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a._zip(b, np.matmul)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return a._map(lambda m: m.conj().T)


def distance(a: AlgebraElement, b: AlgebraElement) -> float:
    """Operator-norm distance ``||a - b||``."""
    return operator_norm(a - b)


def operator_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(abs(m[0, 0]) if m.shape[0] == 1 else float(np.linalg.norm(m, 2)) for m in a.blocks)


def is_self_adjoint(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    return all(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol for m in a.blocks)


def hermitian_part(a: AlgebraElement) -> AlgebraElement:
    return a._map(lambda m: 0.5 * (m + m.conj().T))


def eigvalsh(a: AlgebraElement) -> list[np.ndarray]:
    """Eigenvalues of every block of the symmetrized element, ascending per block."""
    return [np.linalg.eigvalsh(0.5 * (m + m.conj().T)) for m in a.blocks]


def is_positive(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    if not is_self_adjoint(a, tol):
        return False
    return all(ev[0] >= -tol for ev in eigvalsh(a))


def require_self_adjoint(a: AlgebraElement, tol: float = DEFAULT_TOL, what: str = "element"):
    if not is_self_adjoint(a, tol):
        raise NotSelfAdjointError(f"{what} is not self-adjoint within {tol:g}")


def jordan_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Symmetrized product ``(ab + ba) / 2``."""
    return a._zip(b, lambda x, y: 0.5 * (x @ y + y @ x))


def lie_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Scaled commutator ``(ab - ba) / 2i``; self-adjoint for self-adjoint inputs."""
    return a._zip(b, lambda x, y: (x @ y - y @ x) / 2j)


def jordan_triple(a: AlgebraElement, b: AlgebraElement, c: AlgebraElement) -> AlgebraElement:
    """Canonical Jordan triple product ``{{a,b},c} + {a,{b,c}} - {b,{a,c}}``.

    Evaluated through nested Jordan products. The combination expands to
    ``(abc + cba) / 2`` and is symmetric under ``a <-> c``.
    """
    return (
        jordan_product(jordan_product(a, b), c)
        + jordan_product(a, jordan_product(b, c))
        - jordan_product(b, jordan_product(a, c))
    )


# -- conversions between self-adjoint elements and real coordinates ---------

def sa_basis(shape: AlgebraShape) -> list[AlgebraElement]:
    """Orthonormal (Hilbert-Schmidt) basis of the self-adjoint part.

    Per block of size n: the n diagonal units, then for i < j the symmetric
    ``(E_ij + E_ji)/sqrt2`` and antisymmetric ``i(E_ji - E_ij)/sqrt2`` units.
    """
    basis = []
    for k, n in enumerate(shape.block_dims):
        for m in block_sa_basis(n):
            blocks = [np.zeros((d, d), dtype=np.complex128) for d in shape.block_dims]
            blocks[k] = m
            basis.append(AlgebraElement(shape, tuple(blocks)))
    return basis


def block_sa_basis(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, i] = 1.0
        out.append(m)
    s = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = m[j, i] = s
            out.append(m)
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = -1j * s
            m[j, i] = 1j * s
            out.append(m)
    return out


def sa_coordinates(a: AlgebraElement) -> np.ndarray:
    """Real coordinates of the Hermitian part of ``a`` in :func:`sa_basis`."""
    out = []
    s = np.sqrt(2.0)
    for m in a.blocks:
        h = 0.5 * (m + m.conj().T)
        n = h.shape[0]
        out.extend(h[i, i].real for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                out.append(s * h[i, j].real)
                out.append(-s * h[i, j].imag)
    return np.asarray(out, dtype=float)


# -- random elements, used by tests, suites and the CLI ---------------------

def random_element(shape: AlgebraShape, rng: np.random.Generator) -> AlgebraElement:
    return AlgebraElement(
        shape,
        tuple(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in shape.block_dims),
    )


def random_self_adjoint(shape: AlgebraShape, rng: np.random.Generator) -> AlgebraElement:
    return hermitian_part(random_element(shape, rng))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase fix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_positive(
    shape: AlgebraShape,
    rng: np.random.Generator,
    ranks: Iterable[int] | None = None,
    normalize: bool = True,
) -> AlgebraElement:
    """Random positive element with prescribed rank per block.

    Nonzero eigenvalues are drawn from [0.1, 1) before normalization so the
    rank is numerically unambiguous.
    """
    ranks = list(shape.block_dims) if ranks is None else list(ranks)
    if len(ranks) != shape.num_blocks:
        raise ShapeMismatchError("one rank per block is required")
    blocks = []
    for n, r in zip(shape.block_dims, ranks):
        if not 0 <= r <= n:
            raise ValueError(f"rank {r} outside [0, {n}]")
        lam = np.zeros(n)
        lam[:r] = rng.uniform(0.1, 1.0, size=r)
        u = random_unitary(n, rng)
        blocks.append((u * lam) @ u.conj().T)
    el = hermitian_part(AlgebraElement(shape, tuple(blocks)))
    if normalize:
        tr = el.trace().real
        if tr > 0:
            el = el / tr
    return el


def as_shape(value) -> AlgebraShape:
    if isinstance(value, AlgebraShape):
        return value
    if isinstance(value, int):
        return AlgebraShape((value,))
    return AlgebraShape(tuple(value))
