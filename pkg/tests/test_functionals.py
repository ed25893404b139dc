import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import I2, SX, SZ, close, el
from jordangeom.algebra import (
    AlgebraElement,
    AlgebraShape,
    adjoint,
    identity,
    multiply,
    operator_norm,
    random_element,
    random_positive,
    random_self_adjoint,
)
from jordangeom.errors import NotPositiveError, NotSelfAdjointError
from jordangeom.functionals import (
    Functional,
    ac_dimension,
    block_decompose,
    evaluate,
    in_gelfand_ideal,
    is_absolutely_continuous,
    is_faithful,
    is_nplf,
    support_projection,
)

seeds = st.integers(0, 2**32 - 1)
shapes = st.sampled_from([(2,), (3,), (2, 1), (1, 1, 1), (3, 2)])


def test_density_must_be_self_adjoint():
    with pytest.raises(NotSelfAdjointError):
        Functional.from_matrix([[0, 1], [0, 0]])


def test_evaluate_examples():
    assert evaluate(Functional.from_matrix(I2 / 2), el(SZ)) == 0
    xi = Functional.from_weights([0.3, 0.7])
    assert abs(evaluate(xi, AlgebraElement.diagonal([1, 2])) - 1.7) < 1e-15
    w = Functional.from_matrix([[0.6, 0.1j], [-0.1j, 0.4]])
    assert abs(w(identity(w.shape)) - w.norm()) < 1e-15


def test_positivity_and_faithfulness():
    half = Functional.from_matrix(np.diag([0.5, 0.5, 0.0]))
    assert is_nplf(half) and not is_faithful(half)
    tracial = Functional.from_matrix(I2 / 2)
    assert is_nplf(tracial) and is_faithful(tracial)
    assert not is_nplf(Functional.from_matrix(SZ))


def test_support_examples():
    dec = support_projection(Functional.from_matrix(np.diag([0.5, 0.5, 0.0])))
    assert close(dec.p, np.diag([1.0, 1.0, 0.0])) and dec.ranks == (2,)
    assert support_projection(Functional.from_matrix(I2 / 2)).is_full
    phi = np.array([1, 1j, -1]) / np.sqrt(3)
    dec = support_projection(Functional.from_matrix(np.outer(phi, phi.conj())))
    assert close(dec.p, np.outer(phi, phi.conj()), 1e-12)
    with pytest.raises(NotPositiveError):
        support_projection(Functional.from_matrix(SZ))


def test_support_is_scale_invariant(rng):
    omega = Functional(random_positive(AlgebraShape.of(3, 2), rng, [2, 1]))
    a, b = support_projection(omega), support_projection(omega * 1e-6)
    assert a.ranks == b.ranks and close(a.p, b.p, 1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_support_properties(seed, dims):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape(dims)
    ranks = [int(rng.integers(1, n + 1)) for n in dims]
    omega = Functional(random_positive(shape, rng, ranks))
    dec = support_projection(omega)
    assert list(dec.ranks) == ranks
    assert close(multiply(dec.p, dec.p), dec.p, 1e-12) and close(adjoint(dec.p), dec.p, 1e-12)
    assert abs(omega(dec.q)) <= sum(dims) * 1e-10 * omega.norm()
    a = random_element(shape, rng)
    assert abs(omega(a) - omega(dec.p @ a @ dec.p)) < 1e-10


def test_block_decompose_examples():
    dec = support_projection(Functional.from_matrix(np.diag([1.0, 0.0])))
    pp, pq, qp, qq = block_decompose(el(SX), dec)
    assert close(pq, [[0, 1], [0, 0]]) and close(qp, [[0, 0], [1, 0]])
    assert close(pp, np.zeros((2, 2))) and close(qq, np.zeros((2, 2)))
    pp, pq, qp, qq = block_decompose(dec.p, dec)
    assert close(pp, dec.p) and close(pq + qp + qq, np.zeros((2, 2)))
    full = support_projection(Functional.from_matrix(I2))
    a = el([[1, 2j], [-2j, 3]])
    pp, pq, qp, qq = block_decompose(a, full)
    assert close(pp, a) and operator_norm(pq) == operator_norm(qp) == operator_norm(qq) == 0


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_block_parts_sum_to_element(seed):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape.of(3, 2)
    dec = support_projection(Functional(random_positive(shape, rng, [1, 1])))
    a = random_element(shape, rng)
    parts = block_decompose(a, dec)
    assert close(parts[0] + parts[1] + parts[2] + parts[3], a, 1e-12)


def test_gelfand_ideal_examples(rng):
    omega = Functional.from_matrix(np.diag([1.0, 0.0]))
    assert in_gelfand_ideal(el([[0, 1], [0, 0]]), omega)
    assert not in_gelfand_ideal(el(SX), omega)
    faithful = Functional(random_positive(AlgebraShape.of(3), rng))
    assert not in_gelfand_ideal(random_element(AlgebraShape.of(3), rng), faithful)


def test_absolute_continuity_examples(rng):
    omega = Functional.from_matrix(np.diag([1.0, 0.0]))
    assert is_absolutely_continuous(Functional.from_matrix(SX), omega)
    assert not is_absolutely_continuous(Functional.from_matrix(np.diag([0.0, 1.0])), omega)
    faithful = Functional(random_positive(AlgebraShape.of(3), rng))
    assert is_absolutely_continuous(Functional(random_self_adjoint(AlgebraShape.of(3), rng)), faithful)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_ac_is_a_vector_space(seed):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape.of(3, 2)
    omega = Functional(random_positive(shape, rng, [1, 2]))
    dec = support_projection(omega)
    members = []
    for _ in range(3):
        x = random_self_adjoint(shape, rng)
        members.append(Functional(x - dec.q @ x @ dec.q))
    combo = members[0] * rng.normal() + members[1] * rng.normal() - members[2] * rng.normal()
    assert all(is_absolutely_continuous(m, omega, dec=dec) for m in members)
    assert is_absolutely_continuous(combo, omega, dec=dec)


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_cauchy_schwarz_and_norm_additivity(seed, dims):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape(dims)
    omega = Functional(random_positive(shape, rng, normalize=False))
    sigma = Functional(random_positive(shape, rng, normalize=False))
    a, b = random_element(shape, rng), random_element(shape, rng)
    lhs = abs(omega(adjoint(a) @ b)) ** 2
    assert lhs <= omega(adjoint(a) @ a).real * omega(adjoint(b) @ b).real + 1e-9
    assert abs((omega + sigma).norm() - (omega.mass() + sigma.mass())) < 1e-12


def test_ac_dimension_formula(rng):
    omega = Functional(random_positive(AlgebraShape.of(3, 2, 1), rng, [1, 2, 0]))
    assert ac_dimension(omega) == (9 - 4) + 4 + 0
