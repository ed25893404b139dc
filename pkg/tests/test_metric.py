import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import I2, SX, SY, SZ, close, el
from jordangeom.algebra import AlgebraElement, AlgebraShape, identity, operator_norm, random_positive, random_self_adjoint
from jordangeom.errors import NotAbsolutelyContinuousError, NotFaithfulError, NotSelfAdjointError
from jordangeom.functionals import Functional, ac_dimension, block_decompose, support_projection
from jordangeom.metric import (
    TangentFunctional,
    distribution_dim,
    eta_from_element,
    gram_matrix,
    inner_product,
    jordan_lift,
    jordan_tensor,
    triple_tensor,
)

seeds = st.integers(0, 2**32 - 1)
shapes = st.sampled_from([(2,), (3,), (4,), (2, 1), (1, 1, 1), (3, 2)])
TRACIAL = Functional.from_matrix(I2 / 2)
PURE = Functional.from_matrix(np.diag([1.0, 0.0]))


def test_eta_examples(rng):
    assert close(eta_from_element(TRACIAL, el(SZ)).density, SZ / 2)
    assert close(eta_from_element(PURE, el(SX)).density, SX / 2)
    omega = Functional(random_positive(AlgebraShape.of(3), rng, [2]))
    assert close(eta_from_element(omega, identity(omega.shape)).density, omega.density, 1e-15)
    with pytest.raises(NotSelfAdjointError):
        eta_from_element(TRACIAL, el(1j * SX))


def test_lift_examples():
    assert close(jordan_lift(TRACIAL, Functional.from_matrix(SZ / 2)).a, SZ)
    lam1, lam2, eps = 0.7, 0.2, 0.3
    omega = Functional.from_matrix(np.diag([lam1, lam2]))
    a = jordan_lift(omega, Functional.from_matrix(eps * SX)).a
    assert close(a, 2 * eps / (lam1 + lam2) * SX, 1e-14)
    assert close(jordan_lift(PURE, Functional.from_matrix(SX)).a, 2 * SX)


def test_lift_rejects_tangent_leaving_the_cone():
    with pytest.raises(NotAbsolutelyContinuousError):
        jordan_lift(PURE, Functional.from_matrix(np.diag([0.0, 1.0])))
    with pytest.raises(NotAbsolutelyContinuousError):
        TangentFunctional.at(PURE, Functional.from_matrix(SZ))


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_round_trip_recovers_support_part(seed, dims):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape(dims)
    ranks = [int(rng.integers(0, n + 1)) for n in dims]
    ranks[0] = max(ranks[0], 1)
    omega = Functional(random_positive(shape, rng, ranks))
    a = random_self_adjoint(shape, rng)
    eta = eta_from_element(omega, a)
    lifted = jordan_lift(omega, eta).a
    _, _, _, a_qq = block_decompose(a, support_projection(omega))
    assert operator_norm(lifted - (a - a_qq)) < 1e-10
    _, _, _, l_qq = block_decompose(lifted, support_projection(omega))
    assert operator_norm(l_qq) < 1e-12
    assert operator_norm(eta_from_element(omega, lifted).density - eta.density) < 1e-10


def test_inner_product_examples(rng):
    eta = Functional.from_matrix(SZ / 2)
    assert abs(inner_product(TRACIAL, eta, eta) - 1.0) < 1e-15
    w = rng.uniform(0.1, 1, 4)
    omega = Functional.from_weights(w)
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    ea, eb = (eta_from_element(omega, AlgebraElement.diagonal(x)) for x in (a, b))
    assert abs(inner_product(omega, ea, eb) - np.sum(w * a * b)) < 1e-14
    ex, ey = eta_from_element(TRACIAL, el(SX)), eta_from_element(TRACIAL, el(SY))
    assert abs(inner_product(TRACIAL, ex, ey)) < 1e-15


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_inner_product_symmetric_and_positive(seed, dims):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape(dims)
    ranks = [int(rng.integers(1, n + 1)) for n in dims]
    omega = Functional(random_positive(shape, rng, ranks))
    a, b = random_self_adjoint(shape, rng), random_self_adjoint(shape, rng)
    ea, eb = eta_from_element(omega, a), eta_from_element(omega, b)
    assert abs(inner_product(omega, ea, eb) - inner_product(omega, eb, ea)) < 1e-10
    lifted = jordan_lift(omega, ea).a
    g = inner_product(omega, ea, ea)
    assert g > 0
    assert abs(g - omega(lifted @ lifted).real) < 1e-10
    gm = gram_matrix(omega, [ea, eb])
    assert np.linalg.eigvalsh(gm)[0] >= -1e-12


def test_jordan_tensor_examples(rng):
    assert jordan_tensor(Functional.from_matrix(SZ), el(SX), el(SX)) == 0
    omega = Functional(random_positive(AlgebraShape.of(3), rng))
    a, b = random_self_adjoint(omega.shape, rng), random_self_adjoint(omega.shape, rng)
    assert jordan_tensor(omega, a, a) >= 0
    assert abs(jordan_tensor(omega, identity(omega.shape), b) - omega(b).real) < 1e-14
    ea, eb = eta_from_element(omega, a), eta_from_element(omega, b)
    assert abs(jordan_tensor(omega, a, b) - inner_product(omega, ea, eb)) < 1e-12


def test_distribution_dim_examples():
    assert distribution_dim(TRACIAL) == 4
    assert distribution_dim(PURE) == 3
    assert distribution_dim(Functional.from_weights([0.5, 0.5, 0.0])) == 2
    # eigenvalues +1 and -1 cancel on the off-diagonal entries
    assert distribution_dim(Functional.from_matrix(SZ)) == 2


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_distribution_dim_matches_ac_dimension(seed, dims):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape(dims)
    ranks = [int(rng.integers(0, n + 1)) for n in dims]
    ranks[-1] = max(ranks[-1], 1)
    omega = Functional(random_positive(shape, rng, ranks))
    assert distribution_dim(omega) == ac_dimension(omega)


def test_triple_tensor_examples(rng):
    w = rng.uniform(0.1, 1, 5)
    omega = Functional.from_weights(w)
    xs = [rng.standard_normal(5) for _ in range(3)]
    etas = [eta_from_element(omega, AlgebraElement.diagonal(x)) for x in xs]
    assert abs(triple_tensor(omega, *etas) - np.sum(w * xs[0] * xs[1] * xs[2])) < 1e-12

    omega = Functional(random_positive(AlgebraShape.of(2), rng))
    ea, eb, ec = (eta_from_element(omega, random_self_adjoint(omega.shape, rng)) for _ in range(3))
    unit = eta_from_element(omega, identity(omega.shape))
    assert abs(triple_tensor(omega, unit, eb, ec) - inner_product(omega, eb, ec)) < 1e-12
    assert abs(triple_tensor(omega, ea, eb, ec) - triple_tensor(omega, ec, eb, ea)) < 1e-12


def test_triple_tensor_requires_faithful_base():
    eta = eta_from_element(PURE, el(SX))
    with pytest.raises(NotFaithfulError):
        triple_tensor(PURE, eta, eta, eta)
