import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import I2, SX, SY, SZ, close
from jordangeom.algebra import AlgebraElement, AlgebraShape
from jordangeom.errors import DomainError, JRegularityError
from jordangeom.functionals import Functional
from jordangeom.models import (
    ParametricModel,
    check_j_regular,
    evaluate_grid,
    is_locally_identifiable,
    left_invariant_metric,
    make_bloch_model,
    make_classical_model,
    make_exponential_family_model,
    make_rank_one_unitary_model,
    make_simplex_model,
    metric_tensor,
    tangent,
)

seeds = st.integers(0, 2**32 - 1)


def kernel_charging_model():
    """``m -> diag(1, m)``: at m = 0 the tangent lives on the kernel."""
    return ParametricModel(
        AlgebraShape.of(2),
        1,
        -1.0,
        1.0,
        lambda m: Functional.from_matrix(np.diag([1.0, m[0]])),
        lambda m, d: Functional.from_matrix(np.diag([0.0, d[0]])),
        "corner",
    )


def random_rank_one(rng, n, k, norm=None):
    phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if norm is not None:
        phi *= norm / np.linalg.norm(phi)
    gens = []
    for _ in range(k):
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        gens.append(z + z.conj().T)
    return make_rank_one_unitary_model(phi, gens)


def test_zoo_values():
    assert close(make_bloch_model()(np.zeros(3)).density, I2 / 2)
    r1 = make_rank_one_unitary_model([1, 0], [SX, SY, SZ])
    assert close(r1(np.zeros(3)).density, np.diag([1.0, 0.0]), 1e-15)
    expfam = make_exponential_family_model(np.arange(8.0).reshape(4, 2))
    assert close(expfam(np.zeros(2)).density, AlgebraElement.diagonal(np.ones(4)))
    assert np.allclose(expfam.weights(np.zeros(2)), np.ones(4))


def test_rank_one_constructor_validation():
    with pytest.raises(ValueError):
        make_rank_one_unitary_model([0, 0], [SX])
    with pytest.raises(ValueError):
        make_rank_one_unitary_model([1, 0], [SX + 1j * SZ])
    with pytest.raises(ValueError):
        make_rank_one_unitary_model([1, 0], [])


def test_tangent_examples(rng):
    bloch = make_bloch_model()
    r = np.array([0.1, -0.3, 0.2])
    for method in ("analytic", "fd"):
        assert close(tangent(bloch, r, [0, 0, 1], method).density, SZ / 2, 1e-9)
    simplex = make_simplex_model(3)
    assert close(tangent(simplex, [0.2, 0.5, 0.3], [1, 0, 0], "fd").density, AlgebraElement.diagonal([1.0, 0, 0]), 1e-9)

    model = make_rank_one_unitary_model([1, 0, 0], [np.array([[0, 1, 0], [1, 0, 1j], [0, -1j, 2]])])
    phi, h = model.phi, model.generators[0]
    v = 1j * h @ phi
    analytic = np.outer(v, phi.conj()) + np.outer(phi, v.conj())
    assert close(tangent(model, [0.0], [1.0], "fd").density, analytic, 1e-8)
    assert close(tangent(model, [0.0], [1.0], "analytic").density, analytic, 1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_tangent_is_linear_and_fd_matches_analytic(seed):
    rng = np.random.default_rng(seed)
    model = random_rank_one(rng, 3, 2)
    m = rng.uniform(-1, 1, 2)
    d1, d2 = rng.standard_normal(2), rng.standard_normal(2)
    t = lambda d, meth="analytic": tangent(model, m, d, meth).density
    assert close(t(2 * d1 - d2), 2 * t(d1) - t(d2), 1e-10)
    scale = max(1.0, np.abs(t(d1).blocks[0]).max())
    assert close(t(d1, "fd"), t(d1), 1e-6 * scale)


def test_domain_checks():
    simplex = make_simplex_model(3)
    with pytest.raises(DomainError):
        simplex([0.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        tangent(simplex, [1e-7, 1.0, 1.0], [1, 0, 0], "fd")
    with pytest.raises(DomainError):
        simplex([1.0, 1.0])


def test_identifiability_examples():
    simplex = make_simplex_model(3)
    assert is_locally_identifiable(simplex, [0.2, 0.5, 0.9])
    const = ParametricModel(
        AlgebraShape.of(2), 2, -1.0, 1.0, lambda m: Functional.from_matrix(I2 / 2), name="constant"
    )
    assert not is_locally_identifiable(const, [0.1, 0.2])
    phase = make_rank_one_unitary_model([1, 1j], [I2])
    assert not is_locally_identifiable(phase, [0.4])


def test_j_regularity_examples(rng):
    assert check_j_regular(make_bloch_model(), [0.2, 0.1, -0.3])
    model = random_rank_one(rng, 4, 3)
    assert check_j_regular(model, rng.uniform(-1, 1, 3))
    corner = kernel_charging_model()
    assert not check_j_regular(corner, [0.0])
    with pytest.raises(JRegularityError) as info:
        metric_tensor(corner, [0.0])
    assert info.value.direction == 0 and info.value.qq_norm == pytest.approx(1.0)


def test_metric_examples():
    assert np.allclose(metric_tensor(make_simplex_model(3), [1, 1, 1]).entries, np.eye(3), atol=1e-14)
    assert np.allclose(metric_tensor(make_simplex_model(3), [4, 1, 1]).entries, np.diag([0.25, 1, 1]), atol=1e-14)
    assert np.allclose(metric_tensor(make_bloch_model(), np.zeros(3)).entries, np.eye(3), atol=1e-14)
    # phi = e1, generator sigma_x: tangent vector i e2 is a unit vector orthogonal to phi
    r1 = make_rank_one_unitary_model([1, 0], [SX])
    assert metric_tensor(r1, [0.0]).entries[0, 0] == pytest.approx(4.0, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_metric_matrix_invariants(seed):
    rng = np.random.default_rng(seed)
    model = random_rank_one(rng, 3, 3)
    g = metric_tensor(model, rng.uniform(-1, 1, 3))
    assert g.is_symmetric(1e-10) and g.is_psd()
    assert (g.min_eigenvalue() > 1e-8) == is_locally_identifiable(model, g.base)


def test_metric_is_degenerate_when_not_identifiable():
    phase = make_rank_one_unitary_model([1, 0], [I2, SX])
    g = metric_tensor(phase, [0.3, 0.2])
    assert g.is_psd() and abs(g.min_eigenvalue()) < 1e-12


def test_classical_fd_and_analytic_agree(rng):
    model = make_classical_model(
        lambda m: np.array([m[0], m[0] * m[1], 1.0 + m[1] ** 2]),
        2,
        3,
        jacobian=lambda m: np.array([[1.0, 0.0], [m[1], m[0]], [0.0, 2 * m[1]]]),
        lower=0.1,
        upper=2.0,
    )
    m = [0.7, 1.3]
    a, f = metric_tensor(model, m, "analytic"), metric_tensor(model, m, "fd")
    assert np.abs(a.entries - f.entries).max() < 1e-8


def test_rank_one_trace_and_constraint(rng):
    model = random_rank_one(rng, 5, 3, norm=1.7)
    for _ in range(5):
        m = rng.uniform(-2, 2, 3)
        assert model(m).mass() == pytest.approx(1.7**2, rel=1e-12)
        psi = model.state_vector(m)
        v = model.vector_tangent(m, rng.standard_normal(3))
        assert abs(np.vdot(v, psi) + np.vdot(psi, v)) < 1e-10


def test_left_invariant_metric_is_constant(rng):
    model = random_rank_one(rng, 4, 3)
    g0 = left_invariant_metric(model, np.zeros(3)).entries
    for _ in range(5):
        g = left_invariant_metric(model, rng.uniform(-2, 2, 3)).entries
        assert np.abs(g - g0).max() < 1e-8


def test_grid_order_does_not_depend_on_workers():
    model = make_exponential_family_model(np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]))
    pts = [np.array([a, b]) for a in np.linspace(-1, 1, 5) for b in np.linspace(-1, 1, 4)]
    serial = evaluate_grid(model, pts)
    parallel = evaluate_grid(model, pts, jobs=4)
    assert all(np.array_equal(s.entries, p.entries) and np.array_equal(s.base, p.base) for s, p in zip(serial, parallel))
