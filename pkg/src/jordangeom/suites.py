"""Randomized verification suites.

Each suite takes a seeded generator and a trial count and returns one or more
:class:`OracleReport` objects. The CLI ``verify`` verb and the acceptance tests
both run these.
"""

from __future__ import annotations

import itertools
import time
from typing import Callable, Sequence

import numpy as np

from jordangeom.algebra import (
    AlgebraElement,
    AlgebraShape,
    adjoint,
    eigvalsh,
    jordan_product,
    jordan_triple,
    lie_product,
    multiply,
    operator_norm,
    random_element,
    random_positive,
    random_self_adjoint,
    random_unitary,
)
from jordangeom.channels import (
    KrausMap,
    apply,
    check_monotonicity,
    dual_apply,
    pauli_depolarizing,
    pinching,
    random_unital_map,
    unitary_map,
)
from jordangeom.functionals import Functional, block_decompose, is_absolutely_continuous, support_projection
from jordangeom.metric import distribution_dim, eta_from_element, inner_product, jordan_lift, triple_tensor
from jordangeom.models import (
    BLOCH_HALF_WIDTH,
    evaluate_grid,
    left_invariant_metric,
    make_bloch_model,
    make_exponential_family_model,
    make_rank_one_unitary_model,
    metric_tensor,
)
from jordangeom.oracles import (
    OracleReport,
    ac_enumeration_oracle,
    bures_helstrom_oracle,
    fisher_rao_oracle,
    fubini_study_gram,
    lift_oracle,
    rank_one_closed_form,
)

Suite = Callable[..., list]

MIXED_SHAPES = (AlgebraShape.of(2, 1), AlgebraShape.of(1, 3), AlgebraShape.of(2, 2, 1), AlgebraShape.of(3, 1, 2))


def _shape_cycle(i: int) -> AlgebraShape:
    shapes = (AlgebraShape.of(2), AlgebraShape.of(3)) + MIXED_SHAPES
    return shapes[i % len(shapes)]


def _random_ranks(shape: AlgebraShape, rng, allow_zero_blocks: bool = True) -> list[int]:
    lo = 0 if allow_zero_blocks else 1
    ranks = [int(rng.integers(lo, n + 1)) for n in shape.block_dims]
    if not any(ranks):
        ranks[int(rng.integers(len(ranks)))] = 1
    return ranks


def _random_hermitian(n: int, rng) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


# -- algebraic identities -----------------------------------------------------

def jordan_lie_suite(rng, trials: int = 1000, tol: float = 1e-10) -> list[OracleReport]:
    compat, assoc, cstar = [], [], []
    for i in range(trials):
        shape = _shape_cycle(i)
        a, b, c = (random_self_adjoint(shape, rng) for _ in range(3))
        lhs = jordan_product(jordan_product(a, b), c) - jordan_product(a, jordan_product(b, c))
        rhs = lie_product(lie_product(a, c), b)
        compat.append(operator_norm(lhs - rhs))
        assoc.append(operator_norm(multiply(a, b) - (jordan_product(a, b) + 1j * lie_product(a, b))))
        z = random_element(shape, rng)
        cstar.append(abs(operator_norm(multiply(adjoint(z), z)) - operator_norm(z) ** 2))
    return [
        OracleReport.from_errors("jordan-lie-compatibility", compat, tol),
        OracleReport.from_errors("associative-reconstruction", assoc, tol),
        OracleReport.from_errors("c-star-identity", cstar, tol),
    ]


def triple_identity_suite(rng, trials: int = 1000, tol: float = 1e-10) -> list[OracleReport]:
    ident, outer = [], []
    for i in range(trials):
        shape = _shape_cycle(i)
        a, b, x, y, z = (random_self_adjoint(shape, rng) for _ in range(5))
        lhs = jordan_triple(a, b, jordan_triple(x, y, z))
        rhs = (
            jordan_triple(jordan_triple(a, b, x), y, z)
            - jordan_triple(x, jordan_triple(b, a, y), z)
            + jordan_triple(x, y, jordan_triple(a, b, z))
        )
        ident.append(operator_norm(lhs - rhs))
        outer.append(operator_norm(jordan_triple(a, b, x) - jordan_triple(x, b, a)))
    return [
        OracleReport.from_errors("triple-product-identity", ident, tol),
        OracleReport.from_errors("triple-outer-symmetry", outer, tol),
    ]


# -- channels -----------------------------------------------------------------

def _trial_map(i: int, n: int, m: int, rng) -> KrausMap:
    """Mostly random Stinespring-type maps, with a few structured ones mixed in."""
    kind = i % 10
    if n == m and kind == 7:
        return unitary_map(random_unitary(n, rng))
    if n == m and kind == 8:
        return pinching(n)
    if n == m == 2 and kind == 9:
        return pauli_depolarizing(float(rng.uniform(0.0, 4.0 / 3.0)))
    env = int(rng.integers(max(1, -(-m // n)), 5))
    return random_unital_map(n, m, env, rng)


def monotonicity_suite(
    rng,
    trials: int = 1000,
    tol: float = 1e-9,
    extra_maps: Sequence[KrausMap] = (),
) -> list[OracleReport]:
    excess, worst = [], ""
    maps = list(extra_maps)
    for i in range(trials):
        if maps and i % 5 == 0:
            phi = maps[(i // 5) % len(maps)]
            n, m = phi.domain_shape.block_dims[0], phi.codomain_shape.block_dims[0]
        else:
            n, m = (int(v) for v in rng.integers(2, 7, size=2))
            phi = _trial_map(i, n, m, rng)
        rank = int(rng.integers(1, m + 1))
        omega = Functional(random_positive(AlgebraShape.of(m), rng, [rank]))
        eta = eta_from_element(omega, random_self_adjoint(AlgebraShape.of(m), rng))
        res = check_monotonicity(phi, omega, eta, tol)
        gap = res.lhs - res.rhs
        if not excess or gap > max(excess):
            worst = f"worst lhs-rhs={gap:.2e} at domain={n} codomain={m} rank={rank}"
        excess.append(max(0.0, gap))
    return [OracleReport.from_errors("monotonicity", excess, tol, worst)]


def kadison_schwarz_suite(rng, trials: int = 200, tol: float = 1e-9) -> list[OracleReport]:
    deficits, trace_err = [], []
    for i in range(trials):
        n, m = (int(v) for v in rng.integers(2, 7, size=2))
        phi = _trial_map(i, n, m, rng)
        a = random_self_adjoint(phi.domain_shape, rng)
        gap = apply(phi, multiply(a, a)) - multiply(apply(phi, a), apply(phi, a))
        deficits.append(max(0.0, -min(float(w[0]) for w in eigvalsh(gap))))
        omega = Functional(random_positive(phi.codomain_shape, rng))
        pushed = dual_apply(phi, omega)
        trace_err.append(abs(pushed.mass() - omega.mass()))
        deficits.append(max(0.0, -min(float(w[0]) for w in eigvalsh(pushed.density))))
    return [
        OracleReport.from_errors("kadison-schwarz", deficits, tol),
        OracleReport.from_errors("dual-trace-preservation", trace_err, 1e-10),
    ]


def unitary_invariance_suite(rng, trials: int = 500, tol: float = 1e-10) -> list[OracleReport]:
    errs = []
    for i in range(trials):
        shape = _shape_cycle(i)
        omega = Functional(random_positive(shape, rng, _random_ranks(shape, rng)))
        eta = eta_from_element(omega, random_self_adjoint(shape, rng))
        u = unitary_map(*(random_unitary(n, rng) for n in shape.block_dims))
        rho = dual_apply(u, omega)
        pushed = dual_apply(u, eta.value)
        errs.append(abs(inner_product(rho, pushed, pushed) - inner_product(omega, eta, eta)))
    return [OracleReport.from_errors("unitary-invariance", errs, tol)]


# -- lifts and absolute continuity --------------------------------------------

def _sa_omega_part(a: AlgebraElement, omega: Functional) -> AlgebraElement:
    _, _, _, a_qq = block_decompose(a, support_projection(omega))
    return a - a_qq


def round_trip_suite(rng, trials: int = 500, tol: float = 1e-10) -> list[OracleReport]:
    errs = []
    for i in range(trials):
        shape = _shape_cycle(i)
        omega = Functional(random_positive(shape, rng, _random_ranks(shape, rng)))
        a = random_self_adjoint(shape, rng)
        lifted = jordan_lift(omega, eta_from_element(omega, a)).a
        errs.append(operator_norm(lifted - _sa_omega_part(a, omega)))
    return [OracleReport.from_errors("lift-round-trip", errs, tol)]


def lift_oracle_suite(rng, trials: int = 200, tol: float = 1e-9) -> list[OracleReport]:
    errs = []
    for i in range(trials):
        shape = _shape_cycle(i)
        omega = Functional(random_positive(shape, rng))
        eta = Functional(random_self_adjoint(shape, rng))
        errs.append(operator_norm(jordan_lift(omega, eta).a - lift_oracle(omega, eta).a))
    return [OracleReport.from_errors("lift-vs-dense-solve", errs, tol)]


def ac_duality_suite(rng, trials: int = 500) -> list[OracleReport]:
    mismatches, positives = [], 0
    for i in range(trials):
        shape = (AlgebraShape.of(3),) + MIXED_SHAPES
        shape = shape[i % len(shape)]
        omega = Functional(random_positive(shape, rng, _random_ranks(shape, rng)))
        if i % 2 == 0:
            xi = eta_from_element(omega, random_self_adjoint(shape, rng)).value
        else:
            xi = Functional(random_self_adjoint(shape, rng))
        fast = is_absolutely_continuous(xi, omega)
        slow = ac_enumeration_oracle(xi, omega, samples=8, rng=rng)
        positives += fast
        mismatches.append(float(fast != slow))
    detail = f"{positives} absolutely continuous, {trials - positives} not"
    return [OracleReport.from_errors("ac-vs-enumeration", mismatches, 0.0, detail)]


# -- structure ----------------------------------------------------------------

def structure_dims_suite(rng=None, trials: int | None = None, max_dim: int = 4, max_blocks: int = 3):
    """Exhaustive: every shape with at most ``max_blocks`` blocks of size at most ``max_dim``."""
    rng = np.random.default_rng(0) if rng is None else rng
    errs, worst = [], ""
    for b in range(1, max_blocks + 1):
        for dims in itertools.combinations_with_replacement(range(1, max_dim + 1), b):
            shape = AlgebraShape(dims)
            for ranks in itertools.product(*(range(n + 1) for n in dims)):
                omega = Functional(random_positive(shape, rng, ranks, normalize=any(ranks)))
                expected = sum(n * n - (n - r) ** 2 for n, r in zip(dims, ranks))
                err = abs(distribution_dim(omega) - expected)
                if err and not worst:
                    worst = f"first mismatch at shape {dims} ranks {ranks}"
                errs.append(float(err))
    return [OracleReport.from_errors("distribution-dimension", errs, 0.0, worst)]


def amari_cencov_suite(rng, trials: int = 500, tol: float = 1e-12) -> list[OracleReport]:
    errs = []
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        w = rng.uniform(0.1, 1.0, n)
        w /= w.sum()
        omega = Functional.from_weights(w)
        a, b, c = (rng.standard_normal(n) for _ in range(3))
        etas = [eta_from_element(omega, AlgebraElement.diagonal(x)) for x in (a, b, c)]
        errs.append(abs(triple_tensor(omega, *etas) - float(np.sum(w * a * b * c))))
    return [OracleReport.from_errors("amari-cencov", errs, tol)]


# -- model reductions ---------------------------------------------------------

def _grid(k: int, steps: int, lo: float, hi: float) -> list[np.ndarray]:
    axis = np.linspace(lo, hi, steps)
    return [np.array(p) for p in itertools.product(axis, repeat=k)]


def _feature_table(n_outcomes: int, k: int) -> np.ndarray:
    x = np.arange(n_outcomes, dtype=float) / (n_outcomes - 1)
    return np.stack([np.cos(np.pi * (j + 1) * x) for j in range(k)], axis=1)


def fisher_rao_suite(
    rng=None, trials: int | None = None, steps: int = 10, tol_fd: float = 1e-6, tol_analytic: float = 1e-10,
    jobs: int = 1,
) -> list[OracleReport]:
    """3- and 5-outcome exponential families with three parameters on a ``steps^3`` grid."""
    reports = []
    for n_out in (3, 5):
        model = make_exponential_family_model(_feature_table(n_out, 3))
        points = _grid(3, steps, -1.0, 1.0)
        oracle = [fisher_rao_oracle(model, p).entries for p in points]
        for method, tol in (("fd", tol_fd), ("analytic", tol_analytic)):
            start = time.perf_counter()
            got = evaluate_grid(model, points, method=method, jobs=jobs)
            elapsed = time.perf_counter() - start
            errs = [np.abs(g.entries - o).max() for g, o in zip(got, oracle)]
            reports.append(
                OracleReport.from_errors(
                    f"fisher-rao-{n_out}-outcomes-{method}", errs, tol, f"{elapsed:.2f}s"
                )
            )
    return reports


def bures_helstrom_suite(rng, trials: int = 500, tol: float = 1e-9) -> list[OracleReport]:
    model = make_bloch_model()
    errs = []
    for _ in range(trials):
        r = rng.uniform(-BLOCH_HALF_WIDTH, BLOCH_HALF_WIDTH, 3) * (1 - 1e-9)
        errs.append(np.abs(metric_tensor(model, r).entries - bures_helstrom_oracle(r).entries).max())
    origin = np.abs(metric_tensor(model, np.zeros(3)).entries - np.eye(3)).max()
    return [
        OracleReport.from_errors("bures-helstrom", errs, tol),
        OracleReport.from_errors("bures-helstrom-origin-identity", [origin], tol),
    ]


def _rank_one_instance(rng, n: int, k: int, unit: bool, orthogonal: bool):
    phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    phi *= (1.0 if unit else rng.uniform(0.2, 3.0)) / np.linalg.norm(phi)
    gens = [_random_hermitian(n, rng) for _ in range(k)]
    if orthogonal:
        # shift by a multiple of the identity so <phi|H phi> = 0
        c = np.vdot(phi, phi).real
        gens = [h - (np.vdot(phi, h @ phi).real / c) * np.eye(n) for h in gens]
    return make_rank_one_unitary_model(phi, gens)


def rank_one_suite(rng, trials: int = 100, tol: float = 1e-8) -> list[OracleReport]:
    """Closed form against the computed metric at a random group point, plus invariance checks.

    ``phi`` is drawn with a random norm; the unit-norm subset is reported separately.
    """
    closed, closed_unit, norms = [], [], []
    fs_err, ratios, constraint, invariance = [], [], [], []
    for t in range(trials):
        n = 2 + t % 7
        k = int(rng.integers(1, 4))
        model = _rank_one_instance(rng, n, k, unit=False, orthogonal=False)
        m = rng.uniform(-1.0, 1.0, k)
        g = left_invariant_metric(model, m).entries
        c_phi = model.norm_squared
        expected = rank_one_closed_form(model.phi, model.identity_vectors())
        closed.append(np.abs(g - expected).max())
        norms.append(c_phi)
        m2 = rng.uniform(-1.0, 1.0, k)
        invariance.append(np.abs(left_invariant_metric(model, m2).entries - g).max())
        psi = model.state_vector(m)
        for v in model.left_invariant_vectors(m) + [model.vector_tangent(m, rng.standard_normal(k))]:
            constraint.append(abs(np.vdot(v, psi) + np.vdot(psi, v)))

        unit = _rank_one_instance(rng, n, k, unit=True, orthogonal=True)
        gu = left_invariant_metric(unit, m).entries
        closed_unit.append(np.abs(gu - rank_one_closed_form(unit.phi, unit.identity_vectors())).max())
        fs = fubini_study_gram(unit.phi, unit.identity_vectors())
        ratios.append(float(np.sum(gu * fs) / np.sum(fs * fs)))
        fs_err.append(np.abs(gu - 4.0 * fs).max())

    ratio = f"measured ratio {min(ratios):.12f}..{max(ratios):.12f}"
    norm_range = f"|phi|^2 in [{min(norms):.3f}, {max(norms):.3f}]"
    return [
        OracleReport.from_errors("rank-one-closed-form", closed, tol, norm_range),
        OracleReport.from_errors("rank-one-closed-form-unit-phi", closed_unit, tol),
        OracleReport.from_errors("fubini-study-proportionality", fs_err, tol, ratio),
        OracleReport.from_errors("rank-one-normalization-constraint", constraint, tol),
        OracleReport.from_errors("rank-one-left-invariance", invariance, tol),
    ]


SUITES: dict[str, Suite] = {
    "jordan-lie": jordan_lie_suite,
    "triple-identity": triple_identity_suite,
    "monotonicity": monotonicity_suite,
    "kadison-schwarz": kadison_schwarz_suite,
    "unitary-invariance": unitary_invariance_suite,
    "round-trip": round_trip_suite,
    "lift-oracle": lift_oracle_suite,
    "ac-duality": ac_duality_suite,
    "structure-dims": structure_dims_suite,
    "amari-cencov": amari_cencov_suite,
    "fisher-rao": fisher_rao_suite,
    "bures-helstrom": bures_helstrom_suite,
    "rank-one": rank_one_suite,
}


def suite_rng(seed: int, name: str) -> np.random.Generator:
    """Independent stream per suite, so results do not depend on which suites run."""
    return np.random.default_rng([int(seed), list(SUITES).index(name)])


def run_suite(name: str, seed: int = 0, trials: int | None = None, **options) -> list[OracleReport]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    kwargs = dict(options)
    if trials is not None:
        kwargs["trials"] = trials
    return SUITES[name](suite_rng(seed, name), **kwargs)
