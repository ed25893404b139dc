"""Command-line interface: ``jordangeom eval-metric | verify | oracle-compare``.

Every verb reads one JSON config file. Exit codes: 0 success, 1 verification
failure, 2 config error, 3 regularity or domain error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from jordangeom.algebra import AlgebraElement, AlgebraShape, as_shape
from jordangeom.channels import KrausMap
from jordangeom.errors import (
    DomainError,
    JordanGeomError,
    JRegularityError,
    NotAbsolutelyContinuousError,
    NotPositiveError,
    NotUnitalError,
    NumericalError,
    ShapeMismatchError,
)
from jordangeom.functionals import Functional
from jordangeom.models import (
    ClassicalModel,
    MetricMatrix,
    ParametricModel,
    RankOneUnitaryModel,
    evaluate_grid,
    left_invariant_metric,
    make_bloch_model,
    make_exponential_family_model,
    make_rank_one_unitary_model,
    make_simplex_model,
    pullback_metric,
)
from jordangeom.oracles import (
    OracleReport,
    bures_helstrom_oracle,
    fisher_rao_oracle,
    rank_one_closed_form,
)
from jordangeom import suites

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_REGULARITY, EXIT_NUMERICAL = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


# -- config -------------------------------------------------------------------

def _matrix(value) -> np.ndarray:
    """A matrix is a nested real list or ``{"real": [...], "imag": [...]}``."""
    if isinstance(value, dict):
        if "real" not in value:
            raise ConfigError("complex matrix needs a 'real' part")
        re = np.asarray(value["real"], dtype=float)
        im = np.asarray(value.get("imag", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ConfigError("real and imag parts differ in shape")
        return re + 1j * im
    return np.asarray(value, dtype=complex)


def _element(value, shape: AlgebraShape | None = None) -> AlgebraElement:
    """One matrix for a single-block algebra, or a list of ``{"block": matrix}`` / matrices."""
    if isinstance(value, dict) and "blocks" in value:
        blocks = [np.atleast_2d(_matrix(b)) for b in value["blocks"]]
    else:
        blocks = [np.atleast_2d(_matrix(value))]
    el = AlgebraElement.from_blocks(blocks)
    if shape is not None and el.shape != shape:
        raise ConfigError(f"matrix table has shape {el.shape}, algebra is {shape}")
    return el


@dataclass
class CustomTable:
    """Explicit densities and tangents per parameter point."""

    shape: AlgebraShape
    entries: list[tuple[np.ndarray, Functional, list[Functional]]]


@dataclass
class RunConfig:
    model: ParametricModel | CustomTable | None
    points: list[np.ndarray]
    method: str = "auto"
    step: float | None = None
    output_path: str | None = None
    output_format: str = "csv"
    tolerances: dict[str, float] = field(default_factory=dict)
    verify: dict[str, Any] = field(default_factory=dict)
    compare: list[str] = field(default_factory=list)

    @property
    def tol(self) -> float:
        return float(self.tolerances.get("regularity", 1e-9))


def _build_model(section: dict, shape: AlgebraShape | None):
    kind = section.get("kind")
    if kind == "classical":
        family = section.get("family", "simplex")
        if family == "simplex":
            model = make_simplex_model(int(section["outcomes"]))
        elif family == "exponential":
            model = make_exponential_family_model(section["features"], section.get("base_weights"))
        else:
            raise ConfigError(f"unknown classical family {family!r}")
    elif kind == "bloch":
        model = make_bloch_model()
    elif kind == "rank_one_unitary":
        phi = _matrix(section["phi"]).reshape(-1)
        model = make_rank_one_unitary_model(phi, [_matrix(h) for h in section["generators"]])
    elif kind == "custom":
        if shape is None:
            raise ConfigError("custom models need an explicit 'algebra' shape")
        entries = []
        for row in section["points"]:
            point = Functional(_element(row["density"], shape))
            tangents = [Functional(_element(t, shape)) for t in row["tangents"]]
            entries.append((np.asarray(row["params"], dtype=float), point, tangents))
        if not entries:
            raise ConfigError("custom model table is empty")
        k = {len(e[2]) for e in entries} | {e[0].size for e in entries}
        if len(k) != 1:
            raise ConfigError("every custom point needs one tangent per parameter")
        return CustomTable(shape, entries)
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    if shape is not None and model.shape != shape:
        raise ConfigError(f"model lives on {model.shape}, config declares {shape}")
    return model


def _grid_points(section, param_dim: int, base_dir: Path) -> list[np.ndarray]:
    if "points" in section:
        pts = [np.asarray(p, dtype=float) for p in section["points"]]
    elif "from_output" in section:
        records = json.loads((base_dir / section["from_output"]).read_text())
        pts = [np.asarray(r["params"], dtype=float) for r in records]
    else:
        axes = section.get("axes")
        if axes is None or len(axes) != param_dim:
            raise ConfigError(f"grid needs {param_dim} axes")
        ticks = []
        for ax in axes:
            steps = int(ax["steps"])
            lo, hi = float(ax["min"]), float(ax["max"])
            if steps < 1:
                raise ConfigError("grid steps must be at least 1")
            if lo > hi or (steps > 1 and lo == hi):
                raise ConfigError(f"bad axis bounds [{lo}, {hi}]")
            ticks.append(np.linspace(lo, hi, steps) if steps > 1 else np.array([lo]))
        pts = [np.array(p) for p in itertools.product(*ticks)]
    for p in pts:
        if p.shape != (param_dim,):
            raise ConfigError(f"grid point {p.tolist()} does not have {param_dim} coordinates")
    return pts


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        shape = as_shape(raw["algebra"]) if "algebra" in raw else None
        model = _build_model(raw["model"], shape) if "model" in raw else None
        if isinstance(model, CustomTable):
            points = [e[0] for e in model.entries]
        elif model is not None:
            points = _grid_points(raw.get("grid", {}), model.param_dim, path.parent)
        else:
            points = []
        tangents = raw.get("tangents", "analytic")
        method, step = "auto", None
        if tangents == "analytic":
            method = "analytic" if isinstance(model, ParametricModel) and model.has_analytic_tangents else "auto"
        elif isinstance(tangents, dict) and "finite_difference" in tangents:
            method = "fd"
            step = tangents["finite_difference"].get("step")
            step = None if step is None else float(step)
        else:
            raise ConfigError("tangents must be 'analytic' or {'finite_difference': {...}}")
        out = raw.get("output", {})
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
        return RunConfig(
            model=model,
            points=points,
            method=method,
            step=step,
            output_path=out.get("path"),
            output_format=fmt,
            tolerances={k: float(v) for k, v in raw.get("tolerances", {}).items()},
            verify=raw.get("verify", {}),
            compare=list(raw.get("compare", [])),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc!r}") from exc


# -- output -------------------------------------------------------------------

def _num(x: float) -> str:
    x = float(x)
    return format(0.0 if x == 0.0 else x, ".17g")


def render(results: list[MetricMatrix], fmt: str) -> str:
    k = results[0].dim if results else 0
    params = len(results[0].base) if results else 0
    tol = 1e-9
    if fmt == "json":
        records = [
            {"params": [float(v) for v in r.base], "metric_upper": [float(v) + 0.0 for v in r.upper()], "psd": r.is_psd(tol)}
            for r in results
        ]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"m_{i + 1}" for i in range(params)]
    header += [f"g_{i + 1}{j + 1}" if k < 10 else f"g_{i + 1}_{j + 1}" for i in range(k) for j in range(i, k)]
    writer.writerow(header + ["psd"])
    for r in results:
        writer.writerow([_num(v) for v in r.base] + [_num(v) for v in r.upper()] + [str(r.is_psd(tol)).lower()])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- verbs ----------------------------------------------------------------------

def _evaluate(cfg: RunConfig, jobs: int) -> list[MetricMatrix]:
    if isinstance(cfg.model, CustomTable):
        def one(entry):
            m, point, tangents = entry
            return pullback_metric(point, tangents, m, cfg.tol)

        if jobs <= 1:
            return [one(e) for e in cfg.model.entries]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, cfg.model.entries))
    return evaluate_grid(cfg.model, cfg.points, cfg.method, cfg.step, cfg.tol, jobs)


def cmd_eval_metric(cfg: RunConfig, args) -> int:
    if cfg.model is None:
        raise ConfigError("eval-metric needs a 'model' section")
    results = _evaluate(cfg, args.jobs)
    _emit(render(results, args.format or cfg.output_format), args.output or cfg.output_path)
    return EXIT_OK


def _kraus_maps(cfg: RunConfig) -> list[KrausMap]:
    maps = []
    for entry in cfg.verify.get("channels", []):
        ops = [_matrix(k) for k in entry["kraus"]]
        if len({op.shape for op in ops}) != 1:
            raise ConfigError("Kraus operators in one family must share a shape")
        try:
            maps.append(KrausMap.from_operators(ops))
        except (NotUnitalError, ShapeMismatchError) as exc:
            raise ConfigError(f"rejected Kraus family: {exc}") from exc
    return maps


DEFAULT_SUITES = (
    "jordan-lie",
    "triple-identity",
    "monotonicity",
    "kadison-schwarz",
    "unitary-invariance",
    "round-trip",
    "lift-oracle",
    "ac-duality",
    "structure-dims",
    "amari-cencov",
    "bures-helstrom",
    "fisher-rao",
    "rank-one",
)


def _print_reports(reports: list[OracleReport]) -> bool:
    for r in reports:
        print(r.line())
    return all(r.passed for r in reports)


def cmd_verify(cfg: RunConfig, args) -> int:
    names = cfg.verify.get("suites", list(DEFAULT_SUITES))
    unknown = [n for n in names if n not in suites.SUITES]
    if unknown:
        raise ConfigError(f"unknown suites: {', '.join(unknown)}")
    trials = cfg.verify.get("trials", {})
    extra = _kraus_maps(cfg)

    def run(name):
        opts = {"extra_maps": extra} if name == "monotonicity" and extra else {}
        return suites.run_suite(name, args.seed, trials.get(name), **opts)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            batches = list(pool.map(run, names))
    else:
        batches = [run(n) for n in names]
    ok = _print_reports([r for batch in batches for r in batch])
    return EXIT_OK if ok else EXIT_VERIFY


def _model_comparison(cfg: RunConfig, jobs: int) -> OracleReport:
    model = cfg.model
    results = _evaluate(cfg, jobs)
    if isinstance(model, ClassicalModel):
        tol = 1e-6 if cfg.method == "fd" or model.tangent_map is None else 1e-10
        oracle = [fisher_rao_oracle(model, r.base).entries for r in results]
        name = "classical-vs-fisher-rao"
    elif isinstance(model, RankOneUnitaryModel):
        tol = 1e-8
        results = [left_invariant_metric(model, p, cfg.tol) for p in cfg.points]
        expected = rank_one_closed_form(model.phi, model.identity_vectors())
        oracle = [expected for _ in results]
        name = "rank-one-vs-closed-form"
    elif isinstance(model, ParametricModel) and model.name == "bloch":
        tol = 1e-9
        oracle = [bures_helstrom_oracle(r.base).entries for r in results]
        name = "bloch-vs-dense-solve"
    else:
        raise ConfigError("oracle-compare has no reference for this model kind")
    tol = cfg.tolerances.get("compare", tol)
    errs = [np.abs(r.entries - o).max() for r, o in zip(results, oracle)]
    return OracleReport.from_errors(name, errs, tol)


def cmd_oracle_compare(cfg: RunConfig, args) -> int:
    reports = []
    if cfg.model is not None:
        reports.append(_model_comparison(cfg, args.jobs))
    names = cfg.compare or ([] if cfg.model is not None else ["lift-oracle", "ac-duality", "bures-helstrom", "rank-one"])
    for name in names:
        if name not in suites.SUITES:
            raise ConfigError(f"unknown comparison {name!r}")
        reports.extend(suites.run_suite(name, args.seed))
    ok = _print_reports(reports)
    return EXIT_OK if ok else EXIT_VERIFY


VERBS = {"eval-metric": cmd_eval_metric, "verify": cmd_verify, "oracle-compare": cmd_oracle_compare}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jordangeom", description="Jordan-product metric tensors on matrix algebras")
    parser.add_argument("verb", choices=sorted(VERBS))
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads")
    parser.add_argument("--output", help="output path, '-' for stdout (overrides the config)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (overrides the config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.verb == "eval-metric":
                raise ConfigError("eval-metric requires --config")
            cfg = RunConfig(model=None, points=[])
        else:
            cfg = load_config(args.config)
        return VERBS[args.verb](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (JRegularityError, DomainError, NotAbsolutelyContinuousError, NotPositiveError) as exc:
        print(f"regularity error: {exc}", file=sys.stderr)
        return EXIT_REGULARITY
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except JordanGeomError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
