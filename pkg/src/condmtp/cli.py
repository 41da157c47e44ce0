"""Command-line front door: adjust, simulate, criteria, figures.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
CSV bodies are deterministic for fixed inputs and seed; wall-clock
timestamps appear only in the run manifest.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, asdict, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import _svg
from .conditional import apply_procedure, cbp_adjusted_p, conditional_adjusted_p
from .criteria import (
    IntegralCriterionParams,
    binom_inv_expect,
    check_supra_uniform,
    integral_criterion,
    region_grid,
)
from .errors import AccuracyError, DataError, DomainError
from .numkit import QuadratureSettings
from .procedures import (
    GLOBAL_BASES,
    ProcedureSpec,
    adjusted_pvalues,
    canonical_base,
)
from .simkit import (
    CorrelationModel,
    SimulationScenario,
    run_scenario,
    scenario_fig1,
    scenario_fig2,
    scenario_pairwise,
)

_EXIT_USAGE = 2
_EXIT_DATA = 3
_EXIT_NUMERIC = 4


@dataclass
class RunManifest:
    command: str
    parameters: dict
    master_seed: int
    artifact_paths: list[str] = field(default_factory=list)
    tool_version: str = __version__
    created_utc: str = ""

    def write(self, out_dir: Path) -> Path:
        self.created_utc = datetime.now(timezone.utc).isoformat()
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# ----------------------------------------------------------------------
# adjust
# ----------------------------------------------------------------------

def _read_pvalues(path: Path) -> np.ndarray:
    if not path.exists():
        raise DataError(f"{path}: no such file")
    text = path.read_text().splitlines()
    rows = [(i + 1, line.strip()) for i, line in enumerate(text)
            if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise DataError(f"{path}: no p-values found")
    first = rows[0][1]
    values = []
    if "p" in [tok.strip().lower() for tok in first.split(",")]:
        col = [tok.strip().lower() for tok in first.split(",")].index("p")
        for lineno, line in rows[1:]:
            toks = line.split(",")
            if len(toks) <= col:
                raise DataError(f"{path}:{lineno}: missing column 'p'")
            values.append(_parse_p(path, lineno, toks[col]))
    else:
        for lineno, line in rows:
            tok = line.split(",")[0]
            values.append(_parse_p(path, lineno, tok))
    return np.array(values, dtype=np.float64)


def _parse_p(path: Path, lineno: int, tok: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise DataError(f"{path}:{lineno}: not a number: {tok.strip()!r}")
    if not (0.0 <= v <= 1.0):
        raise DataError(f"{path}:{lineno}: p-value outside [0,1]: {v!r}")
    return v


def _cmd_adjust(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    values = _read_pvalues(Path(args.input))

    name = args.procedure.strip().lower()
    lam = args.lam
    if name == "cbp":
        if lam is None:
            raise DataError("procedure 'cbp' requires --lambda")
        base = "bonferroni"
    else:
        base = canonical_base(name)
    if base in GLOBAL_BASES:
        raise DataError(f"{args.procedure!r} is a global test; "
                        "it has no per-hypothesis adjusted p-values")

    spec = ProcedureSpec(base, args.alpha, lam, lambda0=args.lambda0)
    result = apply_procedure(spec, values)
    if lam is None:
        adjusted = adjusted_pvalues(values, base, args.lambda0)
    elif base == "bonferroni":
        adjusted = cbp_adjusted_p(values, lam)
    else:
        adjusted = conditional_adjusted_p(values, base, lam, args.lambda0)

    out_path = out_dir / "adjusted.csv"
    rows = [[i, float(values[i]), float(adjusted[i]),
             int(result.decisions.decisions[i])] for i in range(values.size)]
    _write_csv(out_path, ["index", "p", "adjusted_p", "reject"], rows)

    manifest = RunManifest(
        command="adjust",
        parameters={"input": str(args.input), "procedure": args.procedure,
                    "alpha": args.alpha, "lambda": lam, "lambda0": args.lambda0},
        master_seed=0,
        artifact_paths=[str(out_path)])
    manifest.write(out_dir)
    print(f"wrote {out_path} ({values.size} hypotheses, "
          f"{result.decisions.n_rejected()} rejected)")
    return 0


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

_SCENARIO_KEYS = {"m", "mu", "n", "model", "rho", "matrix_file", "truth",
                  "procedures", "alpha", "lambda", "lambda0", "reps", "seed"}


def _parse_scenario_file(path: Path) -> dict:
    if not path.exists():
        raise DataError(f"{path}: no such file")
    raw = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DataError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        raw[key.strip().lower()] = value.strip()
    unknown = sorted(set(raw) - _SCENARIO_KEYS)
    if unknown:
        raise DataError(f"{path}: unknown scenario keys: {', '.join(unknown)}")
    return raw


def _build_scenario(raw: dict, base_dir: Path, reps_override, seed_override
                    ) -> SimulationScenario:
    try:
        m = int(raw["m"])
        alpha = float(raw.get("alpha", "0.05"))
        lam = float(raw.get("lambda", "0.5"))
        lambda0 = float(raw.get("lambda0", "0.5"))
        n = int(raw.get("n", "1"))
        reps = int(raw.get("reps", "10000"))
        seed = int(raw.get("seed", "0"))
    except KeyError as exc:
        raise DataError(f"scenario file is missing required key {exc.args[0]!r}")
    except ValueError as exc:
        raise DataError(f"scenario file: {exc}")

    mu_vals = _float_list(raw.get("mu", "0"))
    if len(mu_vals) == 1:
        mu_vals = mu_vals * m
    if len(mu_vals) != m:
        raise DataError(f"mu must have 1 or m={m} entries, got {len(mu_vals)}")
    noncentralities = np.asarray(mu_vals) * math.sqrt(n)

    model_name = raw.get("model", "").lower()
    if not model_name:
        model_name = ("equicorrelated" if "rho" in raw
                      else "explicit" if "matrix_file" in raw
                      else "independent")
    if model_name == "independent":
        model = CorrelationModel.independent()
    elif model_name == "equicorrelated":
        if "rho" not in raw:
            raise DataError("equicorrelated model requires key 'rho'")
        model = CorrelationModel.equicorrelated(float(raw["rho"]))
    elif model_name == "explicit":
        if "matrix_file" not in raw:
            raise DataError("explicit model requires key 'matrix_file'")
        mat_path = base_dir / raw["matrix_file"]
        if not mat_path.exists():
            raise DataError(f"{mat_path}: no such matrix file")
        model = CorrelationModel.explicit(np.loadtxt(mat_path, delimiter=","))
    elif model_name == "antithetic":
        model = CorrelationModel.antithetic_pair()
    else:
        raise DataError(f"unknown model {model_name!r}")

    if "truth" in raw:
        truth = np.array([bool(int(tok)) for tok in raw["truth"].split(",")
                          if tok.strip()])
        if truth.size != m:
            raise DataError(f"truth must have m={m} entries")
    else:
        truth = noncentralities >= 0.0

    specs = []
    for tok in raw.get("procedures", "bonferroni").split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        conditioned = tok.startswith("cond:")
        base = tok[5:] if conditioned else tok
        if base == "cbp":
            base, conditioned = "bonferroni", True
        specs.append(ProcedureSpec(canonical_base(base), alpha,
                                   lam if conditioned else None, lambda0))

    return SimulationScenario(
        m=m, noncentralities=noncentralities, n=n, correlation=model,
        truth_mask=truth, procedures=tuple(specs),
        replications=reps_override or reps,
        master_seed=seed if seed_override is None else seed_override)


def _estimates_rows(results) -> list[list]:
    rows = []
    for spec, est in results:
        rows.append([spec.label(), spec.alpha,
                     "" if spec.lam is None else spec.lam,
                     est.rate_kind, est.estimate, est.std_error,
                     est.replications, est.master_seed])
    return rows


_EST_HEADER = ["procedure", "alpha", "lambda", "rate_kind", "estimate",
               "std_error", "replications", "master_seed"]


def _cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw = _parse_scenario_file(Path(args.scenario))
    scn = _build_scenario(raw, Path(args.scenario).parent,
                          args.reps, args.seed)
    results = run_scenario(scn, backend=args.backend)
    out_path = out_dir / "estimates.csv"
    _write_csv(out_path, _EST_HEADER, _estimates_rows(results))
    manifest = RunManifest(
        command="simulate",
        parameters={"scenario": str(args.scenario), "reps": scn.replications,
                    "backend": args.backend or "auto"},
        master_seed=scn.master_seed,
        artifact_paths=[str(out_path)])
    manifest.write(out_dir)
    print(f"wrote {out_path} ({len(results)} estimates)")
    return 0


# ----------------------------------------------------------------------
# criteria
# ----------------------------------------------------------------------

def _cmd_criteria(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []

    if args.kind == "integral":
        rows = []
        settings = QuadratureSettings(abs_tol=args.tol, rel_tol=args.tol * 100,
                                      max_subdivisions=400)
        for alpha in _float_list(args.alpha):
            for lam in _float_list(args.lam):
                for rho in _float_list(args.rho):
                    warn = ""
                    try:
                        value, holds = integral_criterion(
                            IntegralCriterionParams(alpha, lam, rho), settings)
                    except AccuracyError as exc:
                        value, holds = exc.estimate, False
                        warn = f"quadrature error bound {exc.error_bound:.2e}"
                    rows.append([alpha, lam, rho, value, 1.0 / lam,
                                 int(holds), warn])
        out_path = out_dir / "integral.csv"
        _write_csv(out_path, ["alpha", "lambda", "rho", "value", "bound",
                              "holds", "warning"], rows)
        artifacts.append(out_path)

    elif args.kind == "region":
        cells = region_grid(args.grid)
        rows = [[c["alpha"], c["lam"], c["bound"], int(c["covered"]),
                 "|".join(c["certificates"])] for c in cells]
        out_path = out_dir / "region.csv"
        _write_csv(out_path, ["alpha", "lambda", "pqd_bound", "covered",
                              "certificates"], rows)
        artifacts.append(out_path)
        if args.svg:
            svg_path = out_dir / "region.svg"
            svg_path.write_text(_svg.region_map(
                cells, args.grid, "Certified (alpha, lambda) combinations"))
            artifacts.append(svg_path)

    elif args.kind == "binom":
        rows = []
        for n in [int(v) for v in _float_list(args.n)]:
            for p in _float_list(args.p):
                rows.append([n, p, binom_inv_expect(n, p)])
        out_path = out_dir / "binom.csv"
        _write_csv(out_path, ["n", "p", "mean_inverse"], rows)
        artifacts.append(out_path)

    else:  # supra
        grid = np.loadtxt(args.input, delimiter=",", skiprows=1)
        ok = check_supra_uniform(grid)
        out_path = out_dir / "supra.csv"
        _write_csv(out_path, ["input", "supra_uniform"],
                   [[str(args.input), int(ok)]])
        artifacts.append(out_path)
        print(f"supra-uniform: {ok}")

    manifest = RunManifest(
        command=f"criteria:{args.kind}",
        parameters={k: v for k, v in vars(args).items()
                    if k not in ("func", "out") and v is not None},
        master_seed=0,
        artifact_paths=[str(p) for p in artifacts])
    manifest.write(out_dir)
    for p in artifacts:
        print(f"wrote {p}")
    return 0


# ----------------------------------------------------------------------
# figures
# ----------------------------------------------------------------------

def _series_from(points, results_by_point, rate: str):
    labels = []
    for spec, _ in results_by_point[points[0]]:
        if spec.label() not in labels:
            labels.append(spec.label())
    series = []
    for label in labels:
        ys = []
        for pt in points:
            est = [e for s, e in results_by_point[pt]
                   if s.label() == label and e.rate_kind == rate]
            ys.append(est[0].estimate if est else math.nan)
        series.append((label, list(points), ys))
    return series


def _cmd_figures(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    seed = args.seed

    if args.which == "fig4":
        cells = region_grid(50)
        svg_path = out_dir / "fig4.svg"
        svg_path.write_text(_svg.region_map(
            cells, 50, "Certified (alpha, lambda) combinations"))
        artifacts.append(svg_path)
        master_seed = 0
    else:
        if args.which == "fig1":
            points = [int(v) for v in _float_list(args.points or "5,10,25,50,100,200")]
            build = lambda pt: scenario_fig1(pt, args.reps, seed)
            xlabel, rate = "number of true hypotheses", "power"
        elif args.which == "fig2":
            points = _float_list(args.points or "0,10,20,30,40,50,60,70,80,90")
            build = lambda pt: scenario_fig2(pt, args.reps, seed)
            xlabel, rate = "percentage of true hypotheses", "power"
        else:  # fig3
            points = _float_list(args.points or
                                 "0,0.25,0.5,0.75,1,1.5,2,2.5,3")
            build = lambda pt: scenario_pairwise(args.k, pt, 10, args.reps, seed)
            xlabel, rate = "delta between consecutive means", "power"

        rows = []
        results_by_point = {}
        for pt in points:
            scn = build(pt)
            results = run_scenario(scn, backend=args.backend)
            results_by_point[pt] = results
            for spec, est in results:
                rows.append([pt, spec.label(), est.rate_kind, est.estimate,
                             est.std_error, est.replications])
        out_path = out_dir / f"{args.which}.csv"
        _write_csv(out_path, ["point", "procedure", "rate_kind", "estimate",
                              "std_error", "replications"], rows)
        artifacts.append(out_path)

        plot_points = [pt for pt in points
                       if any(e.rate_kind == rate
                              for _, e in results_by_point[pt])]
        if plot_points:
            series = _series_from(plot_points, results_by_point, rate)
            series = [s for s in series if not all(math.isnan(y) for y in s[2])]
            svg_path = out_dir / f"{args.which}.svg"
            svg_path.write_text(_svg.line_chart(
                series, f"{args.which}: {rate} at alpha=0.05, lambda=0.5",
                xlabel, rate, y_range=(0.0, 1.0)))
            artifacts.append(svg_path)
        master_seed = seed

    manifest = RunManifest(
        command=f"figures:{args.which}",
        parameters={k: v for k, v in vars(args).items()
                    if k not in ("func", "out") and v is not None},
        master_seed=master_seed,
        artifact_paths=[str(p) for p in artifacts])
    manifest.write(out_dir)
    for p in artifacts:
        print(f"wrote {p}")
    return 0


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condmtp",
        description="Conditionalized multiple testing: p-value adjustment, "
                    "Monte Carlo simulation, and FWER-criterion evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("adjust", help="adjust p-values from a file")
    pa.add_argument("--input", required=True)
    pa.add_argument("--procedure", required=True,
                    help="bonferroni|sidak|holm|hochberg|hommel|bh|fgs|cbp")
    pa.add_argument("--alpha", type=float, default=0.05)
    pa.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="conditionalization threshold in (0,1]")
    pa.add_argument("--lambda0", type=float, default=0.5,
                    help="FGS plug-in tuning parameter")
    pa.add_argument("--out", required=True)
    pa.set_defaults(func=_cmd_adjust)

    ps = sub.add_parser("simulate", help="run a scenario file")
    ps.add_argument("--scenario", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--reps", type=int, default=None)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--backend", choices=("numpy", "numba"), default=None)
    ps.set_defaults(func=_cmd_simulate)

    pc = sub.add_parser("criteria", help="evaluate FWER-control criteria")
    pc.add_argument("kind", choices=("integral", "region", "binom", "supra"))
    pc.add_argument("--alpha", default="0.05")
    pc.add_argument("--lambda", dest="lam", default="0.5")
    pc.add_argument("--rho", default="0.0")
    pc.add_argument("--n", default="10")
    pc.add_argument("--p", default="0.5")
    pc.add_argument("--grid", type=int, default=50)
    pc.add_argument("--tol", type=float, default=1e-10)
    pc.add_argument("--input", default=None, help="CDF grid CSV for 'supra'")
    pc.add_argument("--svg", action="store_true")
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=_cmd_criteria)

    pf = sub.add_parser("figures", help="emit figure data and SVG plots")
    pf.add_argument("--which", required=True,
                    choices=("fig1", "fig2", "fig3", "fig4"))
    pf.add_argument("--out", required=True)
    pf.add_argument("--reps", type=int, default=10_000)
    pf.add_argument("--seed", type=int, default=20_260_101)
    pf.add_argument("--points", default=None,
                    help="comma-separated x-axis points")
    pf.add_argument("--k", type=int, default=5, help="group count for fig3")
    pf.add_argument("--backend", choices=("numpy", "numba"), default=None)
    pf.set_defaults(func=_cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except AccuracyError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
