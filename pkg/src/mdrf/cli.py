"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 Gaussian closed form infeasible with
``--no-fallback``. Data goes to stdout, diagnostics to stderr.
"""
import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import binary, gaussian, oracles, sweeps
from .models import BinaryModel, CapacityError, GaussianModel, InfeasibleError

OPTION_KEYS = ("step", "samples", "seed", "tol", "entropy_mode")
DEFAULT_OPTIONS = {
    "step": None,
    "samples": 1_000_000,
    "seed": 0,
    "tol": 1e-9,
    "entropy_mode": "bias_corrected",
}


class SpecError(ValueError):
    pass


@dataclass
class ModelSpec:
    model: str
    params: list
    sum_rate: float = 0.0
    alpha: float = 0.5
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise SpecError("model spec must be a JSON object")
        unknown = set(data) - {"model", "gammas", "ps", "alpha", "sum_rate", "options", "result"}
        if unknown:
            raise SpecError(f"unknown spec keys: {sorted(unknown)}")
        kind = data.get("model")
        if kind not in ("gaussian", "binary"):
            raise SpecError("'model' must be 'gaussian' or 'binary'")
        key = "gammas" if kind == "gaussian" else "ps"
        other = "ps" if kind == "gaussian" else "gammas"
        if key not in data or other in data:
            raise SpecError(f"a {kind} spec needs '{key}' and no '{other}'")
        if kind == "gaussian" and "alpha" in data:
            raise SpecError("'alpha' applies to binary models only")
        params = data[key]
        if not isinstance(params, list) or not params:
            raise SpecError(f"'{key}' must be a non-empty list")
        try:
            params = [float(v) for v in params]
            sum_rate = float(data.get("sum_rate", 0.0))
            alpha = float(data.get("alpha", 0.5))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"non-numeric spec value: {exc}") from None
        if not sum_rate >= 0:
            raise SpecError("'sum_rate' must be nonnegative")
        options = data.get("options", {}) or {}
        if not isinstance(options, dict) or set(options) - set(OPTION_KEYS):
            raise SpecError(f"'options' keys must be among {OPTION_KEYS}")
        mode = options.get("entropy_mode", "bias_corrected")
        if mode not in binary.ENTROPY_MODES:
            raise SpecError(f"entropy_mode must be one of {binary.ENTROPY_MODES}")
        spec = cls(model=kind, params=params, sum_rate=sum_rate, alpha=alpha, options=dict(options))
        spec.build()  # validates parameter ranges
        return spec

    def to_dict(self):
        out = {"model": self.model}
        out["gammas" if self.model == "gaussian" else "ps"] = list(self.params)
        if self.model == "binary":
            out["alpha"] = self.alpha
        out["sum_rate"] = self.sum_rate
        out["options"] = dict(self.options)
        return out

    def option(self, key):
        value = self.options.get(key)
        return DEFAULT_OPTIONS[key] if value is None else value

    def build(self):
        try:
            if self.model == "gaussian":
                return GaussianModel(self.params)
            return BinaryModel(self.params, self.alpha)
        except ValueError as exc:
            raise SpecError(str(exc)) from None


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _range(text):
    parts = text.split(":")
    try:
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise argparse.ArgumentTypeError("range must be START:STOP:NUM")
    if len(parts) != 3 or num < 1:
        raise argparse.ArgumentTypeError("range must be START:STOP:NUM with NUM >= 1")
    return start, stop, num


def fmt(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.9g}"
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def emit(header, rows, args, spec=None):
    out = sys.stdout
    if args.format == "json":
        payload = {"columns": list(header), "rows": [list(r) for r in rows]}
        if spec is not None:
            payload = {**spec.to_dict(), "result": payload}
        out.write(json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n")
        return
    out.write("# " + ",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def load_spec(args):
    if args.spec:
        try:
            with open(args.spec) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read spec {args.spec}: {exc}") from None
        spec = ModelSpec.from_dict(data)
    elif args.gammas is not None or args.ps is not None:
        if args.gammas is not None and args.ps is not None:
            raise SpecError("give either --gammas or --ps, not both")
        data = {"model": "gaussian" if args.gammas is not None else "binary"}
        data["gammas" if args.gammas is not None else "ps"] = args.gammas or args.ps
        if args.alpha is not None:
            data["alpha"] = args.alpha
        spec = ModelSpec.from_dict(data)
    else:
        raise SpecError("no model given: use --spec PATH or --gammas/--ps")
    # inline flags override the file
    if args.sum_rate is not None:
        if args.sum_rate < 0:
            raise SpecError("--sum-rate must be nonnegative")
        spec.sum_rate = args.sum_rate
    if args.alpha is not None and spec.model == "binary":
        spec.alpha = args.alpha
    for key in OPTION_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            spec.options[key] = value
    spec.build()
    return spec


def _rates(args, model):
    if args.rates is None:
        raise SpecError("--rates is required")
    if len(args.rates) != model.L:
        raise SpecError(f"expected {model.L} rates, got {len(args.rates)}")
    if any(r < 0 for r in args.rates):
        raise SpecError("rates must be nonnegative")
    return args.rates


def _sorted_rates(spec, rates):
    # rates are given per sensor in spec order; models store sensors sorted
    params = spec.params
    desc = spec.model == "gaussian"
    order = sorted(range(len(params)), key=lambda i: params[i], reverse=desc)
    return [rates[i] for i in order]


def _analytic(model, rates, spec, tie_rule="half"):
    if isinstance(model, GaussianModel):
        return gaussian.gaussian_mdrf(model, rates)
    if model.alpha == 0.5:
        return binary.binary_mdrf(model, rates, tie_rule)
    return binary.binary_mdrf_asym(model, rates, spec.option("entropy_mode"))


def _allocate(model, spec, fallback=True):
    budget = spec.sum_rate
    if isinstance(model, GaussianModel):
        return gaussian.allocate_gaussian(model, budget, tol=spec.option("tol"), fallback=fallback,
                                          seed=spec.option("seed"))
    if model.alpha == 0.5:
        return binary.allocate_binary(model, budget)
    if model.L != 2:
        raise SpecError("biased binary sources are supported for exactly two sensors")
    step = spec.option("step") or 0.01
    return binary.allocate_binary_asym(model, budget, step, spec.option("entropy_mode"))


def cmd_allocate(args):
    spec = load_spec(args)
    model = spec.build()
    alloc = _allocate(model, spec, fallback=not args.no_fallback)
    params = model.gammas if spec.model == "gaussian" else model.ps
    pname = "gamma" if spec.model == "gaussian" else "p"
    header = ("sensor", pname, "rate", "distortion", "method", "nu_star")
    rows = [(l, params[l], alloc.rates[l], alloc.distortion, alloc.method, alloc.nu_star)
            for l in range(model.L)]
    emit(header, rows, args, spec)
    if alloc.diagnosis:
        print(f"closed form not exact: {alloc.diagnosis}", file=sys.stderr)
    return 0


def cmd_mdrf(args):
    spec = load_spec(args)
    model = spec.build()
    rates = _sorted_rates(spec, _rates(args, model))
    tie_rule = "strict" if args.no_tie_rule else "half"
    d = _analytic(model, rates, spec, tie_rule)
    header, row = ["distortion"], [d]
    if args.verify:
        sim = _simulate(model, rates, spec, args.workers)
        z = (sim.estimate - d) / sim.stderr if sim.stderr > 0 else 0.0
        header += ["mc_estimate", "mc_stderr", "z_score"]
        row += [sim.estimate, sim.stderr, z]
        if model.L <= oracles.MAX_GRID_SENSORS:
            step = spec.option("step") or (0.01 if spec.model == "gaussian" else 0.05)
            grid = oracles.grid_search_allocation(model, sum(rates), step, spec.option("entropy_mode"))
            header.append("grid_best_distortion")
            row.append(grid.best_distortion)
    emit(header, [row], args, spec)
    return 0


def _simulate(model, rates, spec, workers=1):
    samples, seed = int(spec.option("samples")), int(spec.option("seed"))
    if isinstance(model, GaussianModel):
        return oracles.simulate_gaussian(model, rates, samples, seed, workers=workers)
    return oracles.simulate_binary(model, rates, samples, seed, spec.option("entropy_mode"),
                                   workers=workers)


def cmd_simulate(args):
    spec = load_spec(args)
    model = spec.build()
    rates = _sorted_rates(spec, _rates(args, model))
    if int(spec.option("samples")) < oracles.MIN_SAMPLES:
        raise SpecError(f"--samples must be at least {oracles.MIN_SAMPLES}")
    sim = _simulate(model, rates, spec, args.workers)
    d = _analytic(model, rates, spec)
    z = (sim.estimate - d) / sim.stderr if sim.stderr > 0 else 0.0
    header = ("estimate", "stderr", "samples", "seed", "analytic", "z_score")
    emit(header, [(sim.estimate, sim.stderr, sim.samples, sim.seed, d, z)], args, spec)
    return 0


def cmd_sweep(args):
    kind = args.kind
    start, stop, num = args.range
    values = sweeps.grid_values(start, stop, num)
    spec = None
    if kind == "threshold":
        header, rows = sweeps.threshold_sweep(values, args.workers)
    elif kind == "single_active":
        if args.gamma1 is not None:
            gamma1 = args.gamma1
        else:
            spec = load_spec(args)
            gamma1 = spec.build().gammas[0]
        tol = args.tol if args.tol is not None else 1e-9
        header, rows = sweeps.single_active_sweep(gamma1, values, tol, args.workers)
    else:
        spec = load_spec(args)
        model = spec.build()
        if kind == "alloc_vs_budget":
            if isinstance(model, BinaryModel) and model.alpha != 0.5:
                raise SpecError("alloc_vs_budget needs a uniform binary source")
            opts = {"tol": spec.option("tol"), "seed": spec.option("seed")} \
                if isinstance(model, GaussianModel) else {}
            header, rows = sweeps.alloc_vs_budget_sweep(model, values, args.workers, **opts)
        elif kind == "ceo_binary":
            if not isinstance(model, BinaryModel) or model.alpha != 0.5:
                raise SpecError("ceo_binary needs a uniform binary model")
            header, rows = sweeps.ceo_binary_sweep(model, values, args.workers)
        else:
            if not isinstance(model, BinaryModel) or model.L != 2:
                raise SpecError("bernoulli_asym needs a two-sensor binary model")
            step = spec.option("step") or 0.01
            header, rows = sweeps.bernoulli_asym_sweep(
                model.ps, spec.sum_rate, values, step, spec.option("entropy_mode"), args.workers)
    emit(header, rows, args, spec)
    return 0


def _verify_gaussian(model, spec, alloc):
    checks = []
    budget = spec.sum_rate
    checks.append(("sum_rate", abs(sum(alloc.rates) - budget) <= 1e-9,
                   f"sum={sum(alloc.rates):.12g} budget={budget:.12g}"))
    step = spec.option("step") or 0.01
    grid = oracles.grid_search_allocation(model, budget, step)
    checks.append(("grid_dominance", alloc.distortion <= grid.best_distortion + 1e-4,
                   f"alloc={alloc.distortion:.9g} grid={grid.best_distortion:.9g}"))
    if alloc.method == "closed_form" and budget > 0:
        worst = 0.0
        for g, r in zip(model.gammas, alloc.rates):
            if r > 0:
                x = 4.0 ** r
                worst = max(worst, abs(2 * g * (g + 1) * x / (x + g) ** 2 - alloc.nu_star))
        checks.append(("kkt_stationarity", worst <= 1e-6, f"max_residual={worst:.3g}"))
        bad = gaussian.activation_violations(model, alloc.nu_star, alloc.rates)
        checks.append(("activation_threshold", bad == 0, f"violations={bad}"))
    return checks


def _verify_binary(model, spec, alloc, tie_rule):
    checks = []
    budget = spec.sum_rate
    checks.append(("sum_rate", sum(alloc.rates) <= budget + 1e-9,
                   f"sum={sum(alloc.rates):.12g} budget={budget:.12g}"))
    mode = spec.option("entropy_mode")
    zero = [0.0] * model.L
    if model.alpha == 0.5:
        d0 = binary.binary_mdrf(model, zero, tie_rule)
    else:
        d0 = binary.binary_mdrf_asym(model, zero, mode)
    target = min(model.alpha, 1 - model.alpha)
    checks.append(("zero_rate_distortion", abs(d0 - target) <= 1e-12,
                   f"D(0)={d0:.9g} expected={target:.9g}"))
    step = spec.option("step") or 0.05
    grid = oracles.grid_search_allocation(model, budget, step, mode)
    d_alloc = _analytic(model, alloc.rates, spec, tie_rule)
    checks.append(("grid_dominance", d_alloc <= grid.best_distortion + 1e-9,
                   f"alloc={d_alloc:.9g} grid={grid.best_distortion:.9g}"))
    if model.alpha == 0.5:
        gap = abs(binary.binary_mdrf_asym(model, alloc.rates, mode) - binary.binary_mdrf(model, alloc.rates))
        checks.append(("asym_reduction", gap <= 1e-12, f"gap={gap:.3g}"))
    return checks


def cmd_verify(args):
    spec = load_spec(args)
    model = spec.build()
    if model.L > oracles.MAX_GRID_SENSORS:
        raise CapacityError(f"verify supports at most {oracles.MAX_GRID_SENSORS} sensors")
    tie_rule = "strict" if args.no_tie_rule else "half"
    alloc = _allocate(model, spec)
    if spec.model == "gaussian":
        checks = _verify_gaussian(model, spec, alloc)
    else:
        checks = _verify_binary(model, spec, alloc, tie_rule)
    sim = _simulate(model, alloc.rates, spec, args.workers)
    d = _analytic(model, alloc.rates, spec, tie_rule)
    z = (sim.estimate - d) / sim.stderr if sim.stderr > 0 else 0.0
    checks.append(("monte_carlo", abs(z) <= 3.0, f"analytic={d:.9g} mc={sim.estimate:.9g} z={z:.3g}"))
    rows = [(name, "PASS" if ok else "FAIL", detail) for name, ok, detail in checks]
    emit(("check", "status", "detail"), rows, args, spec)
    return 0 if all(ok for _, ok, _ in checks) else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON model spec file")
    common.add_argument("--gammas", type=_floats, help="Gaussian SNRs, comma separated")
    common.add_argument("--ps", type=_floats, help="binary crossover probabilities, comma separated")
    common.add_argument("--alpha", type=float, help="binary source bias P(X=1)")
    common.add_argument("--sum-rate", type=float, dest="sum_rate", help="total rate budget in bits")
    common.add_argument("--rates", type=_floats, help="per-sensor rates in bits, spec order")
    common.add_argument("--step", type=float, help="grid step in bits")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--tol", type=float, help="solver tolerance")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--entropy-mode", dest="entropy_mode", choices=binary.ENTROPY_MODES)
    common.add_argument("--no-fallback", action="store_true", dest="no_fallback",
                        help="exit 3 instead of searching numerically when no water level exists")
    common.add_argument("--no-tie-rule", action="store_true", dest="no_tie_rule",
                        help="binary: count only strict likelihood-ratio errors (no half-mass ties)")
    common.add_argument("--verify", action="store_true", help="mdrf: add Monte Carlo and grid columns")
    common.add_argument("--workers", type=int, default=1, help="worker threads for sweeps/simulation")

    parser = argparse.ArgumentParser(prog="mdrf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("allocate", parents=[common], help="optimal rate allocation").set_defaults(func=cmd_allocate)
    sub.add_parser("mdrf", parents=[common], help="distortion at given rates").set_defaults(func=cmd_mdrf)
    sub.add_parser("simulate", parents=[common], help="Monte Carlo check at given rates").set_defaults(func=cmd_simulate)
    sub.add_parser("verify", parents=[common], help="oracle checks of the allocation").set_defaults(func=cmd_verify)
    sweep = sub.add_parser("sweep", parents=[common], help="figure data")
    sweep.add_argument("kind", choices=sweeps.SWEEP_KINDS)
    sweep.add_argument("--range", type=_range, required=True, help="START:STOP:NUM (inclusive)")
    sweep.add_argument("--gamma1", type=float, help="single_active: SNR of the better sensor")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
