"""Command-line front end.

Subcommands:
  example         reproduce the two-class worked example and check every value
  sweep KIND      emit figure data (precision | sophistication | outcomes | bias)
  simulate        Monte-Carlo estimator checks on sampled networks
  solve           solve one finite type system and dump per-type expectations
  pi              dump the interaction-expectation matrix as labeled CSV

Options may come from a config file of ``key = value`` lines (lists
comma-separated); flags override the file, which overrides the preset.
CSV output is comma-separated with a header row and LF line endings; every
CSV has a JSON twin carrying the same rows.  Files are written atomically.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import naive_curve, sigma_sweep, sophisticated_curve
from .behavior import best_response, expected_utility_under_truth, utility
from .equilibrium import (
    ConvergenceError,
    average_expectation,
    benchmark_expectation,
    infinite_naive,
    infinite_sophisticated,
    solve_direct,
)
from .estimators import NAIVE, SOPHISTICATED, bias_surface, debias_shares
from .netsim import (
    generate,
    monte_carlo_estimator_check,
    write_edgelist,
    write_metadata,
)
from .population import (
    DegreeModel,
    GameParams,
    ModelError,
    biased_neighbor_share,
)
from .typespace import build_pi, pi_csv_rows

PRESETS = {
    "example": {
        "model": "4,6:0.6,0.4",
        "etheta": "0.5",
        "alpha": "4",
        "c": "6",
    },
    "spread": {
        "model": "2,6:0.6,0.4",
        "etheta": "1",
        "alpha": "1.2",
        "c": "3.7",
        "eps": "2",
        "d1": "2,4,8,inf",
        "sigma": "0,0.5,1",
    },
}

SWEEP_KINDS = ("precision", "sophistication", "outcomes", "bias")


# ---------------------------------------------------------------------------
# Option resolution and parsing helpers
# ---------------------------------------------------------------------------

def _read_config(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class _Options:
    """Flag > config file > preset > built-in default."""

    def __init__(self, args):
        self.args = vars(args)
        self.config = _read_config(args.config) if getattr(args, "config", None) else {}
        preset = getattr(args, "preset", None)
        if preset is not None and preset not in PRESETS:
            raise ModelError(f"unknown preset {preset!r}; have {sorted(PRESETS)}")
        self.preset = PRESETS.get(preset, {})

    def get(self, key, default=None):
        flag = self.args.get(key)
        if flag is not None:
            return flag
        if key in self.config:
            return self.config[key]
        if key in self.preset:
            return self.preset[key]
        return default


def _scalar(text, exact=False):
    # exact mode parses through str so decimal literals become true rationals
    if exact:
        return Fraction(str(text))
    return float(text)


def _scalar_list(text) -> list:
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(part) for part in str(text).split(",") if part != ""]


def _d1_list(text):
    finite, infinite = [], False
    for part in str(text).split(","):
        part = part.strip()
        if part == "inf":
            infinite = True
        elif part:
            finite.append(int(part))
    return finite, infinite


def _parse_model(text, exact=False) -> DegreeModel:
    try:
        deg_part, share_part = str(text).split(":")
        degrees = tuple(int(d) for d in deg_part.split(","))
        shares = tuple(_scalar(s, exact) for s in share_part.split(","))
    except (ValueError, TypeError) as exc:
        raise ModelError(
            f"model argument {text!r} should look like '4,6:0.6,0.4'") from exc
    return DegreeModel(degrees, shares)


def _grid(count: int) -> np.ndarray:
    if count < 2:
        raise ModelError("grid needs at least two points")
    return np.linspace(0.0, 1.0, count)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _out_dir(opts) -> Path:
    out = opts.get("out") or os.environ.get("NETGAME_OUT") or "netgame-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _write_table(out: Path, name: str, columns, rows, meta) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    _atomic_write(out / f"{name}.csv", buf.getvalue())
    payload = {"command": name, "columns": list(columns), "rows": [list(r) for r in rows]}
    payload.update(meta)
    _atomic_write(out / f"{name}.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# example
# ---------------------------------------------------------------------------

def _example_checks(exact: bool) -> list:
    model = _parse_model(PRESETS["example"]["model"], exact)
    etheta = _scalar(PRESETS["example"]["etheta"], exact)
    alpha = _scalar(PRESETS["example"]["alpha"], exact)
    cost = _scalar(PRESETS["example"]["c"], exact)
    params = GameParams(etheta, alpha, cost, 1, model)
    d_lo, d_hi = model.degrees

    bench = benchmark_expectation(model, params)
    x_naive = infinite_naive(model, params)
    act_b_lo = best_response(etheta, d_lo, bench, model, params)
    act_b_hi = best_response(etheta, d_hi, bench, model, params)
    act_n_lo = best_response(etheta, d_lo, x_naive, model, params)
    act_n_hi = best_response(etheta, d_hi, x_naive, model, params)
    est_hi = debias_shares(biased_neighbor_share(model), model.degrees)[1]

    rational = [
        ("benchmark_expectation", bench, Fraction(15, 36)),
        ("all_naive_expectation", x_naive, Fraction(18, 36)),
        ("action_benchmark_low", act_b_lo, Fraction(13, 36)),
        ("action_benchmark_high", act_b_hi, Fraction(18, 36)),
        ("action_all_naive_low", act_n_lo, Fraction(15, 36)),
        ("action_all_naive_high", act_n_hi, Fraction(21, 36)),
        ("sophisticated_estimate_high", est_hi, Fraction(4, 10)),
    ]
    approx = [
        ("utility_benchmark_low",
         utility(act_b_lo, etheta, d_lo, bench, model, params), 0.3912),
        ("utility_benchmark_high",
         utility(act_b_hi, etheta, d_hi, bench, model, params), 0.75),
        ("expected_utility_naive_low",
         expected_utility_under_truth(act_n_lo, etheta, d_lo, bench, model, params),
         0.3819),
        ("expected_utility_naive_high",
         expected_utility_under_truth(act_n_hi, etheta, d_hi, bench, model, params),
         0.7291),
    ]
    checks = []
    for name, value, expected in rational:
        if exact:
            passed = value == expected
            tol = 0.0
        else:
            tol = 1e-12
            passed = abs(value - float(expected)) <= tol
        checks.append({
            "name": name,
            "value": str(value) if exact else float(value),
            "expected": str(expected) if exact else float(expected),
            "tolerance": tol,
            "mode": "exact" if exact else "approx",
            "passed": bool(passed),
        })
    for name, value, expected in approx:
        passed = abs(float(value) - expected) <= 5e-4
        checks.append({
            "name": name,
            "value": float(value),
            "expected": expected,
            "tolerance": 5e-4,
            "mode": "approx",
            "passed": bool(passed),
        })
    return checks


def cmd_example(args) -> int:
    checks = _example_checks(bool(args.exact))
    passed = all(c["passed"] for c in checks)
    if args.json:
        report = {"command": "example", "exact": bool(args.exact),
                  "passed": passed, "checks": checks}
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        width = max(len(c["name"]) for c in checks)
        for c in checks:
            status = "ok" if c["passed"] else "FAIL"
            print(f"{c['name']:<{width}}  {c['value']!s:>22}  "
                  f"expected {c['expected']!s:>10}  [{status}]")
        print("all checks passed" if passed else "CHECK FAILURES ABOVE")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_precision(opts, out: Path):
    eps = float(opts.get("eps", "2"))
    alpha = float(opts.get("alpha", "1.2"))
    cost = float(opts.get("c", "3.7"))
    etheta = float(opts.get("etheta", "1"))
    sigmas = _scalar_list(opts.get("sigma", "0,0.5,1"))
    finite, infinite = _d1_list(opts.get("d1", "2,4,8,inf"))
    grid = _grid(int(opts.get("grid", 41)))[1:-1]
    columns = ("sigma", "d1", "delta2", "rule", "value", "flag")
    rows = []
    for sigma in sigmas:
        solutions = {}
        for d1 in finite:
            d2 = d1 * (1 + eps)
            if abs(d2 - round(d2)) > 1e-9:
                raise ModelError(f"d1 = {d1} with eps = {eps}: non-integer top degree")
            model = DegreeModel((d1, int(round(d2))), (0.5, 0.5))
            params = GameParams(etheta, alpha, cost, sigma, model)
            solutions[d1] = (model, solve_direct(build_pi(model, params), params))
        for delta2 in map(float, grid):
            for d1 in finite:
                base_model, solution = solutions[d1]
                point = DegreeModel(base_model.degrees, (1 - delta2, delta2))
                for rule in (NAIVE, SOPHISTICATED):
                    rows.append((sigma, d1, delta2, rule,
                                 average_expectation(solution, point, rule=rule), ""))
                rows.append((sigma, d1, delta2, "all",
                             average_expectation(solution, point, sigma=sigma), ""))
            if infinite:
                try:
                    nv = naive_curve(delta2, eps, alpha, cost, etheta)
                    sv = sophisticated_curve(delta2, eps, alpha, cost, sigma, etheta)
                except ModelError:
                    rows.append((sigma, "inf", delta2, "all", "", "unstable"))
                    continue
                rows.append((sigma, "inf", delta2, NAIVE, float(nv), ""))
                rows.append((sigma, "inf", delta2, SOPHISTICATED, float(sv), ""))
                rows.append((sigma, "inf", delta2, "all",
                             float((1 - sigma) * nv + sigma * sv), ""))
    meta = {"eps": eps, "alpha": alpha, "c": cost, "etheta": etheta,
            "sigmas": sigmas, "d1": finite + (["inf"] if infinite else [])}
    _write_table(out, "precision", columns, rows, meta)
    return rows


def _sweep_sophistication(opts, out: Path):
    model = _parse_model(opts.get("model", PRESETS["example"]["model"]))
    alpha = float(opts.get("alpha", PRESETS["example"]["alpha"]))
    cost = float(opts.get("c", PRESETS["example"]["c"]))
    etheta = float(opts.get("etheta", PRESETS["example"]["etheta"]))
    sigmas = _grid(int(opts.get("grid", 101)))
    columns = ("sigma", "naive", "sophisticated", "benchmark")
    rows = [(r.sigma, r.naive, r.sophisticated, r.benchmark)
            for r in sigma_sweep(model, alpha, cost, etheta, sigmas)]
    meta = {"model": opts.get("model", PRESETS["example"]["model"]),
            "alpha": alpha, "c": cost, "etheta": etheta}
    _write_table(out, "sophistication", columns, rows, meta)
    return rows


def _sweep_outcomes(opts, out: Path):
    model = _parse_model(opts.get("model", PRESETS["example"]["model"]))
    alpha = float(opts.get("alpha", PRESETS["example"]["alpha"]))
    cost = float(opts.get("c", PRESETS["example"]["c"]))
    etheta = float(opts.get("etheta", PRESETS["example"]["etheta"]))
    sigmas = _grid(int(opts.get("grid", 101)))
    columns = ("sigma", "rule", "degree", "action", "expected_utility")
    rows = []
    for sigma in sigmas:
        params = GameParams(etheta, alpha, cost, float(sigma), model)
        bench = benchmark_expectation(model, params)
        held = {
            NAIVE: infinite_naive(model, params),
            SOPHISTICATED: infinite_sophisticated(model, params),
            "benchmark": bench,
        }
        for rule, expectation in held.items():
            for d in model.degrees:
                action = best_response(etheta, d, expectation, model, params)
                eu = expected_utility_under_truth(action, etheta, d, bench,
                                                  model, params)
                rows.append((float(sigma), rule, d, float(action), float(eu)))
    meta = {"model": opts.get("model", PRESETS["example"]["model"]),
            "alpha": alpha, "c": cost, "etheta": etheta}
    _write_table(out, "outcomes", columns, rows, meta)
    return rows


def _sweep_bias(opts, out: Path):
    eps_list = _scalar_list(opts.get("eps", "1,99"))
    grid = _grid(int(opts.get("grid", 1001)))
    columns = ("eps", "delta2", "bias")
    rows = []
    summary = []
    for eps in eps_list:
        pairs = bias_surface(eps, grid=[float(x) for x in grid])
        rows.extend((eps, x, b) for x, b in pairs)
        best = max(pairs, key=lambda p: p[1])
        summary.append({"eps": eps, "argmax": best[0], "max_bias": best[1]})
    meta = {"eps": eps_list, "summary": summary}
    _write_table(out, "bias", columns, rows, meta)
    for item in summary:
        print(f"eps={item['eps']:g}: max bias {item['max_bias']:.4f} "
              f"at delta2={item['argmax']:.4f}")
    return rows


def cmd_sweep(args) -> int:
    opts = _Options(args)
    out = _out_dir(opts)
    runner = {
        "precision": _sweep_precision,
        "sophistication": _sweep_sophistication,
        "outcomes": _sweep_outcomes,
        "bias": _sweep_bias,
    }[args.kind]
    rows = runner(opts, out)
    print(f"wrote {len(rows)} rows to {out / (args.kind + '.csv')}")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    opts = _Options(args)
    model = _parse_model(opts.get("model", PRESETS["example"]["model"]))
    n = int(opts.get("n", 100000))
    trials = int(opts.get("trials", 20))
    seed = int(opts.get("seed", 0))
    simple = bool(opts.get("simple", False))
    tol = float(opts.get("tol", 0.01))

    report = monte_carlo_estimator_check(model, n, trials=trials, seed=seed,
                                         simple=simple)
    naive_hits = int(np.sum(
        np.abs(report.naive_estimates[:, -1] - report.predicted_naive[-1]) <= tol))
    soph_hits = int(np.sum(
        np.abs(report.sophisticated_estimates[:, -1]
               - report.predicted_sophisticated[-1]) <= tol))
    passed = naive_hits == trials and soph_hits == trials

    payload = {
        "command": "simulate",
        "n": n,
        "trials": trials,
        "seed": seed,
        "mode": "simple" if simple else "multigraph",
        "tolerance": tol,
        "predicted_naive_high": report.predicted_naive[-1],
        "predicted_sophisticated_high": report.predicted_sophisticated[-1],
        "naive_high_per_trial": [float(v) for v in report.naive_estimates[:, -1]],
        "sophisticated_high_per_trial": [
            float(v) for v in report.sophisticated_estimates[:, -1]],
        "naive_high_mean": float(report.naive_mean[-1]),
        "sophisticated_high_mean": float(report.sophisticated_mean[-1]),
        "naive_trials_within_tol": naive_hits,
        "sophisticated_trials_within_tol": soph_hits,
        "assortativity": [float(v) for v in report.assortativity],
        "node_estimate_sd": {
            f"{rule}:d{d}": sd for (rule, d), sd in sorted(report.node_estimate_sd.items())
        },
        "passed": bool(passed),
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.json:
        print(text, end="")
    else:
        print(f"naive high-share mean {payload['naive_high_mean']:.4f} "
              f"(predicted {payload['predicted_naive_high']:.4f}, "
              f"{naive_hits}/{trials} trials within {tol})")
        print(f"sophisticated high-share mean "
              f"{payload['sophisticated_high_mean']:.4f} "
              f"(predicted {payload['predicted_sophisticated_high']:.4f}, "
              f"{soph_hits}/{trials} trials within {tol})")
        print(f"assortativity mean {float(np.mean(report.assortativity)):+.4f}")
        print("all checks passed" if passed else "CHECK FAILURES")
    if opts.get("out") or os.environ.get("NETGAME_OUT"):
        out = _out_dir(opts)
        _atomic_write(out / "simulate.json", text)
        net = generate(model, n, seed=[seed, 0], simple=simple)
        write_edgelist(net, out / "edges.txt")
        write_metadata(net, out / "edges.meta.json")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    opts = _Options(args)
    model = _parse_model(opts.get("model", PRESETS["spread"]["model"]))
    alpha = float(opts.get("alpha", PRESETS["spread"]["alpha"]))
    cost = float(opts.get("c", PRESETS["spread"]["c"]))
    etheta = float(opts.get("etheta", PRESETS["spread"]["etheta"]))
    sigma = float(opts.get("sigma", 0.5))
    params = GameParams(etheta, alpha, cost, sigma, model)
    solution = solve_direct(build_pi(model, params), params)
    columns = ("label", "rule", "degree", "observed", "expectation")
    rows = [
        (t.label, t.rule, t.degree,
         "/".join(repr(float(v)) for v in t.observed.values), float(x))
        for t, x in zip(solution.system.types, solution.xi)
    ]
    meta = {"model": opts.get("model", PRESETS["spread"]["model"]),
            "alpha": alpha, "c": cost, "etheta": etheta, "sigma": sigma,
            "method": solution.method, "residual": solution.residual}
    out = _out_dir(opts)
    _write_table(out, "solution", columns, rows, meta)
    print(f"wrote {len(rows)} per-type expectations to {out / 'solution.csv'}")
    return 0


# ---------------------------------------------------------------------------
# pi
# ---------------------------------------------------------------------------

def cmd_pi(args) -> int:
    opts = _Options(args)
    model = _parse_model(opts.get("model", "2,4:0.5,0.5"))
    sigma = float(opts.get("sigma", 1))
    alpha = float(opts.get("alpha", 1))
    default_cost = 2.0 * alpha * model.degrees[-1] / model.degrees[0]
    cost = float(opts.get("c", default_cost))
    params = GameParams(float(opts.get("etheta", 1)), alpha, cost, sigma, model)
    system = build_pi(model, params)
    rows = pi_csv_rows(system)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    if opts.get("out") or os.environ.get("NETGAME_OUT"):
        out = _out_dir(opts)
        _atomic_write(out / "pi.csv", buf.getvalue())
        print(f"wrote {system.L}x{system.L} matrix to {out / 'pi.csv'}")
    else:
        print(buf.getvalue(), end="")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netgame",
        description="Network-game equilibria under degree-biased neighbor sampling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value option file")
        p.add_argument("--preset", help=f"one of {sorted(PRESETS)}")
        p.add_argument("--out", help="output directory (default $NETGAME_OUT)")
        p.add_argument("--json", action="store_true", help="machine-readable stdout")

    p_example = sub.add_parser("example", help="check the worked example values")
    p_example.add_argument("--exact", action="store_true",
                           help="exact rational arithmetic")
    p_example.add_argument("--json", action="store_true")
    p_example.set_defaults(func=cmd_example)

    p_sweep = sub.add_parser("sweep", help="emit figure data as CSV + JSON")
    p_sweep.add_argument("kind", choices=SWEEP_KINDS)
    common(p_sweep)
    p_sweep.add_argument("--model", help="degrees:shares, e.g. 4,6:0.6,0.4")
    p_sweep.add_argument("--alpha")
    p_sweep.add_argument("--c")
    p_sweep.add_argument("--etheta")
    p_sweep.add_argument("--sigma", help="comma-separated sophistication shares")
    p_sweep.add_argument("--d1", help="comma-separated lowest degrees, 'inf' allowed")
    p_sweep.add_argument("--eps", help="excess ratio(s)")
    p_sweep.add_argument("--grid", help="grid point count")
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo estimator checks")
    common(p_sim)
    p_sim.add_argument("--model")
    p_sim.add_argument("--n")
    p_sim.add_argument("--trials")
    p_sim.add_argument("--seed")
    p_sim.add_argument("--tol")
    p_sim.add_argument("--simple", action="store_true",
                       help="repair self-loops and multi-edges")
    p_sim.set_defaults(func=cmd_simulate)

    p_solve = sub.add_parser("solve", help="solve one finite type system")
    common(p_solve)
    p_solve.add_argument("--model")
    p_solve.add_argument("--sigma")
    p_solve.add_argument("--alpha")
    p_solve.add_argument("--c")
    p_solve.add_argument("--etheta")
    p_solve.set_defaults(func=cmd_solve)

    p_pi = sub.add_parser("pi", help="dump the expectation matrix as CSV")
    common(p_pi)
    p_pi.add_argument("--model")
    p_pi.add_argument("--sigma")
    p_pi.add_argument("--alpha")
    p_pi.add_argument("--c")
    p_pi.add_argument("--etheta")
    p_pi.set_defaults(func=cmd_pi)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
