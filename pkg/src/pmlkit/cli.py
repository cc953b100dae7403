"""Command-line front end.

Subcommands: ``compute`` (leakage profiles), ``verify`` (adversary
oracles against the pipeline), ``continuous`` (closed-form families),
``tail`` (exceedance probabilities).  Reports are deterministic JSON on
stdout; ``--format csv`` switches the profile/tail tables to CSV.

Exit codes: 0 success, 1 validation failure, 2 oracle-guarantee
violation, 3 capacity/capability error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .continuous import ClosedFormModel, GridSpec, pml_closed_form, pml_density, to_density_model
from .distributions import Alphabet, JointModel
from .errors import CapabilityError, CapacityError, PmlError
from .leakage import (
    LeakageProfile,
    leakage_profile,
    pml,
    tail_probability,
)
from .modelio import jsonable, load_model, profile_document
from .oracles import (
    GainFunction,
    gain_ratio,
    partition_oracle,
    randomized_function_oracle,
    randomized_strategy_check,
    subset_oracle,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ORACLE = 2
EXIT_CAPACITY = 3

GAP_TOL = 1e-10


def _thread_count() -> int:
    raw = os.environ.get("PMLKIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise PmlError(f"PMLKIT_THREADS must be an integer, got {raw!r}") from None
    if n == 0:
        return os.cpu_count() or 1
    if n < 0:
        raise PmlError("PMLKIT_THREADS must be >= 0")
    return n


def _profile(model: JointModel) -> LeakageProfile:
    threads = _thread_count()
    outcomes = model.output_alphabet
    if threads <= 1:
        return leakage_profile(model)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        leakages = tuple(pool.map(lambda y: pml(model, y), outcomes.symbols))
    return LeakageProfile(outcomes, leakages, model.marginal)


def _header(args, model: JointModel = None) -> dict:
    head = {
        "tool": "pmlkit",
        "version": __version__,
        "units": getattr(args, "units", "nats"),
        "seed": getattr(args, "seed", 42),
    }
    if model is not None:
        head["truncation_deficit"] = model.prior.truncation_deficit
    return head


def _emit(args, document: dict) -> None:
    text = json.dumps(jsonable(document), indent=2, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, header_row, rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(header_row) + "\n")
    for row in rows:
        buf.write(",".join("inf" if isinstance(c, float) and math.isinf(c) else str(c) for c in row) + "\n")
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def cmd_compute(args) -> int:
    model = load_model(args.channel, args.prior)
    units = args.units
    if args.outcome is not None:
        y = _parse_outcome(args.outcome, model.output_alphabet)
        value = pml(model, y)
        doc = _header(args, model)
        doc.update({"command": "compute", "outcome": y, "leakage": value.in_units(units)})
        _emit(args, doc)
        return EXIT_OK
    profile = _profile(model)
    if args.format == "csv":
        rows = [
            (y, w, lv.in_units(units))
            for y, w, lv in zip(profile.outcomes.symbols, profile.weights.probs, profile.leakages)
        ]
        _emit_csv(args, ("outcome", "p_y", f"leakage_{units}"), rows)
        return EXIT_OK
    doc = _header(args, model)
    doc["command"] = "compute"
    doc["profile"] = profile_document(profile, units)
    _emit(args, doc)
    return EXIT_OK


def _parse_outcome(raw: str, alphabet: Alphabet):
    if raw in alphabet:
        return raw
    try:
        as_int = int(raw)
    except ValueError:
        as_int = None
    if as_int is not None and as_int in alphabet:
        return as_int
    return raw  # let the lookup raise a named error


def _random_gain(rng, model: JointModel) -> GainFunction:
    d = int(rng.integers(1, 5))
    labels = [f"w{i}" for i in range(d)]
    gains = rng.uniform(0.0, 1.0, size=(model.input_alphabet.size, d))
    return GainFunction(model.input_alphabet, Alphabet(labels), gains)


def cmd_verify(args) -> int:
    model = load_model(args.channel, args.prior)
    rng = np.random.default_rng(args.seed)
    gains = [_random_gain(rng, model) for _ in range(args.gains)]
    rows = []
    all_ok = True
    lower_bound_mode = False
    for y, w in zip(model.output_alphabet.symbols, model.marginal.probs):
        if w <= 0:
            continue
        value = pml(model, y).nats
        row = {"outcome": y, "p_y": float(w), "pml": value}
        if args.oracle == "subset":
            oracle = subset_oracle(model, y)
            gap = 0.0 if math.isinf(value) and math.isinf(oracle) else value - oracle
            ok = abs(gap) <= GAP_TOL
        elif args.oracle == "partition":
            oracle = partition_oracle(model, y, args.eps)
            gap = value - oracle
            ok = -1e-12 <= gap <= args.eps + 1e-12
        elif args.oracle == "functions":
            k = min(args.max_groups, model.input_alphabet.size)
            oracle = randomized_function_oracle(model, y, k)
            gap = value - oracle
            if k >= model.input_alphabet.size:
                ok = abs(gap) <= GAP_TOL
            else:
                lower_bound_mode = True
                ok = gap >= -GAP_TOL
        else:  # strategies
            checks = [randomized_strategy_check(model, y, g, args.resolution) for g in gains]
            bounded = [
                math.log(gain_ratio(model, y, g)) <= value + GAP_TOL for g in gains
            ]
            oracle = value
            gap = 0.0
            ok = all(checks) and all(bounded)
        row.update({"oracle": oracle, "gap": gap, "ok": ok})
        rows.append(row)
        all_ok = all_ok and ok
    doc = _header(args, model)
    doc.update(
        {
            "command": "verify",
            "oracle": args.oracle,
            "parameters": {
                "eps": args.eps,
                "max_groups": args.max_groups,
                "gains": args.gains,
                "resolution": args.resolution,
            },
            "lower_bound": lower_bound_mode,
            "rows": rows,
            "all_ok": all_ok,
        }
    )
    _emit(args, doc)
    return EXIT_OK if all_ok else EXIT_ORACLE


def _load_spec(raw: str) -> dict:
    text = raw.strip()
    if not text.startswith("{"):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def cmd_continuous(args) -> int:
    spec = _load_spec(args.family)
    model = ClosedFormModel(spec["family"], spec.get("params", {}))
    y = float(args.outcome)
    closed = pml_closed_form(model, y)
    doc = _header(args)
    doc.update(
        {
            "command": "continuous",
            "family": model.family,
            "params": dict(model.params),
            "outcome": y,
            "closed_form": closed.in_units(args.units),
        }
    )
    if args.check_grid:
        grid = GridSpec(**_load_spec(args.grid)) if args.grid else GridSpec()
        doc["grid"] = grid.to_dict()
        try:
            density = to_density_model(model, grid.quantile_clip)
        except CapabilityError as exc:
            doc["grid_check"] = {"error": str(exc)}
            _emit(args, doc)
            return EXIT_CAPACITY
        result = pml_density(density, y, grid)
        doc["grid_check"] = {
            "value": result.value.in_units(args.units),
            "gap": closed.in_units(args.units) - result.value.in_units(args.units),
            "argmax_x": result.argmax_x,
        }
    _emit(args, doc)
    return EXIT_OK


def cmd_tail(args) -> int:
    model = load_model(args.channel, args.prior)
    profile = _profile(model)
    ln2 = math.log(2.0)
    scale = 1.0 if args.units == "nats" else 1.0 / ln2
    rows = []
    for eps in args.eps:
        eps_nats = eps if args.units == "nats" else eps * ln2
        rows.append({"eps": eps, "tail_probability": tail_probability(profile, eps_nats)})
    values = sorted({lv.nats for lv in profile.leakages})
    cdf = [1.0 - tail_probability(profile, v) for v in values]
    if args.format == "csv":
        _emit_csv(
            args,
            ("eps", "tail_probability"),
            [(r["eps"], r["tail_probability"]) for r in rows],
        )
        return EXIT_OK
    doc = _header(args, model)
    doc.update(
        {
            "command": "tail",
            "rows": rows,
            "cdf": {"leakage": [v * scale for v in values], "probability": cdf},
        }
    )
    _emit(args, doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmlkit",
        description="Per-outcome information leakage for discrete channels and density models.",
    )
    parser.add_argument("--version", action="version", version=f"pmlkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_args(p):
        p.add_argument("channel", help="model JSON file, or channel CSV (with PRIOR)")
        p.add_argument("prior", nargs="?", default=None, help="prior CSV for CSV channels")
        p.add_argument("--units", choices=("nats", "bits"), default="nats")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--output", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("compute", help="leakage profile or a single outcome's leakage")
    add_model_args(p)
    p.add_argument("--outcome", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="check the pipeline against a brute-force adversary")
    add_model_args(p)
    p.add_argument(
        "--oracle",
        required=True,
        choices=("subset", "partition", "functions", "strategies"),
    )
    p.add_argument("--eps", type=float, default=0.05, help="partition oracle band")
    p.add_argument("--max-groups", type=int, default=5, dest="max_groups")
    p.add_argument("--gains", type=int, default=20, help="random gain functions for strategies")
    p.add_argument("--resolution", type=int, default=20, help="simplex grid resolution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("continuous", help="closed-form families, optionally grid-checked")
    p.add_argument("--family", required=True, help="family spec JSON (inline or a file path)")
    p.add_argument("--outcome", required=True, type=float)
    p.add_argument("--grid", default=None, help="grid spec JSON (inline or a file path)")
    p.add_argument("--check-grid", action="store_true", dest="check_grid")
    p.add_argument("--units", choices=("nats", "bits"), default="nats")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_continuous)

    p = sub.add_parser("tail", help="P(leakage > eps) table and the leakage CDF")
    add_model_args(p)
    p.add_argument("--eps", type=float, action="append", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_tail)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, CapabilityError) as exc:
        print(f"pmlkit: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except PmlError as exc:
        print(f"pmlkit: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"pmlkit: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
