"""Command-line experiment runner.

Every command writes one report (JSON) or table (CSV). Reports record the
parameters, seed, budget and tolerance next to the values; the wall time is
kept in a separate ``runtime_ms`` field so that report bodies can be compared
byte for byte (``--no-timing`` zeroes it).

Exit codes: 0 success, 2 validation error, 3 a probe's assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import diagonals as gd
from . import idealnorms as idn
from .operators import ExactUnavailable, LinearMap, banach_mazur_search, operator_norm
from .spaces import INF, DimensionMismatch, Lp, TsirelsonTrunc, cotype2_ratio, space_from_json
from .tensor import TensorDecomposition, improve_decomposition, projective_lower, projective_upper
from .tsirelson import FinSupp, tp_norm, tstar_level, tstar_witness
from .tsirelson.probes import block_lp_probe, co_condition2_probe

EXIT_OK, EXIT_INVALID, EXIT_PROBE = 0, 2, 3
TABLE_COLUMNS = ("value", "lower", "upper", "gap", "seed", "runtime_ms")


class ValidationError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    options: dict = field(default_factory=dict)
    seed: int = 0
    budget: int = 200
    tol: float = 1e-9
    output: Optional[str] = None
    format: str = "json"

    def argv(self) -> list[str]:
        args = self.command.split()
        for key, val in self.options.items():
            flag = "--" + key.replace("_", "-")
            if val is True:
                args.append(flag)
            elif val is not False and val is not None:
                args += [flag, str(val)]
        args += ["--seed", str(self.seed), "--budget", str(self.budget), "--tol", repr(self.tol),
                 "--format", self.format]
        if self.output:
            args += ["--output", self.output]
        return args


# ---------------------------------------------------------------------------
# parsing helpers


def _num(s: str):
    s = s.strip()
    if s in ("inf", "+inf", "oo"):
        return INF
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def parse_numbers(text: str) -> list:
    return [_num(t) for t in text.split(",") if t.strip()]


def parse_ints(text: str) -> list[int]:
    vals = parse_numbers(text)
    if any(not isinstance(v, int) for v in vals):
        raise ValidationError(f"expected integers, got {text!r}")
    return vals


def parse_p(text: str) -> float:
    v = _num(text)
    return float(v)


def _load_json(arg: str):
    if os.path.exists(arg):
        with open(arg) as fh:
            return json.load(fh)
    return json.loads(arg)


def parse_space(arg: str):
    """A JSON file, inline JSON, or shorthand ``lp:DIM:P`` / ``tsirelson:P:N``."""
    text = arg.strip()
    if text.startswith("lp:"):
        _, dim, p = text.split(":")
        return Lp(int(dim), parse_p(p))
    if text.startswith("tsirelson:"):
        parts = text.split(":")
        return TsirelsonTrunc(parse_p(parts[1]), int(parts[2]), *(parts[3:4] or ["nonstrict"]))
    return space_from_json(_load_json(text))


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _row(params: dict, value, lower=None, upper=None, seed=0, exact=False, extra=None) -> dict:
    lower = value if lower is None else lower
    upper = value if upper is None else upper
    gap = 0.0 if exact else float(upper) - float(lower)
    row = {"params": params, "value": value, "lower": lower, "upper": upper, "gap": gap, "seed": seed,
           "runtime_ms": 0}
    if extra:
        row["extra"] = extra
    return row


def emit_table(reports: Sequence[dict]) -> str:
    """CSV with one row per report: parameter columns, then the fixed value columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if not reports:
        writer.writerow(TABLE_COLUMNS)
        return buf.getvalue()
    keys = list(reports[0]["params"].keys())
    for r in reports:
        if list(r["params"].keys()) != keys or any(c not in r for c in TABLE_COLUMNS):
            raise ValidationError("reports do not share a schema")
    writer.writerow(keys + list(TABLE_COLUMNS))
    for r in reports:
        cells = [_jsonable(r["params"][k]) for k in keys] + [_jsonable(r[c]) for c in TABLE_COLUMNS]
        writer.writerow(["" if c is None else c for c in cells])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# command handlers: each returns (body, rows or None, exit status)


def _space_norm(args, dual=False):
    X = parse_space(args.space)
    v = np.array(parse_numbers(args.vector), dtype=object)
    if len(v) != X.dim:
        raise DimensionMismatch(f"vector has {len(v)} entries, space has dim {X.dim}")
    if not all(isinstance(a, (int, Fraction)) for a in v):
        v = v.astype(float)
    elif not args.exact:
        v = v.astype(float)
    else:
        v = np.array([Fraction(a) for a in v], dtype=object)
    est = X.dual_estimate(v) if dual else X.norm_estimate(v)
    if args.exact and not est.exact:
        raise ValidationError("an exact value is not available for this space")
    body = {"space": X.to_json(), "vector": [str(a) for a in v], "value": est.value, "lower": est.lower,
            "upper": est.upper, "exact": est.exact}
    return body, None, EXIT_OK


def cmd_norm(args):
    return _space_norm(args)


def cmd_dualnorm(args):
    return _space_norm(args, dual=True)


def cmd_opnorm(args):
    T = LinearMap.from_json(_load_json(args.map))
    try:
        est = operator_norm(T, mode="exact" if args.exact else "auto", budget=args.budget, seed=args.seed)
    except ExactUnavailable as exc:
        raise ValidationError(str(exc)) from exc
    w = est.witness or {}
    body = {"value": est.value, "lower": est.lower, "upper": est.upper, "gap": est.gap, "exact": est.exact,
            "route": w.get("route"), "attaining_vector": w.get("x")}
    return body, None, EXIT_OK


def cmd_projnorm(args):
    D = TensorDecomposition.from_json(_load_json(args.decomposition))
    before = projective_upper(D)
    if args.improve:
        D = improve_decomposition(D, budget=args.budget, seed=args.seed)
    up = projective_upper(D)
    lo = projective_lower(D, budget=8, seed=args.seed)
    body = {"upper": up.upper, "representation_value": up.value, "initial_value": before.value,
            "lower": lo, "gap": float(up.upper) - lo, "terms": len(D)}
    if args.show_decomposition:
        body["decomposition"] = D.to_json()
    return body, None, EXIT_OK


def _gd_body(D, args, extra=None):
    rep = gd.verify_gd(D, tol=max(args.tol, 1e-10))
    up = projective_upper(D)
    lo = projective_lower(D, budget=4, seed=args.seed)
    body = {"terms": len(D), "verify": rep.as_dict(), "upper": up.upper, "upper_exact": up.exact,
            "lower": lo, "gap": float(up.upper) - lo}
    body.update(extra or {})
    status = EXIT_OK if rep.commutes and rep.unit else EXIT_PROBE
    return body, None, status


def cmd_gd_cyclic(args):
    return _gd_body(gd.signed_cyclic_diagonal(args.n, parse_p(args.p)), args, {"n": args.n, "p": args.p})


def cmd_gd_lpq(args):
    nks = parse_ints(args.nks)
    D = gd.lpq_gd(nks, args.i, parse_p(args.p), parse_p(args.q))
    return _gd_body(D, args, {"nks": nks, "i": args.i, "p": args.p, "q": args.q, "X": D.X.to_json(),
                              "Y": D.Y.to_json()})


def cmd_gd_assemble(args):
    Dm = gd.signed_cyclic_diagonal(args.e_n, parse_p(args.e_p))
    dX = gd.signed_cyclic_diagonal(args.x_n, parse_p(args.x_p))
    D = gd.assemble_tensor_diagonal(Dm, dX)
    return _gd_body(D, args, {"e_n": args.e_n, "e_p": args.e_p, "x_n": args.x_n, "x_p": args.x_p})


def cmd_gd_minimize(args):
    X = parse_space(args.x)
    Y = parse_space(args.y) if args.y else X
    res = gd.min_gd_norm(X, Y, budget=min(args.budget, 60), seed=args.seed)
    body = {"X": X.to_json(), "Y": Y.to_json(), "coeffs": [str(c) for c in res.coeffs],
            "upper": res.upper, "lower": res.lower, "gap": res.upper - res.lower}
    return body, None, EXIT_OK


def cmd_gd_verify(args):
    D = TensorDecomposition.from_json(_load_json(args.decomposition))
    return _gd_body(D, args)


def _family(args):
    if args.through_space:
        return parse_space(args.through_space)
    if args.through != "lp":
        raise ValidationError(f"unknown family {args.through!r}")
    return ("lp", parse_p(args.p))


def cmd_gamma(args):
    T = LinearMap.from_json(_load_json(args.target))
    f = idn.gamma_upper(T, _family(args), budget=args.budget, seed=args.seed)
    body = f.as_dict()
    body["operator_norm"] = f.lower
    return body, None, EXIT_OK


def cmd_zn_demo(args):
    rows = []
    p = parse_p(args.p)
    for n in parse_ints(args.n):
        rep = idn.zn_counterexample(n, p, budget=args.budget, seed=args.seed)
        # one row per n; value is the exploratory gamma-upper of P1 + P2 (floor ||P1 + P2|| = 1)
        rows.append(_row({"n": n, "p": p, "gamma_P1": rep["gamma_P1"], "gamma_P2": rep["gamma_P2"]},
                         rep["gamma_sum"], 1.0, rep["gamma_sum"], args.seed))
    return None, rows, EXIT_OK


def cmd_pi_probe(args):
    Y = parse_space(args.space)
    table = idn.pi_rep_probe(Y, _family(args), parse_ints(args.n), budget=args.budget, seed=args.seed)
    rows = [_row({"n": r["n"], "found": r["found"]}, r["value"], 1.0, r["value"], args.seed) for r in table]
    return None, rows, EXIT_OK


def cmd_tnorm(args):
    coeffs = parse_numbers(args.coeffs)
    p = parse_p(args.p)
    rational = all(isinstance(c, (int, Fraction)) for c in coeffs)
    if args.exact and (p != 1 or not rational):
        raise ValidationError("exact mode needs p = 1 and rational coefficients")
    vals = [Fraction(c) for c in coeffs] if rational and p == 1 else [float(c) for c in coeffs]
    x = FinSupp.from_coeffs(vals, p=p)
    if len(x.support) > 24:
        raise ValidationError("support larger than 24")
    value = tp_norm(x, p)
    body = {"coeffs": [str(c) for c in vals], "p": p, "value": value}
    if p == 1:
        level = 0
        while tstar_level(x, level) != value and level <= len(x.support):
            level += 1
        body["stabilization_level"] = level
        body["witness"] = tstar_witness(x).describe()
    return body, None, EXIT_OK


def _random_block_probe(rng, p):
    k = int(rng.integers(1, 5))
    start = int(rng.integers(k, k + 6))
    blocks = []
    pos = start
    for _ in range(k):
        length = int(rng.integers(1, 4))
        raw = rng.integers(1, 5, size=length)
        if p == 1:
            entries = {pos + i: Fraction(int(a)) for i, a in enumerate(raw)}
            y = FinSupp(entries, p=1)
            nrm = tp_norm(y, 1)
            y = FinSupp({i: a / nrm for i, a in entries.items()}, p=1)
        else:
            entries = {pos + i: float(a) for i, a in enumerate(raw)}
            y = FinSupp(entries, p=p)
            nrm = float(tp_norm(y, p))
            y = FinSupp({i: a / nrm for i, a in entries.items()}, p=p)
        blocks.append(y)
        pos += length + int(rng.integers(0, 2))
    if p == 1:
        coeffs = [int(c) for c in rng.integers(-4, 5, size=k)]
        if not any(coeffs):
            coeffs[0] = 1
    else:
        coeffs = list(rng.standard_normal(k))
    return blocks, coeffs


def cmd_tprobe_co1(args):
    p = parse_p(args.p)
    rng = np.random.default_rng(args.seed)
    rows, failed = [], 0
    for i in range(args.count):
        blocks, coeffs = _random_block_probe(rng, p)
        rep = block_lp_probe(blocks, coeffs, p)
        failed += not rep.passed
        rows.append(_row({"probe": i, "p": p, "k": len(blocks), "passed": rep.passed}, rep.ratio,
                         rep.lower_bound, rep.upper_bound if rep.upper_bound is not None else INF, args.seed))
    return None, rows, EXIT_PROBE if failed else EXIT_OK


def cmd_tprobe_co2(args):
    p = parse_p(args.p)
    rows = []
    for n in parse_ints(args.n):
        rep = co_condition2_probe(n, p, max(args.K, n), budget=min(args.budget, 20), seed=args.seed)
        rows.append(_row({"n": n, "p": p, "K": rep["K"]}, rep["upper"], 1.0, rep["upper"], args.seed))
    return None, rows, EXIT_OK


def cmd_bm_dist(args):
    X, Y = parse_space(args.x), parse_space(args.y)
    est = banach_mazur_search(X, Y, budget=min(args.budget, 64), seed=args.seed)
    body = {"X": X.to_json(), "Y": Y.to_json(), "value": est.value, "lower": est.lower, "upper": est.upper,
            "exact": est.exact, "map": est.witness}
    return body, None, EXIT_OK


def cmd_cotype2(args):
    X = parse_space(args.space)
    vectors = [parse_numbers(v) for v in args.vectors.split(";") if v.strip()]
    vectors = [np.array([float(a) for a in v]) for v in vectors]
    value = cotype2_ratio(X, vectors)
    return {"space": X.to_json(), "count": len(vectors), "value": value}, None, EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=200)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--exact", action="store_true", help="require exact (rational) values")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--no-timing", action="store_true", help="report runtime_ms as 0")

    parser = argparse.ArgumentParser(prog="gdlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, parent=sub, **kw):
        p = parent.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    for name, func in (("norm", cmd_norm), ("dualnorm", cmd_dualnorm)):
        p = add(name, func)
        p.add_argument("--space", required=True)
        p.add_argument("--vector", required=True)
    add("opnorm", cmd_opnorm).add_argument("--map", required=True)
    p = add("projnorm", cmd_projnorm)
    p.add_argument("--decomposition", required=True)
    p.add_argument("--improve", action="store_true")
    p.add_argument("--show-decomposition", action="store_true")

    g = sub.add_parser("gd").add_subparsers(dest="gd_command", required=True)
    p = add("cyclic", cmd_gd_cyclic, g)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", default="2")
    p = add("lpq", cmd_gd_lpq, g)
    p.add_argument("--nks", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--p", default="1")
    p.add_argument("--q", default="inf")
    p = add("assemble", cmd_gd_assemble, g)
    for flag, default in (("--e-n", 2), ("--x-n", 2)):
        p.add_argument(flag, type=int, default=default)
    p.add_argument("--e-p", default="1")
    p.add_argument("--x-p", default="2")
    p = add("minimize", cmd_gd_minimize, g)
    p.add_argument("--x", required=True)
    p.add_argument("--y")
    add("verify", cmd_gd_verify, g).add_argument("--decomposition", required=True)

    for name, func in (("gamma", cmd_gamma), ("pi-probe", cmd_pi_probe)):
        p = add(name, func)
        p.add_argument("--through", default="lp")
        p.add_argument("--through-space")
        p.add_argument("--p", default="2")
    sub.choices["gamma"].add_argument("--target", required=True)
    sub.choices["pi-probe"].add_argument("--space", required=True)
    sub.choices["pi-probe"].add_argument("--n", required=True)
    p = add("zn-demo", cmd_zn_demo)
    p.add_argument("--n", default="1,2,4")
    p.add_argument("--p", default="4")
    p = add("tnorm", cmd_tnorm)
    p.add_argument("--coeffs", required=True)
    p.add_argument("--p", default="1")

    t = sub.add_parser("tprobe").add_subparsers(dest="tprobe_command", required=True)
    p = add("co1", cmd_tprobe_co1, t)
    p.add_argument("--p", default="1")
    p.add_argument("--count", type=int, default=50)
    p = add("co2", cmd_tprobe_co2, t)
    p.add_argument("--n", default="1,2,3")
    p.add_argument("--p", default="1")
    p.add_argument("--K", type=int, default=4)

    p = add("bm-dist", cmd_bm_dist)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p = add("cotype2", cmd_cotype2)
    p.add_argument("--space", required=True)
    p.add_argument("--vectors", required=True, help="semicolon-separated vectors, e.g. '1,0;0,1'")
    return parser


def _command_name(args) -> str:
    parts = [args.command]
    for attr in ("gd_command", "tprobe_command"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def _config_dict(args) -> dict:
    skip = {"func", "command", "gd_command", "tprobe_command", "output", "no_timing", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render(args, body, rows, runtime_ms: int) -> str:
    if rows is not None:
        for r in rows:
            r["runtime_ms"] = runtime_ms
        if args.format == "csv":
            return emit_table(rows)
        report = {"command": _command_name(args), "config": _config_dict(args), "rows": rows,
                  "runtime_ms": runtime_ms}
    else:
        if args.format == "csv":
            flat = {"params": {"command": _command_name(args)}, "value": body.get("value", body.get("upper")),
                    "lower": body.get("lower"), "upper": body.get("upper", body.get("value")),
                    "gap": body.get("gap", 0.0), "seed": args.seed, "runtime_ms": runtime_ms}
            return emit_table([flat])
        report = {"command": _command_name(args), "config": _config_dict(args), "result": body,
                  "runtime_ms": runtime_ms}
    return json.dumps(_jsonable(report), indent=2, sort_keys=False) + "\n"


def run_batch(path: str) -> int:
    """Run a JSON array of ExperimentConfig objects in order; return the worst exit status."""
    try:
        with open(path) as fh:
            items = json.load(fh)
        if not isinstance(items, list):
            raise ValidationError("a batch file holds a JSON array of configs")
        configs = [ExperimentConfig(**item) for item in items]
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return max((run(c) for c in configs), default=EXIT_OK)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["batch"]:
        if len(argv) != 2:
            print("usage: gdlab batch CONFIGS.json", file=sys.stderr)
            return EXIT_INVALID
        return run_batch(argv[1])
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    start = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            body, rows, status = args.func(args)
        runtime_ms = 0 if args.no_timing else int(round(1000 * (time.perf_counter() - start)))
        text = render(args, body, rows, runtime_ms)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def run(config: ExperimentConfig) -> int:
    return main(config.argv())


if __name__ == "__main__":
    sys.exit(main())
