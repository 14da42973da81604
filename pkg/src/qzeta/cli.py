"""Batch command-line front end.

Every command writes a report (JSON by default) and exits with 0 when every
asserted check passes, 1 when one fails and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from qzeta import criterion as C
from qzeta import denominator as D
from qzeta import numerics as N
from qzeta.exact_algebra import RatFunc
from qzeta.linear_forms import FormParams, LinearForm, build_linear_form, ratfunc_to_json

SCHEMA = "qzeta-report/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing


def parse_range(text: str) -> list[int]:
    """'3', '1..4' (inclusive) or '1,2,5'."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError as exc:
        raise UsageError(f"bad integer range {text!r}") from exc
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def parse_q_list(text: str) -> list[Fraction]:
    out = []
    for part in text.split(","):
        try:
            q = N.parse_q(part).q
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if abs(q) >= 1:
            raise UsageError(f"need 0 < |q| < 1, got {part!r}")
        out.append(q)
    return out


def _params_grid(args) -> list[FormParams]:
    grid = []
    for A in parse_range(args.A):
        for r in parse_range(args.r):
            for n in parse_range(args.n):
                try:
                    grid.append(FormParams(A, r, n))
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
    return sorted(grid, key=lambda p: (p.A, p.r, p.n))


def _default_precision() -> int:
    env = os.environ.get("QZETA_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return N.DEFAULT_PRECISION


# --------------------------------------------------------------------------
# serialisation


def _jsonable(x):
    if isinstance(x, N.IntervalValue):
        return x.to_json()
    if isinstance(x, RatFunc):
        return ratfunc_to_json(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def render(report: dict, fmt: str) -> str:
    data = _jsonable(report)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    rows = data.get("results", [])
    if fmt == "csv":
        flat = [_flatten(r) for r in rows]
        fields = sorted({k for r in flat for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in flat:
            w.writerow(r)
        return buf.getvalue()
    lines = [f"{data['command']}: {'PASS' if data['pass'] else 'FAIL'}"]
    for r in rows:
        flat = _flatten(r)
        lines.append("  " + " ".join(f"{k}={flat[k]}" for k in sorted(flat)))
    return "\n".join(lines) + "\n"


def _report(command: str, config: dict, results: list, passed: bool, **extra) -> dict:
    rep = {"schema": SCHEMA, "command": command, "config": config, "results": results, "pass": bool(passed)}
    rep.update(extra)
    return rep


def _pool_map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# --------------------------------------------------------------------------
# commands


def _form_build_one(p: FormParams) -> dict:
    return build_linear_form(p).to_json()


def cmd_form_build(args) -> dict:
    grid = _params_grid(args)
    forms = _pool_map(_form_build_one, grid, args.jobs)
    return _report("form build", {"A": args.A, "r": args.r, "n": args.n}, forms, True)


def _form_verify_one(task):
    p, qs, prec = task
    form = build_linear_form(p)
    out = []
    for q in qs:
        res = N.linear_form_residual(form, q, prec)
        ok = res.contains_zero() and res.rad < Fraction(1, 1 << 64)
        out.append({"A": p.A, "r": p.r, "n": p.n, "q": str(q), "residual": res, "pass": ok})
    return out


def cmd_form_verify(args) -> dict:
    grid = _params_grid(args)
    qs = parse_q_list(args.q)
    chunks = _pool_map(_form_verify_one, [(p, qs, args.precision) for p in grid], args.jobs)
    results = [r for chunk in chunks for r in chunk]
    cfg = {"A": args.A, "r": args.r, "n": args.n, "q": args.q, "precision": args.precision}
    return _report("form verify", cfg, results, all(r["pass"] for r in results))


def _denom_one(task):
    p, d_power = task
    form = build_linear_form(p)
    spec = D.DenominatorSpec.standard(p.A, p.r, reduced=True)
    if d_power is not None:
        spec = D.DenominatorSpec.standard(p.A, p.r, d_power=d_power)
    return D.verify_denominator_theorem(form, spec)


def cmd_denom_verify(args) -> dict:
    grid = [p for p in _params_grid(args) if p.n >= 1]
    if not grid:
        raise UsageError("denom verify needs some n >= 1")
    tasks = [(p, None if args.d_power_drop is None else p.A - args.d_power_drop) for p in grid]
    reports = _pool_map(_denom_one, tasks, args.jobs)
    cfg = {"A": args.A, "r": args.r, "n": args.n, "d_power_drop": args.d_power_drop}
    return _report("denom verify", cfg, reports, all(r["pass"] for r in reports))


def cmd_identity_verify(args) -> dict:
    results = []
    for case in D.CLOSED_FORM_CASES:
        for n in range(1, args.n_max + 1):
            for k in range(1, n + 1):
                rep = D.closed_form_report(case, n, k)
                results.append(
                    {
                        "kind": "closed_form",
                        "case": list(case),
                        "n": n,
                        "k": k,
                        "link_sign": rep["link_sign"],
                        "pass": rep["pass"],
                    }
                )
    rng = random.Random(args.seed)
    for i in range(args.instances):
        m = i % 4
        N_ = (i // 4) % 5
        inst = D.random_andrews_instance(rng, m, N_)
        _, _, ok = D.andrews_transform(inst)
        results.append({"kind": "andrews", "index": i, "m": m, "N": N_, "pass": ok})
    count = 0
    while count < max(1, args.instances // 10):
        t, b, c, d, e = (D.random_rational(rng) for _ in range(5))
        base = D.random_rational(rng)
        if abs(base) == 1:
            continue
        try:
            lhs, rhs, ok = D.watson_transform(t, b, c, d, e, 3, base)
            inst = D.AndrewsInstance(1, 3, t * t, [b, d], [c, e], base)
            ok = ok and D.andrews_lhs(inst) == lhs and D.andrews_rhs(inst) == rhs
        except (ValueError, ZeroDivisionError):
            continue
        results.append({"kind": "watson", "index": count, "pass": ok})
        count += 1
    for A, r, n in ((4, 1, 3),):
        p = FormParams(A, r, n)
        for k in range(1, n + 1):
            rep = D.andrews_applied_check(p, k, 2)
            results.append({"kind": "andrews_applied", "A": A, "r": r, "n": n, "k": k, "pass": rep["pass"]})
    cfg = {"n_max": args.n_max, "instances": args.instances, "seed": args.seed}
    return _report("identity verify", cfg, results, all(r["pass"] for r in results), seed=args.seed)


def _blocks(n_max: int):
    return D.building_block_grid(n_max)


def _block_one(task):
    block, l_max, exps = task
    out = []
    for e in exps:
        for l in range(l_max + 1):
            ok = D.building_block_membership(block, l, e)
            rec = {"block": list(block), "l": l, "e": e, "pass": ok}
            if block[0] == "R1" and e == 1:
                cert = D.r1_valuation_certificate(block[1], block[2], block[3], block[4], l)
                rec["valuation_agrees"] = cert == ok
                rec["pass"] = ok and cert == ok
            out.append(rec)
    return out


def cmd_blocks_verify(args) -> dict:
    exps = parse_range(args.exponents)
    if 0 in exps:
        raise UsageError("u exponent 0 is not allowed")
    tasks = [(b, args.l_max, exps) for b in _blocks(args.n_max)]
    chunks = _pool_map(_block_one, tasks, args.jobs)
    results = [r for c in chunks for r in c]
    cfg = {"n_max": args.n_max, "l_max": args.l_max, "exponents": args.exponents}
    return _report("blocks verify", cfg, results, all(r["pass"] for r in results))


def cmd_criterion_table(args) -> dict:
    As = [A for A in parse_range(args.A) if A >= 4 and A % 2 == 0]
    if not As:
        raise UsageError("no even A >= 4 in range")
    rows = C.criterion_table(As)
    return _report("criterion table", {"A": args.A}, rows, all(r["g_ge_f"] for r in rows))


def cmd_criterion_check(args) -> dict:
    suite = C.inequality_suite()
    results = [{"chain": c["name"], "statement": c["statement"], "values": c["values"], "pass": c["pass"]} for c in suite["chains"]]
    thr = C.threshold_scan()
    results.append(
        {"chain": "thresholds", "values": thr, "pass": thr["g"]["threshold"] == 10 and thr["f"]["threshold"] == 12 and thr["g"]["certified"] and thr["f"]["certified"]}
    )
    asym = C.asymptotic_check()
    results.append({"chain": "asymptotic", "values": asym, "pass": asym["pass"]})
    return _report("criterion check", {}, results, all(r["pass"] for r in results))


def cmd_asymptotics_sweep(args) -> dict:
    try:
        params = FormParams(int(args.A), int(args.r), 1)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    q = parse_q_list(args.q)[0]
    ns = parse_range(args.n)
    if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise UsageError("n range must be increasing and positive")
    rows = N.slope_table(args.quantity, params, q, ns, args.precision, args.jobs)
    passed = True
    last = rows[-1]
    if args.quantity == "S_tilde":
        passed = last["relative_gap"] is not None and last["relative_gap"] < 0.15
    elif args.quantity == "d_n":
        passed = last["relative_gap"] is not None and last["relative_gap"] < 0.20
    else:
        passed = all(r["slope"] is not None and r["slope"] <= 1.2 * r["target"] for r in rows)
    cfg = {"quantity": args.quantity, "A": args.A, "r": args.r, "q": args.q, "n": args.n}
    return _report("asymptotics sweep", cfg, rows, passed)


def cmd_zeta_eval(args) -> dict:
    q = parse_q_list(args.q)[0]
    if args.s < 1:
        raise UsageError("s must be at least 1")
    val = N.zeta_q(args.s, q, args.precision)
    res = {"s": args.s, "q": str(q), "value": val, "decimal": val.to_decimal(args.digits)}
    return _report("zeta eval", {"s": args.s, "q": args.q, "precision": args.precision}, [res], True)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--seed", type=int, default=20240917, help="seed for random draws")
    common.add_argument("--precision", type=int, default=_default_precision(), help="working precision in bits")

    parser = argparse.ArgumentParser(prog="qzeta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True)

    form = sub.add_parser("form", help="linear forms").add_subparsers(dest="action", required=True)
    for name, fn in (("build", cmd_form_build), ("verify", cmd_form_verify)):
        sp = form.add_parser(name, parents=[common])
        sp.add_argument("--A", default="4")
        sp.add_argument("--r", default="1")
        sp.add_argument("--n", default="0..2")
        if name == "verify":
            sp.add_argument("--q", default="1/2,1/3,-1/2")
        sp.set_defaults(func=fn)

    denom = sub.add_parser("denom", help="denominators").add_subparsers(dest="action", required=True)
    sp = denom.add_parser("verify", parents=[common])
    sp.add_argument("--A", default="4")
    sp.add_argument("--r", default="1")
    sp.add_argument("--n", default="1..3")
    sp.add_argument("--d-power-drop", type=int, default=None, help="assert with d_n(1/q)^(A - DROP) instead")
    sp.set_defaults(func=cmd_denom_verify)

    ident = sub.add_parser("identity", help="closed forms and transformations").add_subparsers(dest="action", required=True)
    sp = ident.add_parser("verify", parents=[common])
    sp.add_argument("--n-max", type=int, default=6)
    sp.add_argument("--instances", type=int, default=50)
    sp.set_defaults(func=cmd_identity_verify)

    blocks = sub.add_parser("blocks", help="building-block memberships").add_subparsers(dest="action", required=True)
    sp = blocks.add_parser("verify", parents=[common])
    sp.add_argument("--n-max", type=int, default=4)
    sp.add_argument("--l-max", type=int, default=3)
    sp.add_argument("--exponents", default="-2,-1,1,2")
    sp.set_defaults(func=cmd_blocks_verify)

    crit = sub.add_parser("criterion", help="dimension bounds").add_subparsers(dest="action", required=True)
    sp = crit.add_parser("table", parents=[common])
    sp.add_argument("--A", default="4..100")
    sp.set_defaults(func=cmd_criterion_table)
    sp = crit.add_parser("check", parents=[common])
    sp.set_defaults(func=cmd_criterion_check)

    asym = sub.add_parser("asymptotics", help="growth rates").add_subparsers(dest="action", required=True)
    sp = asym.add_parser("sweep", parents=[common])
    sp.add_argument("--quantity", choices=("S_tilde", "d_n", "P_hat_max"), default="S_tilde")
    sp.add_argument("--A", default="4")
    sp.add_argument("--r", default="1")
    sp.add_argument("--q", default="1/2")
    sp.add_argument("--n", default="5,10,15,20")
    sp.set_defaults(func=cmd_asymptotics_sweep)

    zeta = sub.add_parser("zeta", help="q-zeta values").add_subparsers(dest="action", required=True)
    sp = zeta.add_parser("eval", parents=[common])
    sp.add_argument("--s", type=int, default=3)
    sp.add_argument("--q", default="1/2")
    sp.add_argument("--digits", type=int, default=30)
    sp.set_defaults(func=cmd_zeta_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    if args.precision < 32:
        parser.error("--precision must be at least 32")
    try:
        report = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            pass
    return EXIT_OK if report["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
