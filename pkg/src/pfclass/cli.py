"""Command-line entry point.

Exit status: 0 when every checked identity holds, 1 on an identity violation,
2 on unreadable or malformed input, 3 when a precondition fails.

Random data come from Python's ``random.Random`` (Mersenne Twister) seeded with
the string ``"<seed>:<group>:<index>"``, so every instance is reproducible on
its own and independent of how many instances precede it.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .classgroup import (
    PreconditionError,
    chi_arakelov,
    chi_hermitian,
    random_opposite_degree_pairing,
    random_cohomology_pairing,
    sign_comparison_check,
    dual_route_check,
)
from .complexes import random_complex, random_symmetric_complex
from .cyclo import ConductorTooLarge
from .demos import hyperbolic_plane_demo, quadratic_trace_demo, tame_discriminants
from .detlines import ComplexError
from .equivariant import EquivariantError, pf_on_fixed_space, pf_of_group_ring_form, metric_identity_sides, pf_sign_vs_signature, \
    random_invariant_form, free_module_action, left_ideal
from .forms import FormError, pfaffian
from .groups import GroupError, catalog_group, symplectic_character_basis
from .serialize import (
    ParseError,
    complex_from_json,
    dumps,
    fraction_str,
    matrix_from_json,
    pairing_from_json,
    scalar_to_json,
)

DEFAULT_GROUPS = ["C2", "C3", "C4", "C6", "S3", "D4", "Q8"]


def instance_rng(seed: int, group: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{group}:{index}")


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def _load_complex_and_pairing(args, symmetric_shape: bool = False):
    data = _load_json(args.complex)
    p = complex_from_json(data)
    if args.pairing:
        sigma = pairing_from_json(_load_json(args.pairing))
    elif "sigma_ev" in data or "sigma_odd" in data:
        sigma = pairing_from_json(data)
    else:
        rng = instance_rng(args.seed, p.group.name, 0)
        sigma = random_opposite_degree_pairing(p, rng) if symmetric_shape else random_cohomology_pairing(p, rng)
    return p, sigma


def _emit(out, text: str = "") -> None:
    out.write(text + "\n")


# ---------------------------------------------------------------------------
# Commands


def cmd_pf(args, out) -> int:
    m = matrix_from_json(_load_json(args.matrix))
    value = pfaffian(m, args.method)
    _emit(out, dumps({"pf": scalar_to_json(value)}))
    return 0


def cmd_chi(args, out, arakelov: bool) -> int:
    p, sigma = _load_complex_and_pairing(args)
    rep = chi_arakelov(p, sigma) if arakelov else chi_hermitian(p, sigma)
    _emit(out, dumps(rep.to_json()))
    return 0


def _sign_comparison_instance(task):
    group_name, seed, index, rank_max = task
    g = catalog_group(group_name)
    rng = instance_rng(seed, group_name, index)
    p = random_complex(g, rng, -2, 2, rank_max)
    return sign_comparison_check(p, random_cohomology_pairing(p, rng))


def _dual_route_instance(task):
    group_name, seed, index, rank_max = task
    g = catalog_group(group_name)
    rng = instance_rng(seed, group_name, index)
    p = random_symmetric_complex(g, rng, 2, max(1, rank_max // 2))
    return dual_route_check(p, random_opposite_degree_pairing(p, rng), rng)


def _run_tasks(fn, tasks, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _report_rows(out, title: str, index, rows, fields) -> bool:
    ok = True
    for r in rows:
        status = "PASS" if r["ok"] else "FAIL"
        ok = ok and r["ok"]
        detail = " ".join(f"{f}={_fmt(r[f])}" for f in fields)
        _emit(out, f"{status} {title} #{index} {r['character']} {detail}")
    return ok


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "ok" if x else "bad"
    if isinstance(x, Fraction):
        return fraction_str(x)
    return str(x)


def cmd_theorem(args, out, which: int) -> int:
    fields30 = ["n_minus", "predicted", "sign", "magnitude_ok"]
    fields44 = ["route_a", "route_b", "euler_rank", "lift_signature", "lift_pf", "lift_metric"]
    fields = fields30 if which == 30 else fields44
    if args.complex:
        p, sigma = _load_complex_and_pairing(args, symmetric_shape=which == 44)
        rng = instance_rng(args.seed, p.group.name, 0)
        rows = sign_comparison_check(p, sigma) if which == 30 else dual_route_check(p, sigma, rng)
        ok = _report_rows(out, f"theorem{which}", 0, rows, fields)
    else:
        fn = _sign_comparison_instance if which == 30 else _dual_route_instance
        tasks = [(args.group, args.seed, k, args.rank_max) for k in range(args.count)]
        ok = True
        for k, rows in enumerate(_run_tasks(fn, tasks, args.jobs)):
            ok = _report_rows(out, f"theorem{which} {args.group}", k, rows, fields) and ok
    return 0 if ok else 1


def _forms_instance(task):
    group_name, seed, index, rank = task
    g = catalog_group(group_name)
    rng = instance_rng(seed, group_name, index)
    sigma = random_invariant_form(free_module_action(g, rank), rng)
    rows = []
    for it in symplectic_character_basis(g):
        lhs, rhs = pf_on_fixed_space(g, sigma, rank, it), pf_of_group_ring_form(g, sigma, rank, it)
        s = pf_sign_vs_signature(g, sigma, rank, it)
        rows.append({"character": it.label, "pf_identity": lhs == rhs, "sign_rule": s["ok"],
                     "ok": lhs == rhs and s["ok"]})
    for r in range(len(g.irreducibles)):
        lhs, rhs = metric_identity_sides(g, sigma, rank, left_ideal(g, r))
        rows.append({"character": g.irreducibles[r].label, "metric_identity": lhs == rhs, "ok": lhs == rhs})
    return rows


def cmd_sweep(args, out) -> int:
    groups = args.groups.split(",") if args.groups else DEFAULT_GROUPS
    ok = True
    for name in groups:
        tasks = [(name, args.seed, k, 1 + k % args.rank_max) for k in range(args.count)]
        results = _run_tasks(_forms_instance, tasks, args.jobs)
        good = sum(all(r["ok"] for r in rows) for rows in results)
        _emit(out, f"{'PASS' if good == len(results) else 'FAIL'} forms {name} {good}/{len(results)}")
        ok = ok and good == len(results)
        for label, fn in (("theorem30", _sign_comparison_instance), ("theorem44", _dual_route_instance)):
            tasks = [(name, args.seed, k, args.rank_max) for k in range(args.count)]
            results = _run_tasks(fn, tasks, args.jobs)
            good = sum(all(r["ok"] for r in rows) for rows in results)
            _emit(out, f"{'PASS' if good == len(results) else 'FAIL'} {label} {name} {good}/{len(results)}")
            ok = ok and good == len(results)
    return 0 if ok else 1


def cmd_demo_quadratic(args, out) -> int:
    ds = [args.d] if args.d is not None else tame_discriminants(args.bound)
    ok = True
    for d in ds:
        rep = quadratic_trace_demo(d)
        for line in rep.lines():
            _emit(out, line)
        ok = ok and rep.ok
    return 0 if ok else 1


def cmd_demo_hp(args, out) -> int:
    g = catalog_group(args.group)
    rep = hyperbolic_plane_demo(g)
    for line in rep.lines():
        _emit(out, line)
    ok = True
    for r in rep.rows:
        checks = [("(HP, s/|G|) = (-1)^(d/2)", r.unit_ok),
                  ("(HP, s) = (-|G|)^(d/2)", r.unscaled_ok)]
        if r.involution_sign is not None:
            checks.append(("(-1)^(theta(z)/2) = (-1)^(d/2)", r.involution_sign == r.closed_sign))
        for name, good in checks:
            _emit(out, f"{'PASS' if good else 'FAIL'} {r.label}: {name}")
            ok = ok and good
    _emit(out, dumps({"scaled": [{"character": r.label, "value": scalar_to_json(r.scaled)} for r in rep.rows],
                      "unscaled": [{"character": r.label, "value": scalar_to_json(r.unscaled)} for r in rep.rows]}))
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfclass", description="Pfaffian class invariants of group-ring complexes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pf", help="Pfaffian of an alternating matrix (JSON nested list of 'p/q')")
    p.add_argument("matrix")
    p.add_argument("--method", choices=["elimination", "matching"], default="elimination")

    for name in ("chi-hermitian", "chi-arakelov"):
        p = sub.add_parser(name, help="class representative of a complex file")
        p.add_argument("complex")
        p.add_argument("--pairing", help="JSON with sigma_ev / sigma_odd on the canonical cohomology bases")
        p.add_argument("--seed", type=int, default=0)

    for name in ("theorem30", "theorem44"):
        p = sub.add_parser(name, help="check the identity on a file or on seeded random complexes")
        p.add_argument("--complex")
        p.add_argument("--pairing")
        p.add_argument("--group", default="C2")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--count", type=int, default=1)
        p.add_argument("--rank-max", type=int, default=2)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("sweep", help="seeded sweep over catalog groups")
    p.add_argument("--groups")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--rank-max", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("demo-quadratic", help="trace form of Q(sqrt d)")
    p.add_argument("--d", type=int)
    p.add_argument("--bound", type=int, default=200)

    p = sub.add_parser("demo-hp", help="free hyperbolic plane over Q[G]")
    p.add_argument("--group", default="C2")
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    handlers = {
        "pf": cmd_pf,
        "chi-hermitian": lambda a, o: cmd_chi(a, o, arakelov=False),
        "chi-arakelov": lambda a, o: cmd_chi(a, o, arakelov=True),
        "theorem30": lambda a, o: cmd_theorem(a, o, 30),
        "theorem44": lambda a, o: cmd_theorem(a, o, 44),
        "sweep": cmd_sweep,
        "demo-quadratic": cmd_demo_quadratic,
        "demo-hp": cmd_demo_hp,
    }
    try:
        return handlers[args.command](args, out)
    except (ParseError, ComplexError, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, EquivariantError, FormError, ConductorTooLarge) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
