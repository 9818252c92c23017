"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 verification failure,
4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import exponents as ex
from .enumeration import BudgetExceeded, enumerate_columns, problem
from .lattice import Lattice, isotropic_lift, saturate, symplectic_complete
from .padic import PrecisionContext, ResidueMatrix
from .suites import SUITES, RunConfig, report_passed, run_suite
from .symplectic import (
    GroupDescriptor,
    SymplecticElement,
    chain_index_enumerate,
    codim_prs,
    gsp_order,
    hensel_order,
    sp_factorize,
    sp_order,
)
from .torsion import (
    TorsionPoint,
    TorsionSubgroup,
    canonical_type,
    degree_exponent_prediction,
    delta_estimate,
    isotropy_chain,
    m1_invariant,
    m_invariant,
    stabilizer_enumerate,
    weil_pairing,
)

EXIT_INPUT, EXIT_SUITE, EXIT_BUDGET = 2, 3, 4


class InputError(ValueError):
    pass


def _frac(x: Fraction) -> str:
    return ex._frac(x)


def _load_json(text: str) -> Any:
    if text == "-":
        text = sys.stdin.read()
    elif not text.lstrip().startswith(("{", "[")):
        text = Path(text).read_text()
    return json.loads(text)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _pairs(items: Sequence[str]) -> list[tuple[int, int]]:
    out = []
    for item in items:
        r, s = _int_list(item)
        out.append((r, s))
    return out


def _descriptor(args) -> GroupDescriptor:
    fam = args.family.lower()
    if fam == "sp":
        return GroupDescriptor.sp(args.g)
    if fam == "gsp":
        return GroupDescriptor.gsp(args.g)
    if fam in ("pr", "prs"):
        return GroupDescriptor.prs(args.g, args.r, args.s if fam == "prs" else 0)
    raise InputError(f"unknown family {args.family!r}")


# gamma -------------------------------------------------------------------

def cmd_gamma_simple(args, cfg) -> dict:
    return {"value": _frac(ex.gamma_simple(args.g))}


def _shape(factors: Sequence[str]) -> ex.ProductShape:
    out = []
    for f in factors:
        kv = dict(part.split("=", 1) for part in f.split(","))
        out.append((int(kv["g"]), int(kv.get("n", "1"))))
    return ex.ProductShape.of(out)


def cmd_gamma_product(args, cfg) -> dict:
    shape = _shape(args.factor)
    rep = ex.alpha_product(shape).to_json()
    rep["masser_bound"] = str(ex.masser_bound(shape))
    r0, r1 = ex.rho0(shape), ex.rho1(shape)
    rep["rho0"] = {"value": _frac(r0.value), "maximizers": ex._jsonable(r0.maximizers)}
    rep["rho1"] = {"value": _frac(r1.value), "maximizers": ex._jsonable(r1.maximizers)}
    rep["rho_bound_holds"] = max(r0.value, r1.value) <= ex.alpha_product(shape).value
    return _stringify(rep)


def cmd_gamma_search(args, cfg) -> dict:
    rep = ex.gamma_ratio_search(args.g, args.max_t, args.max_level)
    out = rep.to_json()
    wit = ex.full_level_witness(args.g, rep)
    out["witness"] = None if wit is None else _stringify(ex._jsonable(wit))
    out["gamma_simple"] = _frac(ex.gamma_simple(args.g))
    return _stringify(out)


def _stringify(x: Any) -> Any:
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, list):
        return [_stringify(y) for y in x]
    if isinstance(x, dict):
        return {k: _stringify(v) for k, v in x.items()}
    return x


# group -------------------------------------------------------------------

def cmd_group_order(args, cfg) -> dict:
    d = _descriptor(args)
    if args.method == "formula":
        if d.family == "Sp":
            order = sp_order(d.g, args.ell, args.level)
        elif d.family == "GSp":
            order = gsp_order(d.g, args.ell, args.level)
        else:
            raise InputError("closed form only for sp and gsp; use --method hensel or enumerate")
    elif args.method == "hensel":
        order = hensel_order(d, args.ell, args.level, cfg.budget_log2)
    else:
        order = enumerate_columns(_problem(d, args.ell, args.level), cfg.budget_log2).total
    return {"order": str(order)}


def _problem(d: GroupDescriptor, ell: int, level: int):
    orders = [0] * (2 * d.g)
    for j in d.fixed_columns():
        orders[j] = level
    return problem(d.g, ell, level, orders, similitude=d.family == "GSp")


def cmd_group_enumerate(args, cfg) -> dict:
    d = _descriptor(args)
    res = enumerate_columns(_problem(d, args.ell, args.level), cfg.budget_log2, collect=args.list)
    out = {
        "order": str(res.total),
        "multiplier_image": [str(x) for x in res.multiplier_image],
        "estimate": str(res.estimate),
    }
    if args.list:
        ctx = PrecisionContext(args.ell, args.level)
        out["elements"] = [
            SymplecticElement.of(ResidueMatrix(ctx, m.tolist())).to_json() for m in res.elements
        ]
    return out


def cmd_group_codim(args, cfg) -> dict:
    c = codim_prs(args.g, args.r, args.s)
    return {"codim": str(c), "dimension": str(2 * args.g * args.g + args.g - c)}


def cmd_group_factorize(args, cfg) -> dict:
    obj = _load_json(args.element)
    el = SymplecticElement.from_json(obj) if "matrix" in obj else SymplecticElement.of(ResidueMatrix.from_json(obj))
    scal, sp = sp_factorize(el)
    return {"scalar_block": scal.to_json(), "sp_part": sp.to_json()}


def cmd_group_index(args, cfg) -> dict:
    exp, index, order = chain_index_enumerate(args.g, args.ell, _pairs(args.chain), args.levels, cfg.budget_log2)
    return {"exponent": str(exp), "index": str(index), "order": str(order)}


# lattice -----------------------------------------------------------------

def cmd_lattice_saturate(args, cfg) -> dict:
    return saturate(Lattice.from_json(_load_json(args.input))).to_json()


def cmd_lattice_complete(args, cfg) -> dict:
    return symplectic_complete(Lattice.from_json(_load_json(args.input))).to_json()


def cmd_lattice_lift(args, cfg) -> dict:
    return isotropic_lift(Lattice.from_json(_load_json(args.input)), args.precision).to_json()


# torsion -----------------------------------------------------------------

def _subgroup(args) -> TorsionSubgroup:
    return TorsionSubgroup.from_json(_load_json(args.input))


def cmd_torsion_type(args, cfg) -> dict:
    return _stringify(canonical_type(_subgroup(args)).to_json())


def cmd_torsion_pairing(args, cfg) -> dict:
    ctx = PrecisionContext(args.ell, args.precision)
    p = TorsionPoint(ctx, tuple(_int_list(args.p)))
    q = TorsionPoint(ctx, tuple(_int_list(args.q)))
    if len(p.coords) != len(q.coords):
        raise InputError("points have different lengths")
    n, k = weil_pairing(p, q)
    return {"n": str(n), "k": str(k)}


def cmd_torsion_m1(args, cfg) -> dict:
    h = _subgroup(args)
    return {"m1": str(m1_invariant(h)), "m": str(m_invariant(h))}


def cmd_torsion_chain(args, cfg) -> dict:
    return _stringify(isotropy_chain(_subgroup(args)).to_json())


def cmd_torsion_stabilizer(args, cfg) -> dict:
    order, index = stabilizer_enumerate(_subgroup(args), args.family, cfg.budget_log2)
    return {"order": str(order), "index": str(index)}


def cmd_torsion_delta(args, cfg) -> dict:
    h = _subgroup(args)
    return {"delta": str(delta_estimate(h, cfg.budget_log2)), "m1": str(m1_invariant(h))}


def cmd_torsion_predict(args, cfg) -> dict:
    h = _subgroup(args)
    typ, chain = canonical_type(h), isotropy_chain(h)
    if typ.t == 0:
        return {"exponent": "0", "log_order": "0"}
    return _stringify({
        "exponent": degree_exponent_prediction(typ, chain),
        "log_order": typ.log_order(),
        "type": typ.to_json(),
        "chain": chain.to_json(),
    })


# misc --------------------------------------------------------------------

def cmd_exceptional(args, cfg) -> dict:
    flag, wit = ex.is_exceptional(args.g)
    return {"exceptional": flag, "witness": wit}


def cmd_verify(args, cfg) -> dict:
    report = run_suite(args.suite, cfg)
    if args.figures:
        from .report import render

        report["figures"] = render(report, args.figures)
    return report


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the flags without defaults so top-level values survive
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d(0), help="SplitMix64 seed")
    p.add_argument("--trials", type=int, default=d(None), help="trial count for randomized suites")
    p.add_argument("--budget-log2", type=int, default=d(34), help="enumeration cap as a power of two")
    p.add_argument("--json", dest="json_out", default=d(None), help="write output to this path")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    p = argparse.ArgumentParser(
        prog="gsptorsion", description=__doc__, parents=[_global_flags(suppress=False)],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn, help_=None):
        sp = parent.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    gamma = sub.add_parser("gamma").add_subparsers(dest="sub", required=True)
    s = leaf(gamma, "simple", cmd_gamma_simple)
    s.add_argument("--g", type=int, required=True)
    s = leaf(gamma, "product", cmd_gamma_product)
    s.add_argument("--factor", action="append", required=True, help="g=<int>,n=<int>")
    s = leaf(gamma, "search", cmd_gamma_search)
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--max-t", type=int, default=2)
    s.add_argument("--max-level", type=int, default=3)

    group = sub.add_parser("group").add_subparsers(dest="sub", required=True)
    for name, fn in (("order", cmd_group_order), ("enumerate", cmd_group_enumerate)):
        s = leaf(group, name, fn)
        s.add_argument("--family", required=True, help="sp, gsp, pr or prs")
        s.add_argument("--g", type=int, required=True)
        s.add_argument("--ell", type=int, required=True)
        s.add_argument("--level", type=int, default=1)
        s.add_argument("--r", type=int, default=0)
        s.add_argument("--s", type=int, default=0)
        if name == "order":
            s.add_argument("--method", choices=["formula", "hensel", "enumerate"], default="formula")
        else:
            s.add_argument("--list", action="store_true", help="include every element")
    s = leaf(group, "codim", cmd_group_codim)
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, default=0)
    s = leaf(group, "factorize", cmd_group_factorize)
    s.add_argument("--element", required=True, help="element or matrix JSON (inline, path or -)")
    s = leaf(group, "index", cmd_group_index)
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--chain", nargs="+", required=True, help="r,s pairs, smallest group first")
    s.add_argument("--levels", nargs="+", type=int, required=True)

    lat = sub.add_parser("lattice").add_subparsers(dest="sub", required=True)
    for name, fn in (("saturate", cmd_lattice_saturate), ("complete", cmd_lattice_complete),
                     ("lift", cmd_lattice_lift)):
        s = leaf(lat, name, fn)
        s.add_argument("--input", required=True, help="lattice JSON (inline, path or -)")
        if name == "lift":
            s.add_argument("--precision", type=int, required=True)

    tor = sub.add_parser("torsion").add_subparsers(dest="sub", required=True)
    for name, fn in (("type", cmd_torsion_type), ("m1", cmd_torsion_m1), ("chain", cmd_torsion_chain),
                     ("stabilizer", cmd_torsion_stabilizer), ("delta", cmd_torsion_delta),
                     ("predict-degree", cmd_torsion_predict)):
        s = leaf(tor, name, fn)
        s.add_argument("--input", required=True, help="subgroup JSON (inline, path or -)")
        if name == "stabilizer":
            s.add_argument("--family", choices=["Sp", "GSp"], default="Sp")
    s = leaf(tor, "pairing", cmd_torsion_pairing)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--precision", type=int, required=True)
    s.add_argument("--p", required=True, help="comma-separated coordinates")
    s.add_argument("--q", required=True, help="comma-separated coordinates")

    s = leaf(sub, "exceptional", cmd_exceptional)
    s.add_argument("--g", type=int, required=True)

    s = leaf(sub, "verify", cmd_verify)
    s.add_argument("suite", choices=sorted(SUITES))
    s.add_argument("--bound", type=int, default=6, help="grid bound for the abel suite")
    s.add_argument("--figures", default=None, help="directory for PNG figures")
    return p


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = RunConfig(
        seed=args.seed,
        trials=args.trials,
        budget_log2=args.budget_log2,
        bound=getattr(args, "bound", 6),
    )
    try:
        result = args.fn(args, cfg)
    except BudgetExceeded as e:
        _emit({"error": "budget exceeded", "estimate": str(e.estimate),
               "budget_log2": str(e.budget_log2)}, args.json_out)
        return EXIT_BUDGET
    except (ValueError, KeyError, TypeError, ArithmeticError, OSError) as e:
        _emit({"error": f"{type(e).__name__}: {e}"}, args.json_out)
        return EXIT_INPUT
    _emit(result, args.json_out)
    if args.fn is cmd_verify and not report_passed(result):
        return EXIT_SUITE
    return 0


def _emit(obj: Any, path: str | None) -> None:
    text = json.dumps(obj, indent=None if path is None else 2, sort_keys=False)
    if path:
        Path(path).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
