"""Command-line front end.

Exit status is 0 when a predicate holds (or a construction succeeds), 1 when
a predicate fails, and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import catalog, dot
from . import serialize as S
from .field import GlobalField, enumerate_places, parse_elem, parse_place, poles, valuation
from .lattice import (
    LatticeHom,
    all_homs,
    birkhoff_map,
    is_epic_cat,
    is_injective,
    is_lattice_iso,
    is_monic_cat,
    is_surjective,
    lattice_from_poset,
    primes_in_image,
    spec,
)
from .model import (
    DedekindModel,
    ModelHom,
    check_axioms,
    is_P_morphism,
    is_Q_morphism,
    lifting_counts,
    pq_decompose,
    structure_map,
)
from .suites import SUITES, run_suite
from .topology import FinitePoset, SpaceMap, closure, is_epic_space, is_surjective_space, isomorphism, ultrafilters
from .zr import (
    is_profinite,
    is_proper,
    is_separated,
    is_universally_closed,
    is_zr_section,
    ms_equal,
    prec,
    strongly_profinite_certificate,
    witness_points,
    zr_relative,
    zr_space,
)


class InputError(ValueError):
    pass


# input helpers -----------------------------------------------------------------------


def _read_json(arg: str, what: str) -> Any:
    """Inline JSON, or a path to a JSON file."""
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        path = Path(arg)
        if not path.is_file():
            raise InputError(f"{what}: no such file {arg!r}")
        text = path.read_text()
    try:
        return S.loads_lenient(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _model(arg: Optional[str], what: str) -> DedekindModel:
    if arg is None:
        raise InputError(f"--{what} is required")
    if arg in catalog.all_names() or arg.startswith("tester:"):
        return catalog.load(arg)
    return S.model_from_json(_read_json(arg, f"--{what}"), f"--{what}")


def _poset(arg: Optional[str], what: str = "poset") -> FinitePoset:
    if arg is None:
        raise InputError(f"--{what} is required")
    return S.poset_from_json(_read_json(arg, f"--{what}"), f"--{what}")


def _field(args: argparse.Namespace) -> GlobalField:
    if args.field:
        text = args.field.strip()
        if text in ("Q", "QQ"):
            return GlobalField.rationals()
        digits = text.removeprefix("F").removeprefix("q=").split("(")[0]
        if digits.isdigit():
            return GlobalField.function_field(int(digits))
        raise InputError(f"--field: expected Q or F<q>, got {text!r}")
    if args.model:
        return _model(args.model, "model").field
    if args.base:
        return _model(args.base, "base").field
    return GlobalField.rationals()


def _hom(args: argparse.Namespace) -> ModelHom:
    if args.hom:
        return S.hom_from_json(_read_json(args.hom, "--hom"), "--hom")
    m = _model(args.model, "model")
    if args.base is None and args.model in catalog.all_names():
        return catalog.scenario(args.model)
    return structure_map(m, _model(args.base, "base"))


def _bound(args: argparse.Namespace) -> Optional[int]:
    if args.bound is not None:
        return args.bound
    env = os.environ.get("STONEZR_BOUND")
    return int(env) if env else None


def _report(predicate: str, inputs: dict, verdict: Any, method: str = "exact", bound: Optional[int] = None, **extra: Any) -> dict:
    out = {"predicate": predicate, "input": inputs, "verdict": verdict, "method": method, "bound": bound}
    out.update(extra)
    return out


# lattice / space ------------------------------------------------------------------------


def cmd_lattice(args: argparse.Namespace) -> tuple[dict, Any]:
    p = _poset(args.poset)
    l = lattice_from_poset(p)
    if args.action == "spec":
        sp = spec(l)
        return _report("spec", {"poset": args.poset}, True, spectrum=S.poset_to_json(sp)), sp
    if args.action == "duality":
        iso = isomorphism(spec(l), p)
        l2 = lattice_from_poset(spec(l))
        lat_ok = len(l2) == len(l) and is_lattice_iso(l, l2, birkhoff_map(l))
        verdict = iso is not None and lat_ok
        return _report("duality", {"poset": args.poset}, verdict, certificate=iso, lattice_iso=lat_ok), l
    q = _poset(args.target, "target")
    target = lattice_from_poset(q)
    rows = []
    for h in all_homs(l, target):
        rows.append(
            {
                "table": {str(a): h(a).ids() for a in l},
                "injective": is_injective(h),
                "surjective": is_surjective(h),
                "monic": is_monic_cat(h, args.bound or 3),
                "epic": is_epic_cat(h, args.bound or 3),
                "primes_in_image": primes_in_image(h),
            }
        )
    return _report("homs", {"source": args.poset, "target": args.target}, True, "bounded", args.bound or 3, count=len(rows), homs=rows), l


def cmd_space(args: argparse.Namespace) -> tuple[dict, Any]:
    if args.action == "epi":
        obj = _read_json(args.map, "--map") if args.map else None
        if obj is None:
            raise InputError("--map is required")
        src = S.poset_from_json(S._get(obj, "source", "--map"), "--map.source")
        tgt = S.poset_from_json(S._get(obj, "target", "--map"), "--map.target")
        mapping = S._get(obj, "map", "--map")
        try:
            f = SpaceMap.from_dict(src, tgt, mapping)
        except (KeyError, ValueError) as exc:
            raise InputError(f"--map.map: {exc}") from exc
        epic = is_epic_space(f)
        dual = LatticeHom.from_space_map(f)
        return _report("epic", {"map": mapping}, epic, surjective=is_surjective_space(f), dual_injective=is_injective(dual)), src
    if args.action == "closure":
        p = _poset(args.poset)
        subset = [s for s in (args.subset or "").split(",") if s]
        try:
            cl = sorted(closure(p, subset))
        except (KeyError, ValueError) as exc:
            raise InputError(f"--subset: {exc}") from exc
        return _report("closure", {"poset": args.poset, "subset": subset}, True, closure=cl), p
    points = [s for s in (args.set or "").split(",") if s]
    if not points:
        raise InputError("--set needs a comma separated list of points")
    ufs = ultrafilters(points)
    gens = [[points[i] for i in range(len(points)) if min(u, key=lambda a: bin(a).count("1")) >> i & 1] for u in ufs]
    return _report("ultrafilters", {"set": points}, len(ufs) == len(points), count=len(ufs), generators=gens), None


# field -------------------------------------------------------------------------------------


def cmd_field(args: argparse.Namespace) -> tuple[dict, Any]:
    k = _field(args)
    if args.action == "places":
        bound = _bound(args) or (10 if k.is_rational else 2)
        places = enumerate_places(k, bound)
        return _report("places", {"field": str(k), "bound": bound}, True, places=[v.label(k.var) for v in places]), None
    if args.elem is None:
        raise InputError("--elem is required")
    a = parse_elem(k, args.elem)
    if args.action == "poles":
        ps = sorted(poles([a]), key=lambda v: v.sort_key())
        return _report("poles", {"field": str(k), "elem": args.elem}, True, poles=[v.label(k.var) for v in ps]), None
    if args.place is None:
        raise InputError("--place is required")
    v = parse_place(k, args.place)
    return _report("valuation", {"field": str(k), "elem": args.elem, "place": args.place}, True, value=valuation(v, a)), None


# models --------------------------------------------------------------------------------------


def cmd_model(args: argparse.Namespace) -> tuple[dict, Any]:
    if args.action == "check":
        m = _model(args.model, "model")
        rep = check_axioms(m, seed=args.seed)
        fails = [f"{a}: {s}" for a, s, _ in rep.failures()][:20]
        return _report("axioms", {"model": args.model}, rep.ok, "bounded", summary=rep.summary(), failures=fails), m
    f = _hom(args)
    inputs = {"model": args.model, "base": args.base, "hom": args.hom}
    if args.action == "pq":
        d = pq_decompose(f)
        ok = d.p.compose(d.q).same_as(f) and is_P_morphism(d.p) and is_Q_morphism(d.q)
        return _report(
            "pq_decompose",
            inputs,
            ok,
            middle=S.model_to_json(d.middle),
            p=dict(d.p.mapping),
            q=dict(d.q.mapping),
        ), d.middle
    bound = _bound(args)
    counts = lifting_counts(f, bound)
    rows = [{"tester": t, "center": c, "fillers": n} for (t, c), n in sorted(counts.items())]
    sep = all(n <= 1 for n in counts.values())
    uc = all(n >= 1 for n in counts.values())
    return _report("lifting", inputs, sep and uc, "bounded", bound, separated=sep, universally_closed=uc, squares=rows), None


# ZR ----------------------------------------------------------------------------------------------


def cmd_zr(args: argparse.Namespace) -> tuple[dict, Any]:
    act = args.action
    if act in ("prec", "equal"):
        base = _model(args.base, "base")
        if args.a is None or args.b is None:
            raise InputError("--a and --b are required")
        a = S.zr_elem_from_json(base, _read_json(args.a, "--a"), "--a")
        b = S.zr_elem_from_json(base, _read_json(args.b, "--b"), "--b")
        verdict = prec(a, b) if act == "prec" else ms_equal(a, b)
        return _report(act, {"base": args.base, "a": str(a), "b": str(b)}, verdict), None
    if act == "points":
        m = _model(args.model or args.base, "model")
        bound = _bound(args)
        pts = witness_points(m, bound)
        return _report("points", {"model": args.model or args.base}, True, "bounded", bound, points=[str(p) for p in pts]), zr_space(m)
    if act == "section":
        base = _model(args.base, "base")
        if args.elem is None:
            raise InputError("--elem is required")
        a = parse_elem(base.field, args.elem)
        opens = S.zr_elem_from_json(base, _read_json(args.a, "--a"), "--a") if args.a else S.zr_elem_from_json(base, [["empty", ["1"]]])
        verdict = is_zr_section(a, sorted(opens.terms, key=str), base)
        return _report("section", {"base": args.base, "elem": args.elem, "opens": str(opens)}, verdict), None
    f = _hom(args)
    base_name = args.base
    if base_name is None and args.model in catalog.all_names():
        base_name = catalog.default_base(args.model)
    inputs = {"model": args.model, "base": base_name}
    if act == "separated":
        return _report("separated", inputs, is_separated(f)), None
    if act == "proper":
        return _report("proper", inputs, is_proper(f), separated=is_separated(f), universally_closed=is_universally_closed(f)), None
    if act == "profinite":
        cert = strongly_profinite_certificate(f)
        return _report("profinite", inputs, is_profinite(f), strongly=cert is not None, certificate=str(cert) if cert else None), None
    c = zr_relative(f.source, f.target, f)
    return _report(
        "compactify",
        inputs,
        True,
        model=S.model_to_json(c.model),
        embedding=dict(c.embedding.mapping),
        embedding_is_Q=is_Q_morphism(c.embedding),
    ), c.model


def cmd_suite(args: argparse.Namespace) -> tuple[dict, Any]:
    names = list(SUITES) if args.action == "all" else [args.action]
    results = [run_suite(n, args.seed).as_dict() for n in names]
    verdict = all(r["verdict"] == "pass" for r in results)
    return _report("suite", {"suite": args.action, "seed": args.seed}, verdict, "bounded", criteria=results), None


# parser -----------------------------------------------------------------------------------------

COMMANDS = {
    "lattice": (cmd_lattice, ["spec", "duality", "homs"]),
    "space": (cmd_space, ["epi", "closure", "ultrafilters"]),
    "field": (cmd_field, ["val", "poles", "places"]),
    "model": (cmd_model, ["check", "pq", "lift"]),
    "zr": (cmd_zr, ["points", "prec", "equal", "separated", "proper", "profinite", "compactify", "section"]),
    "suite": (cmd_suite, ["all", *SUITES]),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stonezr", description="Finite Stone duality and Zariski-Riemann spaces of global fields.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, actions) in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("action", choices=actions)
        p.add_argument("--model")
        p.add_argument("--base")
        p.add_argument("--hom", help="JSON hom {source, target, map}")
        p.add_argument("--poset", help="poset JSON (file or inline)")
        p.add_argument("--target", help="target poset JSON for lattice homs")
        p.add_argument("--map", help="space map JSON {source, target, map}")
        p.add_argument("--subset")
        p.add_argument("--set")
        p.add_argument("--field")
        p.add_argument("--elem")
        p.add_argument("--place")
        p.add_argument("--a")
        p.add_argument("--b")
        p.add_argument("--bound", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=["json", "dot", "text"], default="json")
    return parser


def _text(report: dict) -> str:
    lines = [f"{report['predicate']}: {report['verdict']} ({report['method']}" + (f", bound {report['bound']})" if report["bound"] is not None else ")")]
    for key, value in report.items():
        if key in ("predicate", "verdict", "method", "bound"):
            continue
        lines.append(f"  {key}: {json.dumps(value, ensure_ascii=False, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    handler = COMMANDS[args.command][0]
    try:
        report, obj = handler(args)
    except (InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "dot":
        if obj is None:
            print(f"error: {args.command} {args.action} has no DOT rendering", file=sys.stderr)
            return 2
        sys.stdout.write(dot.export_dot(obj, _bound(args) or 2))
    elif args.format == "text":
        sys.stdout.write(_text(report))
    else:
        sys.stdout.write(S.dumps(report) + "\n")
    verdict = report["verdict"]
    return 0 if verdict is True or verdict == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
