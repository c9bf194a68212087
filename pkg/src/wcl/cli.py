"""Batch runner: ``wcl --suite NAME [flags]`` and ``wcl replay FILE``.

Every check writes one report object (JSON lines by default).  Exit status:
0 when every check came out as the mathematics predicts, 1 when some did
not, 2 for bad arguments or malformed input, 3 when a budget is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import BudgetExceededError, WCLError
from .groups import CyclicGroup, FreeGroup, IntGroup, group_from_header
from .reports import FAIL, PASS, VIOLATED, VerificationReport
from .series import theorem1_constant
from .symcheck import (
    check_lemma25,
    check_lemma31,
    check_thm26_part1,
    check_thm32_summability,
    cyclic_fixture,
    fixture_from_params,
    int_fixture,
    involution_checks,
    make_fixture,
    symmetric_suite,
)
from .theorem1 import (
    case_split_factor_check,
    prop12_divergence,
    sweep_pair,
    theorem1_sweep,
    verify_theorem1,
)
from .weights import (
    ConstantWeight,
    EvenPolyWeightZ,
    LengthPolyWeight,
    check_condition1,
    check_condition2_Z,
    condition2_witness,
    parse_weight,
)

SUITES = ("theorem1", "conditions", "condition2-witness", "prop12", "symmetric", "lemma31", "thm32", "all")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_BUDGET = 10**7
DEFAULT_SPHERE_CAP = 10**6


class UsageError(WCLError):
    pass


def _numbers(text: str, kind=float) -> list:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(kind(part))
        except ValueError:
            raise UsageError(f"cannot parse {part!r} as {kind.__name__}") from None
    if not out:
        raise UsageError(f"empty list {text!r}")
    return out


def _exponent(x: str):
    # keep "3" exact and "2.5" as given
    v = Fraction(x)
    return int(v) if v.denominator == 1 else float(v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wcl", description="Verify weighted group-algebra inequalities.")
    ap.add_argument("--suite", choices=SUITES, default="all")
    ap.add_argument("--rank", default="2", help="free-group rank(s), comma separated")
    ap.add_argument("--n", default=None, help="cyclic group order(s), comma separated")
    ap.add_argument("--weight", default=None, help="weight spec, e.g. lenpoly:a=3 or evenpolyZ:c=1,d=2")
    ap.add_argument("--a", default="3", help="weight exponent(s) for theorem1")
    ap.add_argument("--p", default=None, help="exponent(s) p")
    ap.add_argument("--alpha", type=float, default=None, help="decay exponent for prop12")
    ap.add_argument("--N", dest="N_schedule", default="10000,40000,100000,1000000", help="prop12 truncations")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--support-size", type=int, default=200)
    ap.add_argument("--max-length", type=int, default=12)
    ap.add_argument("--radius", type=int, default=1)
    ap.add_argument("--width", type=float, default=1e-6, help="enclosure width for thm32")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--tolerance", type=float, default=1e-9, help="relative slack for float comparisons")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max products per convolution")
    ap.add_argument("--out", default=None)
    ap.add_argument("--no-timestamp", action="store_true")
    return ap


def build_replay_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wcl replay", description="Recompute reports from a previous run.")
    ap.add_argument("file")
    ap.add_argument("--all", action="store_true", help="replay every entry, not only FAIL/VIOLATED")
    ap.add_argument("--index", type=int, default=None, help="replay only this line (0-based)")
    ap.add_argument("--out", default=None)
    return ap


# -- suites -------------------------------------------------------------------------


def _ranks(args):
    return [int(r) for r in _numbers(args.rank, int)]


def _ps(args, default):
    return [_exponent(x) for x in _numbers(args.p or default, str)]


def suite_theorem1(args) -> list[VerificationReport]:
    a_values = [_exponent(x) for x in _numbers(args.a, str)]
    if args.weight:
        w = parse_weight(args.weight)
        if not isinstance(w, LengthPolyWeight):
            raise UsageError("theorem1 needs a lenpoly weight")
        a_values = [w.a]
    p_values = _ps(args, "2")
    out = []
    for a in a_values:
        C = theorem1_constant(float(a), 1e-9)
        out.append(
            VerificationReport(
                check="theorem1-constant",
                verdict=PASS if C.width < 1e-9 else FAIL,
                lhs=C.lo,
                rhs=C.hi,
                ratio=C.width,
                params={"a": a, "width": 1e-9},
                trials=C.terms,
            )
        )
    for rank in _ranks(args):
        out += theorem1_sweep(
            rank,
            a_values,
            p_values,
            args.trials,
            args.seed,
            args.support_size,
            args.max_length,
            jobs=args.jobs,
            slack=args.tolerance,
            budget=args.budget,
        )
    return out


def _default_weight(args, group):
    if args.weight:
        return parse_weight(args.weight, group)
    if isinstance(group, FreeGroup):
        return LengthPolyWeight(_exponent(_numbers(args.a, str)[0]), group)
    if isinstance(group, IntGroup):
        return EvenPolyWeightZ(1, 2)
    return ConstantWeight.root(group.n, 2, group)


def suite_conditions(args) -> list[VerificationReport]:
    out = []
    groups = [FreeGroup(r) for r in _ranks(args)]
    if args.n:
        groups += [CyclicGroup(n) for n in _numbers(args.n, int)]
    if args.weight and args.weight.startswith("evenpolyZ"):
        groups = [IntGroup()]
    for G in groups:
        w = _default_weight(args, G)
        r = check_condition1(w, G, args.trials, args.seed, args.max_length, tolerance=args.tolerance)
        # submultiplicativity of (n+1)^a is an algebraic identity
        r.expected = PASS if isinstance(w, LengthPolyWeight) else r.verdict
        out.append(r)
        if isinstance(w, LengthPolyWeight) and isinstance(G, FreeGroup):
            out.append(case_split_factor_check(w, G, args.trials, args.seed, args.max_length))
        if isinstance(w, EvenPolyWeightZ):
            for p in _ps(args, "2"):
                out.append(check_condition2_Z(w, float(_conjugate(p))))
    return out


def suite_condition2(args) -> list[VerificationReport]:
    out = []
    for p in _ps(args, "2"):
        q = _conjugate(p)
        if args.n:
            for n in _numbers(args.n, int):
                G = CyclicGroup(n)
                w = _default_weight(args, G)
                for x in G.elements():
                    out.append(condition2_witness(w, q, G, x, radius=None))
            continue
        for rank in _ranks(args):
            G = FreeGroup(rank)
            w = _default_weight(args, G)
            r = condition2_witness(w, q, G, radius=args.radius, cap=DEFAULT_SPHERE_CAP)
            # length weights violate the condition as soon as A_1 is summed
            if isinstance(w, LengthPolyWeight) and args.radius >= 1:
                r.expected = VIOLATED
            out.append(r)
    return out


def _conjugate(p):
    if isinstance(p, float):
        return p / (p - 1)
    P = Fraction(p)
    if P <= 1:
        raise UsageError(f"p = {p} must exceed 1")
    q = P / (P - 1)
    return int(q) if q.denominator == 1 else q


def suite_prop12(args) -> list[VerificationReport]:
    out = []
    Ns = _numbers(args.N_schedule, int)
    for p in _ps(args, "3"):
        p = float(p)
        alpha = args.alpha if args.alpha is not None else 0.5 * (1.0 / p + 0.5)
        out.append(prop12_divergence(p, alpha, Ns))
    return out


def _fixtures(args, ps):
    fixtures = []
    for p in ps:
        if args.n:
            for n in _numbers(args.n, int):
                G = CyclicGroup(n)
                w = parse_weight(args.weight, G) if args.weight else None
                fixtures.append(cyclic_fixture(n, p, w))
        elif args.weight:
            G = IntGroup()
            fixtures.append(make_fixture(G, parse_weight(args.weight, G), p))
        else:
            fixtures += [cyclic_fixture(6, p), cyclic_fixture(8, p), int_fixture(p)]
    return fixtures


def suite_symmetric(args) -> list[VerificationReport]:
    out = []
    for fx in _fixtures(args, _ps(args, "2")):
        fx.require()
        out += symmetric_suite(fx, args.trials, args.seed, support_size=8)
        out.append(_involution_report(fx, args.trials, args.seed))
    return out


def _involution_report(fx, trials: int, seed, support_size: int = 6) -> VerificationReport:
    """Exact involution identities on ``trials`` Gaussian-rational pairs."""
    bad = []
    for i in range(trials):
        rng = np.random.default_rng([seed, i, 1])
        f = fx.random_function(rng, support_size, "rational-complex")
        g = fx.random_function(rng, support_size, "rational-complex")
        res = involution_checks(fx, f, g)
        if not (res["double"] and res["anti"] and res["isometry"]):
            bad.append({"trial": i, **{k: res[k] for k in ("double", "anti", "isometry")}})
    return VerificationReport(
        check="involution",
        verdict=FAIL if bad else PASS,
        params={**fx.describe(), "value_law": "rational-complex", "support_size": support_size},
        witnesses=bad[:5],
        trials=trials,
        seed=seed,
    )


def suite_lemma31(args) -> list[VerificationReport]:
    out = []
    ns = _numbers(args.n, int) if args.n else [4, 5, 6, 7, 8]
    for p in _ps(args, "2"):
        for n in ns:
            G = CyclicGroup(n)
            w = parse_weight(args.weight, G) if args.weight else None
            fx = cyclic_fixture(n, p, w)
            mode = "exhaustive" if n <= 12 else "sampled"
            out.append(check_lemma31(fx, mode, samples=args.trials, seed=args.seed))
    return out


def suite_thm32(args) -> list[VerificationReport]:
    out = []
    for p in _ps(args, "2"):
        q = float(_conjugate(p))
        weights = [parse_weight(args.weight, IntGroup())] if args.weight else [EvenPolyWeightZ(1, 2), int_fixture(p).weight]
        for w in weights:
            out.append(check_thm32_summability(w, q, args.width))
    return out


RUNNERS = {
    "theorem1": suite_theorem1,
    "conditions": suite_conditions,
    "condition2-witness": suite_condition2,
    "prop12": suite_prop12,
    "symmetric": suite_symmetric,
    "lemma31": suite_lemma31,
    "thm32": suite_thm32,
}


def run(args) -> list[VerificationReport]:
    if args.suite == "all":
        out = []
        for name in RUNNERS:
            out += RUNNERS[name](args)
        return out
    return RUNNERS[args.suite](args)


# -- output -----------------------------------------------------------------------


def _entry(r: VerificationReport, timestamps: bool) -> dict:
    d = r.to_dict(timestamps)
    d["version"] = __version__
    return d


def render(reports, fmt: str, timestamps: bool) -> str:
    if fmt == "json":
        return "".join(json.dumps(_entry(r, timestamps), sort_keys=True) + "\n" for r in reports)
    buf = io.StringIO()
    cols = ["check", "verdict", "expected", "lhs", "rhs", "ratio", "trials", "seed", "params"]
    if timestamps:
        cols.append("wall_time")
    wr = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    wr.writeheader()
    for r in reports:
        d = _entry(r, timestamps)
        row = {k: d.get(k) for k in cols}
        row["params"] = json.dumps(d["params"], sort_keys=True)
        wr.writerow(row)
    return buf.getvalue()


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status(reports) -> int:
    return EXIT_OK if all(r.as_expected for r in reports) else EXIT_FAIL


# -- replay -----------------------------------------------------------------------


def recompute(entry: dict) -> VerificationReport:
    """Recompute one report from its parameters (exact path where possible)."""
    check = entry["check"]
    P = entry.get("params", {})
    seed = entry.get("seed")
    if check == "condition2-witness":
        G = group_from_header(P["group"])
        w = parse_weight(P["weight"], G)
        radius = None if P["radius"] == "full" else int(P["radius"])
        q = Fraction(P["q"]) if isinstance(P["q"], (str, int)) else P["q"]
        r = condition2_witness(w, q, G, G.parse_element(P["point"]), radius=radius)
        r.expected = entry.get("expected", r.expected)
        return r
    if check == "theorem1":
        if "trial" in P:
            f, g = sweep_pair(P["rank"], seed, P["trial"], P["support_size"], P["max_length"])
        else:
            f, g = _functions_from_witness(entry, FreeGroup(P["rank"]))
        r = verify_theorem1(f, g, _json_exponent(P["a"]), _json_exponent(P["p"]), params={k: P[k] for k in P if k not in ("a", "p", "rank")})
        r.seed = seed
        return r
    if check == "theorem1-constant":
        C = theorem1_constant(float(_json_exponent(P["a"])), P.get("width", 1e-9))
        return VerificationReport(check=check, verdict=PASS if C.width < P.get("width", 1e-9) else FAIL, lhs=C.lo, rhs=C.hi, ratio=C.width, params=P, trials=C.terms)
    if check in ("lemma25", "thm26-part1"):
        fx = fixture_from_params(P)
        rng = np.random.default_rng([int(seed), int(P["trial"])])
        s = int(P["support_size"])
        law = P.get("value_law", "complex-gaussian")
        f = fx.random_function(rng, int(rng.integers(1, s + 1)), law)
        g = fx.random_function(rng, int(rng.integers(1, s + 1)), law)
        r = (check_lemma25 if check == "lemma25" else check_thm26_part1)(fx, f, g)
        r.params.update(trial=P["trial"], support_size=s, value_law=law)
        r.seed = seed
        return r
    if check == "involution":
        fx = fixture_from_params(P)
        return _involution_report(fx, entry["trials"], seed, P.get("support_size", 6))
    if check == "lemma31":
        fx = fixture_from_params(P)
        return check_lemma31(fx, P["mode"], P.get("samples", 10_000), seed or 0)
    if check == "thm32":
        G = IntGroup()
        return check_thm32_summability(parse_weight(P["weight"], G), P["q"], P["width"], P["windows"])
    if check == "prop12":
        return prop12_divergence(P["p"], P["alpha"], P["N_schedule"])
    if check == "condition1":
        G = group_from_header(P["group"])
        r = check_condition1(parse_weight(P["weight"], G), G, entry["trials"], seed, P["max_length"])
        r.expected = entry.get("expected", r.expected)
        return r
    if check == "case-split":
        G = FreeGroup(P["rank"])
        return case_split_factor_check(LengthPolyWeight(_json_exponent(P["a"]), G), G, entry["trials"], seed, P["max_length"])
    if check == "condition2-Z":
        return check_condition2_Z(parse_weight(P["weight"], IntGroup()), P["q"], P["T"], P["N"])
    raise UsageError(f"cannot replay check {check!r}")


def _json_exponent(x):
    if isinstance(x, str):
        v = Fraction(x)
        return int(v) if v.denominator == 1 else v
    return x


def _functions_from_witness(entry, G):
    from .algebra import SparseFunction

    wit = entry["witnesses"][0]

    def load(rows):
        return SparseFunction(G, {G.parse_element(w): _json_exponent(v) if isinstance(v, str) else v for w, v in rows})

    return load(wit["f"]), load(wit["g"])


def _same(a, b) -> bool:
    from .reports import from_jsonable, jsonable

    return jsonable(from_jsonable(a)) == jsonable(b)


def replay(argv) -> int:
    args = build_replay_parser().parse_args(argv)
    try:
        with open(args.file) as fh:
            lines = [ln for ln in fh if ln.strip()]
        entries = [json.loads(ln) for ln in lines]
    except (OSError, json.JSONDecodeError) as exc:
        print(f"wcl replay: malformed witness file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    picked = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "check" not in e or "verdict" not in e:
            print(f"wcl replay: entry {i} is not a report", file=sys.stderr)
            return EXIT_USAGE
        if args.index is not None:
            if i == args.index:
                picked.append((i, e))
        elif args.all or e["verdict"] in (FAIL, VIOLATED):
            picked.append((i, e))
    out = []
    status = EXIT_OK
    for i, e in picked:
        if e.get("version") != __version__:
            print(f"wcl replay: entry {i} was written by version {e.get('version')}, this is {__version__}; recomputing anyway", file=sys.stderr)
        try:
            r = recompute(e)
        except (KeyError, TypeError, WCLError, ValueError) as exc:
            print(f"wcl replay: entry {i} is malformed: {exc!r}", file=sys.stderr)
            return EXIT_USAGE
        same = _same(e.get("lhs"), r.lhs) and _same(e.get("rhs"), r.rhs) and r.verdict == e["verdict"]
        d = _entry(r, False)
        d["replay"] = {"line": i, "reproduced": same}
        out.append(json.dumps(d, sort_keys=True) + "\n")
        if not same:
            status = EXIT_FAIL
    _emit("".join(out), args.out)
    return status


# -- entry point ------------------------------------------------------------------


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "replay":
        return replay(argv[1:])
    if argv and argv[0] == "run":
        argv = argv[1:]
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    env = os.environ.get("WCL_BUDGET")
    if env:
        try:
            args.budget = int(env)
        except ValueError:
            print(f"wcl: WCL_BUDGET={env!r} is not an integer", file=sys.stderr)
            return EXIT_USAGE
    try:
        reports = run(args)
    except BudgetExceededError as exc:
        print(f"wcl: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (WCLError, ValueError) as exc:
        print(f"wcl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(render(reports, args.format, not args.no_timestamp), args.out)
    return _status(reports)


if __name__ == "__main__":
    sys.exit(main())
