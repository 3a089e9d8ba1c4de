"""Command-line interface.

Exit codes: 0 pass, 1 check failed, 2 invalid input, 3 solver failure.
Games are read from JSON files or named built-ins (``demo:gpd``); reports go
to stdout as JSON, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import demos
from .awareness import validate_awareness
from .extform import (GameError, check_nash, expected_utility, to_agent_normal_form,
                      validate_game)
from .gamefile import (FileError, Loaded, assessment_to_json, dumps, from_document,
                       from_object, gwa_to_json, keyed, nu_game_to_json,
                       possibility_from_json, profile_doc_from_json, unq)
from .nuglue import build_nu, check_generalized_nash, payoff_vector
from .rational import build_gamma_star, rationalizable_sets, verify_theorem_5_1
from .solutions import (Assessment, SolveFailure, SolverConfig, check_conditional_seq_eq,
                        check_generalized_seq_eq, check_perfect_equilibrium,
                        check_sequential_equilibrium, full_possibility,
                        solve_conditional_seq_eq, solve_generalized_seq_eq)

PASS, FAIL, INVALID, SOLVER = 0, 1, 2, 3


class InputError(Exception):
    pass


def load_game(ref: str) -> Loaded:
    if ref.startswith("demo:"):
        try:
            return from_object(demos.demo(ref[5:]))
        except KeyError as exc:
            raise InputError(str(exc)) from exc
    return from_document(_read_json(ref))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _need(loaded: Loaded, *kinds):
    if loaded.kind not in kinds:
        raise InputError(f"expected a {' or '.join(kinds)} game, got {loaded.kind}")


def _emit(report: dict, out=None, artifact=None):
    if out and artifact is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(dumps(artifact))
    sys.stdout.write(dumps(report))


def _violations(rep):
    return [{"kind": v.kind, "where": str(v.where), "detail": v.detail} for v in rep.violations]


# commands

def cmd_validate(args):
    loaded = load_game(args.game)
    if loaded.kind == "awareness":
        rep = validate_awareness(loaded.obj)
    elif loaded.kind == "extensive":
        rep = validate_game(loaded.obj)
    else:
        rep = loaded.obj.validate()
    _emit({"command": "validate", "kind": loaded.kind, "ok": rep.ok, "violations": _violations(rep)})
    return PASS if rep.ok else FAIL


def _read_nu(arg):
    if arg in (None, "uniform"):
        return None
    doc = _read_json(arg)
    return {k: unq(v) for k, v in doc.items()}


def cmd_build_nu(args):
    loaded = load_game(args.game)
    _need(loaded, "awareness")
    nug = build_nu(loaded.obj, _read_nu(args.nu))
    doc = nu_game_to_json(nug)
    if args.out:
        _emit({"command": "build-nu", "players": [list(p) for p in nug.game.players],
               "infosets": len(nug.game.infosets), "out": args.out}, args.out, doc)
    else:
        sys.stdout.write(dumps(doc))
    return PASS


def _possibility(loaded, arg):
    g = loaded.obj
    if arg in (None, "full"):
        return full_possibility(g)
    if arg == "theorem42":
        if loaded.possibility is None:
            raise InputError("this game carries no possibility system from a glued construction")
        return loaded.possibility
    return possibility_from_json(_read_json(arg))


def _rationality_json(rep):
    return {"ok": rep.ok, "slack": keyed(rep.slack)}


def _consistency_json(rep):
    return {"ok": rep.ok, "profile_distances": [float(d) for d in rep.profile_distances],
            "belief_distances": [float(d) for d in rep.belief_distances], "problems": rep.problems}


def _eq_json(rep):
    return {"ok": rep.ok, "rationality": _rationality_json(rep.rationality),
            "consistency": _consistency_json(rep.consistency)}


def cmd_check(args):
    loaded = load_game(args.game)
    pdoc = profile_doc_from_json(_read_json(args.profile))
    kind = args.kind
    tol = unq(args.tol)
    report = {"command": "check", "kind": kind}

    if kind == "perfect":
        nf = loaded.obj if loaded.kind == "normal" else to_agent_normal_form(loaded.obj)
        if pdoc.certificate is None:
            raise InputError("perfect-equilibrium check needs a certificate")
        cert = pdoc.certificate
        if not isinstance(cert, list):
            cert = [p for p in cert.profiles]
        rep = check_perfect_equilibrium(nf, pdoc.profile, cert)
        report.update(ok=rep.ok, problems=rep.problems)
        _emit(report)
        return PASS if rep.ok else FAIL

    if kind in ("gnash", "gseq"):
        _need(loaded, "awareness")
        if not pdoc.generalized:
            raise InputError("generalized checks need a generalized-profile document")
        gwa = loaded.obj
        if kind == "gnash":
            rep = check_generalized_nash(gwa, pdoc.profile, tol)
            report.update(ok=rep.ok, slack=keyed(rep.slack), glued_slack=keyed(rep.nu_slack),
                          paths_agree=rep.agree)
        else:
            if pdoc.beliefs is None or pdoc.certificate is None:
                raise InputError("gseq needs beliefs and a certificate")
            rep = check_generalized_seq_eq(gwa, Assessment(pdoc.profile, pdoc.beliefs),
                                           pdoc.certificate, tol=tol)
            report.update(ok=rep.ok, direct=_eq_json(rep.direct), glued=_eq_json(rep.glued),
                          paths_agree=rep.agree)
        report["payoffs"] = keyed(payoff_vector(gwa, pdoc.profile))
        _emit(report)
        return PASS if rep.ok else FAIL

    _need(loaded, "extensive")
    g = loaded.obj
    if pdoc.generalized:
        raise InputError("standard checks need a plain profile document")
    if kind == "nash":
        rep = check_nash(g, pdoc.profile, tol)
        report.update(ok=rep.ok, slack=keyed(rep.slack))
        _emit(report)
        return PASS if rep.ok else FAIL
    if pdoc.beliefs is None or pdoc.certificate is None:
        raise InputError(f"{kind} needs beliefs and a certificate")
    assessment = Assessment(pdoc.profile, pdoc.beliefs)
    if kind == "seq":
        rep = check_sequential_equilibrium(g, assessment, pdoc.certificate, tol)
        report.update(_eq_json(rep))
        _emit(report)
        return PASS if rep.ok else FAIL
    if kind == "cseq":
        K = _possibility(loaded, args.K)
        outside = sorted(label for label, d in pdoc.beliefs.items()
                         if any(p and h not in K.get(label, ()) for h, p in d.items()))
        if outside:
            report.update(ok=False, problems=[f"beliefs at {label} put mass outside the possibility set"
                                              for label in outside])
            _emit(report)
            return FAIL
        rep = check_conditional_seq_eq(g, K, assessment, pdoc.certificate, tol)
        report.update(_eq_json(rep))
        _emit(report)
        return PASS if rep.ok else FAIL
    raise InputError(f"unknown check kind {kind!r}")


def _config(args):
    return SolverConfig(seed=args.seed, restarts=args.restarts)


def cmd_solve(args):
    loaded = load_game(args.game)
    kind = args.kind
    cfg = _config(args)
    try:
        if kind == "gseq" or (kind == "nash" and loaded.kind == "awareness"):
            _need(loaded, "awareness")
            gwa = loaded.obj
            assessment, cert = solve_generalized_seq_eq(gwa, cfg)
            doc = assessment_to_json(assessment, cert, generalized=True)
            recheck = check_generalized_seq_eq(gwa, assessment, cert)
            extra = {"payoffs": keyed(payoff_vector(gwa, assessment.profile))}
        else:
            _need(loaded, "extensive")
            g = loaded.obj
            K = _possibility(loaded, args.K)
            assessment, cert = solve_conditional_seq_eq(g, K, cfg)
            doc = assessment_to_json(assessment, cert)
            recheck = check_conditional_seq_eq(g, K, assessment, cert)
            extra = {"payoffs": keyed({i: expected_utility(g, assessment.profile, i)
                                       for i in g.players})}
    except SolveFailure as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        _emit({"command": "solve", "kind": kind, "ok": False, "error": str(exc)})
        return SOLVER
    report = {"command": "solve", "kind": kind, "ok": recheck.ok, "solution": doc}
    report.update(extra)
    _emit(report, args.out, doc)
    return PASS if recheck.ok else SOLVER


def _nf(args):
    loaded = load_game(args.game)
    _need(loaded, "normal")
    return loaded.obj


def _parse_profile(nf, text):
    if not text:
        raise InputError("--profile is required")
    parts = text.split(",")
    if len(parts) != len(nf.players):
        raise InputError(f"profile needs {len(nf.players)} strategies")
    for p, s in zip(nf.players, parts):
        if s not in nf.strategies[p]:
            raise InputError(f"{s!r} is not a strategy of {p!r}")
    return tuple(parts)


def cmd_rationalize(args):
    nf = _nf(args)
    rs = rationalizable_sets(nf)
    enc = lambda d: [{"player": p, "strategies": list(d[p])} for p in nf.players]
    _emit({"command": "rationalize", "sets": enc(rs.sets), "trace": [enc(t) for t in rs.trace]})
    return PASS


def cmd_gamma_star(args):
    nf = _nf(args)
    s = _parse_profile(nf, args.profile)
    try:
        gs = build_gamma_star(nf, s)
    except GameError as exc:
        print(str(exc), file=sys.stderr)
        return INVALID
    doc = gwa_to_json(gs.gwa)
    if args.out:
        rep = validate_awareness(gs.gwa)
        _emit({"command": "gamma-star", "games": sorted(gs.gwa.games), "valid": rep.ok,
               "out": args.out}, args.out, doc)
    else:
        sys.stdout.write(dumps(doc))
    return PASS


def cmd_verify_5_1(args):
    nf = _nf(args)
    s = _parse_profile(nf, args.profile)
    try:
        rep = verify_theorem_5_1(nf, s, cap=args.cap)
    except GameError as exc:
        print(str(exc), file=sys.stderr)
        return INVALID
    _emit({"command": "verify-5-1", "part_i": rep.part_i, "part_ii": rep.part_ii,
           "modeler_strategies_match": rep.modeler_strategies_match,
           "enumerated": rep.enumerated, "expected_count": rep.expected_count,
           "pure_generalized_nash": rep.equilibria,
           "outside_rationalizable": [{"agent": list(a), "move": m} for a, m in rep.bad]})
    return PASS if rep.ok else FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="awaregames", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="run the validators on a game file")
    p.add_argument("game")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build-nu", help="glue a game with awareness into one standard game")
    p.add_argument("game")
    p.add_argument("--nu", default="uniform", help="'uniform' or a JSON file {game id: 'p/q'}")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_nu)

    p = sub.add_parser("check", help="check a profile or assessment")
    p.add_argument("kind", choices=["nash", "seq", "cseq", "gnash", "gseq", "perfect"])
    p.add_argument("game")
    p.add_argument("profile")
    p.add_argument("--K", default="full", help="'full', 'theorem42' or a possibility JSON file")
    p.add_argument("--tol", default="0")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="compute an equilibrium with a certificate")
    p.add_argument("kind", choices=["cseq", "gseq", "nash"])
    p.add_argument("game")
    p.add_argument("--K", default="full")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("rationalize", help="correlated rationalizable strategies")
    p.add_argument("game")
    p.set_defaults(func=cmd_rationalize)

    for name, func in (("gamma-star", cmd_gamma_star), ("verify-5-1", cmd_verify_5_1)):
        p = sub.add_parser(name)
        p.add_argument("game")
        p.add_argument("--profile", required=True, help="comma-separated pure profile")
        if name == "gamma-star":
            p.add_argument("--out")
        else:
            p.add_argument("--cap", type=int, default=10**6)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileError, GameError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
