"""Built-in example instances.

Trees are rebuilt from the prose descriptions of the standard examples; the
payoff numbers that the prose leaves open are chosen to satisfy every stated
claim and are marked ``derived`` in ``NOTES``.
"""

from __future__ import annotations

from fractions import Fraction

from .awareness import AugmentedGame, GameWithAwareness, canonical
from .extform import CHANCE, ExtensiveGame, NormalFormGame
from .nuglue import build_nu, lift_strategy, lower_beliefs
from .solutions import (Assessment, ConsistencyCertificate, DEFAULT_EPSILONS,
                        full_possibility, limit_beliefs)

NOTES = {
    "fig1": "A picks down_A (1,3) or across_A; B then picks down_B (2,2) or across_B (0,0). "
            "Only the (1,3) payoff is given in prose; the other two are derived.",
    "gpd": "Prisoner's dilemma where A may also escape with E_A for (5,1). PD payoffs are the "
           "standard ordering (derived); nature's probability that B is unaware is 1/2 (derived).",
    "fig2": "1 picks A or L, 2 then picks l or r. Payoffs (A,r)=(1,1) and (L,l)=(-10,-1) come "
            "from prose; (A,l)=(1,0) and (L,r)=(2,-2) are derived so that 2 prefers l after L "
            "and r after A, and 1 prefers L against r.",
    "syn1": "1 picks x or y; after x, 2 picks m2 or n2 but thinks only n2 exists.",
    "pd-nf": "Normal-form prisoner's dilemma.",
    "mp": "Matching pennies; player 1 wins on a match.",
    "nbr3": "3x2 game in which B is never a best response but T and M are.",
}


def _leaf(*u):
    return {"payoffs": list(u)}


# A moves first, B moves only after across_A

def fig1() -> ExtensiveGame:
    tree = {"owner": "A", "moves": {
        "down_A": _leaf(1, 3),
        "across_A": {"owner": "B", "moves": {
            "down_B": _leaf(2, 2),
            "across_B": _leaf(0, 0),
        }},
    }}
    infosets = {"I_A": ("A", [()]), "I_B": ("B", [("across_A",)])}
    return ExtensiveGame.from_tree(("A", "B"), tree, infosets)


def canonical_fig1() -> GameWithAwareness:
    return canonical(fig1())


# prisoner's dilemma with an escape move

PD = {("C_A", "C_B"): (3, 3), ("C_A", "D_B"): (0, 4),
      ("D_A", "C_B"): (4, 0), ("D_A", "D_B"): (1, 1)}
ESCAPE = (5, 1)


def _pd_tree(with_escape: bool):
    moves = {a: {"owner": "B", "moves": {b: _leaf(*PD[(a, b)]) for b in ("C_B", "D_B")}}
             for a in ("C_A", "D_A")}
    if with_escape:
        moves["E_A"] = _leaf(*ESCAPE)
    return {"owner": "A", "moves": moves}


def _pd_game(with_escape: bool) -> ExtensiveGame:
    infosets = {"I_A": ("A", [()]), "I_B": ("B", [("C_A",), ("D_A",)])}
    return ExtensiveGame.from_tree(("A", "B"), _pd_tree(with_escape), infosets)


def gpd_underlying() -> ExtensiveGame:
    return _pd_game(True)


def gpd(p=Fraction(1, 2)) -> GameWithAwareness:
    """Four-game family: the modeler's game, A's view (B may be unaware of
    E_A), B's view when unaware of E_A, and B's view when aware of it."""
    p = Fraction(p)
    U = gpd_underlying()
    H = U.history_set
    H_pd = frozenset(h for h in H if "E_A" not in h)

    m = AugmentedGame(_pd_game(True), {"I_A": H, "I_B": H})
    b1 = AugmentedGame(_pd_game(False), {"I_A": H_pd, "I_B": H_pd})
    b2 = AugmentedGame(_pd_game(True), {"I_A": H, "I_B": H})

    branch = lambda: _pd_tree(True)
    tree = {"owner": CHANCE, "chance": {"unaware_B": p, "aware_B": 1 - p},
            "moves": {"unaware_B": branch(), "aware_B": branch()}}
    infosets = {
        "I_A": ("A", [("unaware_B",), ("aware_B",)]),
        "I_B.u": ("B", [("unaware_B", "C_A"), ("unaware_B", "D_A")]),
        "I_B.a": ("B", [("aware_B", "C_A"), ("aware_B", "D_A")]),
    }
    ga = AugmentedGame(ExtensiveGame.from_tree(("A", "B"), tree, infosets),
                       {"I_A": H, "I_B.u": H_pd, "I_B.a": H})

    fmap = {
        ("m", "I_A"): ("A", "I_A"), ("m", "I_B"): ("B.2", "I_B"),
        ("A", "I_A"): ("A", "I_A"), ("A", "I_B.u"): ("B.1", "I_B"), ("A", "I_B.a"): ("B.2", "I_B"),
        ("B.1", "I_A"): ("B.1", "I_A"), ("B.1", "I_B"): ("B.1", "I_B"),
        ("B.2", "I_A"): ("B.2", "I_A"), ("B.2", "I_B"): ("B.2", "I_B"),
    }
    return GameWithAwareness(U, {"m": m, "A": ga, "B.1": b1, "B.2": b2}, "m", fmap)


def gpd_nu():
    return build_nu(gpd())


def gpd_defect_escape():
    """Generalized assessment: A escapes whenever E_A is in view, everyone
    defects otherwise, with a uniform-tremble certificate."""
    gwa = gpd()
    gsigma = {
        ("A", "I_A"): {"E_A": 1},
        ("B.1", "I_A"): {"D_A": 1},
        ("B.1", "I_B"): {"D_B": 1},
        ("B.2", "I_A"): {"E_A": 1},
        ("B.2", "I_B"): {"D_B": 1},
    }
    return gwa, _generalized_with_trembles(gwa, gsigma)


def _pad(gwa, gsigma):
    return {a: {m: Fraction(d.get(m, 0)) for m in gwa.anchor_moves(a)} for a, d in gsigma.items()}


def _generalized_with_trembles(gwa, gsigma):
    gsigma = _pad(gwa, gsigma)
    nug = build_nu(gwa)
    profiles = []
    for eps in DEFAULT_EPSILONS:
        profiles.append({a: {m: (1 - eps) * p + eps / len(d) for m, p in d.items()}
                         for a, d in gsigma.items()})
    cert = ConsistencyCertificate(profiles)
    lifted = ConsistencyCertificate([lift_strategy(gwa, q, nug) for q in profiles])
    mu = lower_beliefs(nug, limit_beliefs(nug.game, nug.possibility, lifted))
    return Assessment(gsigma, mu), cert


def gpd_bad_cooperate():
    """Assessment of the glued game in which B, seeing C_A/D_A while aware of
    E_A, cooperates. Beliefs at that information set sit on runs of other
    games where B's payoff there is identically 0."""
    nug = gpd_nu()
    g = nug.game
    pure = {"A/I_A": "E_A", "B.1/I_A": "D_A", "B.1/I_B": "D_B", "B.2/I_A": "E_A", "B.2/I_B": "C_B"}
    sigma = {label: {m: Fraction(int(m == pure[label])) for m in g.infoset_moves(label)}
             for label in g.infosets}
    profiles = []
    for eps in DEFAULT_EPSILONS:
        e2 = eps * eps
        profiles.append({
            "A/I_A": {"C_A": eps, "D_A": e2, "E_A": 1 - eps - e2},
            "B.1/I_A": {"C_A": eps, "D_A": 1 - eps},
            "B.1/I_B": {"C_B": eps, "D_B": 1 - eps},
            "B.2/I_A": {"C_A": e2, "D_A": e2, "E_A": 1 - 2 * e2},
            "B.2/I_B": {"C_B": 1 - eps, "D_B": eps},
        })
    cert = ConsistencyCertificate(profiles)
    mu = limit_beliefs(g, full_possibility(g), cert)
    return nug, Assessment(sigma, mu), cert


def gpd_bad_point_mass():
    """Same profile with the belief at B's aware set all on A's aware branch."""
    nug, assessment, cert = gpd_bad_cooperate()
    mu = dict(assessment.beliefs)
    mu["B.2/I_B"] = {("A", "aware_B", "C_A"): Fraction(1)}
    return nug, Assessment(assessment.profile, mu)


# 1 is wrong about what 2 can see

FIG2_PAYOFFS = {("A", "l"): (1, 0), ("A", "r"): (1, 1), ("L", "l"): (-10, -1), ("L", "r"): (2, -2)}


def _fig2_tree(with_L: bool):
    first = ("A", "L") if with_L else ("A",)
    return {"owner": 1, "moves": {
        a: {"owner": 2, "moves": {b: _leaf(*FIG2_PAYOFFS[(a, b)]) for b in ("l", "r")}}
        for a in first}}


def fig2_underlying() -> ExtensiveGame:
    infosets = {"1.1": (1, [()]), "2.0": (2, [("A",)]), "2.1": (2, [("L",)])}
    return ExtensiveGame.from_tree((1, 2), _fig2_tree(True), infosets)


def fig2() -> GameWithAwareness:
    """1 wrongly thinks 2 is unaware of L; 2 knows everything."""
    U = fig2_underlying()
    H = U.history_set
    H_noL = frozenset(h for h in H if "L" not in h)
    m = AugmentedGame(fig2_underlying(), {"1.1": H, "2.0": H, "2.1": H})
    v11 = AugmentedGame(fig2_underlying(), {"1.1": H, "2.0": H_noL, "2.1": H_noL})
    v22 = AugmentedGame(ExtensiveGame.from_tree(
        (1, 2), _fig2_tree(False), {"1.2": (1, [()]), "2.2": (2, [("A",)])}),
        {"1.2": H_noL, "2.2": H_noL})
    fmap = {
        ("m", "1.1"): ("1.1", "1.1"), ("m", "2.0"): ("m", "2.0"), ("m", "2.1"): ("m", "2.1"),
        ("1.1", "1.1"): ("1.1", "1.1"), ("1.1", "2.0"): ("2.2", "2.2"), ("1.1", "2.1"): ("2.2", "2.2"),
        ("2.2", "1.2"): ("2.2", "1.2"), ("2.2", "2.2"): ("2.2", "2.2"),
    }
    return GameWithAwareness(U, {"m": m, "1.1": v11, "2.2": v22}, "m", fmap)


def fig2_equilibrium_profile() -> dict:
    return {
        ("2.2", "1.2"): {"A": Fraction(1)},
        ("2.2", "2.2"): {"l": Fraction(0), "r": Fraction(1)},
        ("1.1", "1.1"): {"A": Fraction(0), "L": Fraction(1)},
        ("m", "2.1"): {"l": Fraction(1), "r": Fraction(0)},
        ("m", "2.0"): {"l": Fraction(0), "r": Fraction(1)},
    }


# feasibility pruning fixture

SYN1_PAYOFFS = {("y",): (1, 0), ("x", "m2"): (0, 5), ("x", "n2"): (2, 1)}


def _syn1_tree(with_m2: bool):
    second = ("m2", "n2") if with_m2 else ("n2",)
    return {"owner": 1, "moves": {
        "y": _leaf(*SYN1_PAYOFFS[("y",)]),
        "x": {"owner": 2, "moves": {b: _leaf(*SYN1_PAYOFFS[("x", b)]) for b in second}},
    }}


def syn1_underlying() -> ExtensiveGame:
    return ExtensiveGame.from_tree((1, 2), _syn1_tree(True), {"1": (1, [()]), "2": (2, [("x",)])})


SYN1_PRUNED = frozenset({("x", "m2")})


def syn1() -> GameWithAwareness:
    """The modeler's game has m2, but 2 moves believing a game without it."""
    U = syn1_underlying()
    H = U.history_set
    H_no = frozenset(h for h in H if "m2" not in h)
    m = AugmentedGame(syn1_underlying(), {"1": H, "2": H_no})
    v2 = AugmentedGame(ExtensiveGame.from_tree(
        (1, 2), _syn1_tree(False), {"1": (1, [()]), "2": (2, [("x",)])}), {"1": H_no, "2": H_no})
    fmap = {("m", "1"): ("m", "1"), ("m", "2"): ("2v", "2"),
            ("2v", "1"): ("2v", "1"), ("2v", "2"): ("2v", "2")}
    return GameWithAwareness(U, {"m": m, "2v": v2}, "m", fmap)


# normal-form fixtures

def pd_nf() -> NormalFormGame:
    return NormalFormGame.from_table((1, 2), {1: ("C", "D"), 2: ("C", "D")}, {
        ("C", "C"): (3, 3), ("C", "D"): (0, 4), ("D", "C"): (4, 0), ("D", "D"): (1, 1)})


def mp() -> NormalFormGame:
    return NormalFormGame.from_table((1, 2), {1: ("heads", "tails"), 2: ("heads", "tails")}, {
        ("heads", "heads"): (1, -1), ("heads", "tails"): (-1, 1),
        ("tails", "heads"): (-1, 1), ("tails", "tails"): (1, -1)})


def nbr3() -> NormalFormGame:
    return NormalFormGame.from_table((1, 2), {1: ("T", "M", "B"), 2: ("L", "R")}, {
        ("T", "L"): (3, 1), ("T", "R"): (0, 0),
        ("M", "L"): (0, 0), ("M", "R"): (3, 1),
        ("B", "L"): (1, 0), ("B", "R"): (1, 0)})


DEMOS = {
    "fig1": fig1,
    "canonical-fig1": canonical_fig1,
    "gpd": gpd,
    "gpd-nu": gpd_nu,
    "fig2": fig2,
    "syn1": syn1,
    "pd-nf": pd_nf,
    "mp": mp,
    "nbr3": nbr3,
}


def demo(name: str):
    if name not in DEMOS:
        raise KeyError(f"unknown demo {name!r}; known: {', '.join(sorted(DEMOS))}")
    return DEMOS[name]()
