"""JSON files for games, profiles and reports.

Every rational is written as a ``"p/q"`` string and every history as a list
of move labels. Tuples that serve as ids (agents, anchors) become lists and
are turned back into tuples on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .awareness import AugmentedGame, GameWithAwareness
from .extform import CHANCE, ExtensiveGame, GameError, NormalFormGame
from .nuglue import NuGame
from .solutions import Assessment, ConsistencyCertificate

FORMAT = "awaregames/1"


class FileError(ValueError):
    """The document is not a well-formed game, profile or certificate file."""


# scalars

def q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def unq(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise FileError(f"rationals must be 'p/q' strings or integers, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise FileError(f"bad rational {s!r}") from exc


def enc_id(x):
    if isinstance(x, tuple):
        return [enc_id(v) for v in x]
    return x


def dec_id(x):
    if isinstance(x, list):
        return tuple(dec_id(v) for v in x)
    return x


def enc_hist(h) -> list:
    return list(h)


def dec_hist(h) -> tuple:
    if not isinstance(h, list):
        raise FileError(f"history must be a list of moves, got {h!r}")
    return tuple(h)


def _sorted_hists(hs):
    return sorted(hs, key=lambda h: (len(h), tuple(map(str, h))))


def _skey(x):
    return json.dumps(enc_id(x), sort_keys=True)


# extensive games

def _tree(g: ExtensiveGame, h=()):
    if g.is_terminal(h):
        return {"payoffs": [q(g.payoffs[h][i]) for i in g.players]}
    node = {"owner": enc_id(g.owner[h])}
    if g.owner[h] == CHANCE:
        node["chance"] = {str(m): q(g.chance[h][m]) for m in g.children[h]}
    node["moves"] = {str(m): _tree(g, h + (m,)) for m in g.children[h]}
    return node


def game_to_json(g: ExtensiveGame) -> dict:
    for m in g.moves:
        if not isinstance(m, str):
            raise GameError(f"move labels must be strings to serialize, got {m!r}")
    return {
        "players": [enc_id(p) for p in g.players],
        "tree": _tree(g),
        "infosets": {label: {"player": enc_id(iset.player),
                             "histories": [enc_hist(h) for h in iset.histories]}
                     for label, iset in sorted(g.infosets.items())},
    }


def _untree(node, players):
    if not isinstance(node, dict):
        raise FileError("tree nodes must be objects")
    out = {}
    if "payoffs" in node:
        u = node["payoffs"]
        if not isinstance(u, list) or len(u) != len(players):
            raise FileError("leaf payoffs must be a list with one entry per player")
        return {"payoffs": dict(zip(players, (unq(v) for v in u)))}
    if "owner" not in node or "moves" not in node:
        raise FileError("inner nodes need 'owner' and 'moves'")
    out["owner"] = dec_id(node["owner"])
    if out["owner"] == CHANCE:
        out["chance"] = {m: unq(p) for m, p in node.get("chance", {}).items()}
    out["moves"] = {m: _untree(child, players) for m, child in node["moves"].items()}
    return out


def game_from_json(doc: Mapping) -> ExtensiveGame:
    try:
        players = tuple(dec_id(p) for p in doc["players"])
        tree = _untree(doc["tree"], players)
        infosets = {label: (dec_id(v["player"]), [dec_hist(h) for h in v["histories"]])
                    for label, v in doc.get("infosets", {}).items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise FileError(f"malformed game: {exc}") from exc
    return ExtensiveGame.from_tree(players, tree, infosets)


# games with awareness

def _awareness_to_json(aware: frozenset, H: frozenset):
    if aware == H:
        return "all"
    return [enc_hist(h) for h in _sorted_hists(aware)]


def gwa_to_json(gwa: GameWithAwareness) -> dict:
    H = gwa.underlying.history_set
    games = []
    for gid in sorted(gwa.games):
        aug = gwa.games[gid]
        entry = {"id": gid}
        entry.update(game_to_json(aug.game))
        entry["awareness"] = {label: _awareness_to_json(aug.awareness[label], H)
                              for label in sorted(aug.awareness)}
        games.append(entry)
    fmap = [{"game": g, "infoset": l, "target_game": tg, "target_infoset": tl}
            for (g, l), (tg, tl) in sorted(gwa.fmap.items())]
    return {"format": FORMAT, "kind": "awareness", "underlying": game_to_json(gwa.underlying),
            "modeler": gwa.modeler, "canonical": gwa.canonical_form, "games": games, "F": fmap}


def gwa_from_json(doc: Mapping) -> GameWithAwareness:
    try:
        U = game_from_json(doc["underlying"])
        H = U.history_set
        games = {}
        for entry in doc["games"]:
            g = game_from_json(entry)
            aware = {}
            for label, a in entry.get("awareness", {}).items():
                aware[label] = H if a == "all" else frozenset(dec_hist(h) for h in a)
            games[entry["id"]] = AugmentedGame(g, aware)
        fmap = {(e["game"], e["infoset"]): (e["target_game"], e["target_infoset"]) for e in doc["F"]}
        return GameWithAwareness(U, games, doc["modeler"], fmap, bool(doc.get("canonical", False)))
    except (KeyError, TypeError, AttributeError) as exc:
        raise FileError(f"malformed game with awareness: {exc}") from exc


def possibility_to_json(K: Mapping) -> dict:
    return {label: [enc_hist(h) for h in _sorted_hists(K[label])] for label in sorted(K)}


def possibility_from_json(doc: Mapping) -> dict:
    return {label: frozenset(dec_hist(h) for h in hs) for label, hs in doc.items()}


def nu_game_to_json(nug: NuGame) -> dict:
    return {"format": FORMAT, "kind": "extensive", "game": game_to_json(nug.game),
            "possibility": possibility_to_json(nug.possibility),
            "nu": {gid: q(p) for gid, p in sorted(nug.nu.items())}}


def extensive_to_json(g: ExtensiveGame, K: Mapping | None = None) -> dict:
    doc = {"format": FORMAT, "kind": "extensive", "game": game_to_json(g)}
    if K is not None:
        doc["possibility"] = possibility_to_json(K)
    return doc


# normal form

def nf_to_json(nf: NormalFormGame) -> dict:
    return {"format": FORMAT, "kind": "normal", "normal_form": {
        "players": [enc_id(p) for p in nf.players],
        "strategies": [list(nf.strategies[p]) for p in nf.players],
        "payoffs": [{"profile": list(prof), "payoffs": [q(v) for v in nf.payoffs[prof]]}
                    for prof in nf.profiles()],
    }}


def nf_from_json(doc: Mapping) -> NormalFormGame:
    try:
        body = doc["normal_form"]
        players = [dec_id(p) for p in body["players"]]
        strategies = dict(zip(players, (tuple(s) for s in body["strategies"])))
        table = {tuple(e["profile"]): [unq(v) for v in e["payoffs"]] for e in body["payoffs"]}
    except (KeyError, TypeError) as exc:
        raise FileError(f"malformed normal-form game: {exc}") from exc
    nf = NormalFormGame.from_table(players, strategies, table)
    rep = nf.validate()
    if not rep.ok:
        raise FileError("normal-form game: " + "; ".join(map(str, rep.violations[:5])))
    return nf


# loading

@dataclass
class Loaded:
    kind: str                 # "extensive", "awareness" or "normal"
    obj: Any
    possibility: Mapping | None = None
    nu: Mapping | None = None


def from_document(doc: Mapping) -> Loaded:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise FileError(f"not a {FORMAT} document")
    kind = doc.get("kind")
    if kind == "awareness":
        return Loaded("awareness", gwa_from_json(doc))
    if kind == "normal":
        return Loaded("normal", nf_from_json(doc))
    if kind == "extensive":
        g = game_from_json(doc.get("game", {}))
        K = possibility_from_json(doc["possibility"]) if "possibility" in doc else None
        nu = {k: unq(v) for k, v in doc["nu"].items()} if "nu" in doc else None
        return Loaded("extensive", g, K, nu)
    raise FileError(f"unknown document kind {kind!r}")


def from_object(obj) -> Loaded:
    if isinstance(obj, NuGame):
        return Loaded("extensive", obj.game, obj.possibility, obj.nu)
    if isinstance(obj, GameWithAwareness):
        return Loaded("awareness", obj)
    if isinstance(obj, NormalFormGame):
        return Loaded("normal", obj)
    if isinstance(obj, ExtensiveGame):
        return Loaded("extensive", obj)
    raise TypeError(f"cannot load {type(obj).__name__}")


def to_document(loaded: Loaded) -> dict:
    if loaded.kind == "awareness":
        return gwa_to_json(loaded.obj)
    if loaded.kind == "normal":
        return nf_to_json(loaded.obj)
    doc = extensive_to_json(loaded.obj, loaded.possibility)
    if loaded.nu is not None:
        doc["nu"] = {k: q(v) for k, v in sorted(loaded.nu.items())}
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# profiles, beliefs and certificates

def dist_to_json(d: Mapping) -> dict:
    return {str(m): q(p) for m, p in sorted(d.items(), key=lambda kv: str(kv[0]))}


def dist_from_json(d: Mapping) -> dict:
    if not isinstance(d, dict):
        raise FileError("distribution must be an object")
    return {m: unq(p) for m, p in d.items()}


def hdist_to_json(d: Mapping) -> list:
    return [{"history": enc_hist(h), "p": q(p)} for h, p in
            sorted(d.items(), key=lambda kv: (len(kv[0]), tuple(map(str, kv[0]))))]


def hdist_from_json(d) -> dict:
    return {dec_hist(e["history"]): unq(e["p"]) for e in d}


def _anchored(d: Mapping, enc) -> list:
    return [{"game": g, "infoset": l, "dist": enc(v)} for (g, l), v in sorted(d.items(), key=lambda kv: _skey(kv[0]))]


def _unanchored(lst, dec) -> dict:
    return {(e["game"], e["infoset"]): dec(e["dist"]) for e in lst}


def profile_to_json(sigma: Mapping, generalized: bool = False):
    if generalized:
        return _anchored(sigma, dist_to_json)
    return {label: dist_to_json(d) for label, d in sorted(sigma.items())}


def profile_from_json(doc, generalized: bool = False) -> dict:
    if generalized:
        return _unanchored(doc, dist_from_json)
    return {label: dist_from_json(d) for label, d in doc.items()}


def beliefs_to_json(mu: Mapping, generalized: bool = False):
    if generalized:
        return _anchored(mu, hdist_to_json)
    return {label: hdist_to_json(d) for label, d in sorted(mu.items())}


def beliefs_from_json(doc, generalized: bool = False) -> dict:
    if generalized:
        return _unanchored(doc, hdist_from_json)
    return {label: hdist_from_json(d) for label, d in doc.items()}


def certificate_to_json(cert: ConsistencyCertificate, generalized: bool = False) -> dict:
    return {"epsilons": [q(e) for e in cert.epsilons], "tol_limit": q(cert.tol_limit),
            "profiles": [profile_to_json(p, generalized) for p in cert.profiles]}


def certificate_from_json(doc: Mapping, generalized: bool = False) -> ConsistencyCertificate:
    try:
        return ConsistencyCertificate([profile_from_json(p, generalized) for p in doc["profiles"]],
                                      tuple(unq(e) for e in doc["epsilons"]),
                                      unq(doc.get("tol_limit", "1/1000000")))
    except (KeyError, TypeError) as exc:
        raise FileError(f"malformed certificate: {exc}") from exc


def assessment_to_json(assessment: Assessment, cert: ConsistencyCertificate | None = None,
                       generalized: bool = False) -> dict:
    doc = {"format": FORMAT, "kind": "generalized-profile" if generalized else "profile",
           "profile": profile_to_json(assessment.profile, generalized)}
    if assessment.beliefs is not None:
        doc["beliefs"] = beliefs_to_json(assessment.beliefs, generalized)
    if cert is not None:
        doc["certificate"] = certificate_to_json(cert, generalized)
    return doc


@dataclass
class ProfileDoc:
    generalized: bool
    profile: dict
    beliefs: dict | None
    certificate: ConsistencyCertificate | None


def profile_doc_from_json(doc: Mapping) -> ProfileDoc:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise FileError(f"not a {FORMAT} document")
    kind = doc.get("kind")
    if kind not in ("profile", "generalized-profile", "normal-profile"):
        raise FileError(f"not a profile document: {kind!r}")
    if kind == "normal-profile":
        prof = {dec_id(e["player"]): dist_from_json(e["dist"]) for e in doc["profile"]}
        cert = None
        if "certificate" in doc:
            cert = [{dec_id(e["player"]): dist_from_json(e["dist"]) for e in p}
                    for p in doc["certificate"]["profiles"]]
        return ProfileDoc(False, prof, None, cert)
    gen = kind == "generalized-profile"
    try:
        prof = profile_from_json(doc["profile"], gen)
        beliefs = beliefs_from_json(doc["beliefs"], gen) if "beliefs" in doc else None
        cert = certificate_from_json(doc["certificate"], gen) if "certificate" in doc else None
    except (KeyError, TypeError) as exc:
        raise FileError(f"malformed profile document: {exc}") from exc
    return ProfileDoc(gen, prof, beliefs, cert)


def normal_profile_to_json(sigma: Mapping, cert=None) -> dict:
    enc = lambda s: [{"player": enc_id(p), "dist": dist_to_json(d)} for p, d in s.items()]
    doc = {"format": FORMAT, "kind": "normal-profile", "profile": enc(sigma)}
    if cert is not None:
        doc["certificate"] = {"profiles": [enc(p) for p in cert]}
    return doc


def keyed(d: Mapping) -> list:
    """A dict with tuple keys as a sorted list of ``{"at", "value"}`` entries."""
    out = []
    for k, v in sorted(d.items(), key=lambda kv: _skey(kv[0])):
        out.append({"at": enc_id(k), "value": q(v) if isinstance(v, (Fraction, int)) else v})
    return out
