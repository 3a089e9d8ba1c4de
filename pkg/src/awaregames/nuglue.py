"""Gluing a game with awareness into one standard game.

``build_nu`` puts a chance move over the game family at the root and hangs
the playable part of every game below it. Players of the glued game are the
agents ``(player, game id)``; its information sets are the generalized
information sets. The possibility system attached to the result keeps, at each
information set, only the histories from the anchor's own game.

Generalized profiles are dicts ``{anchor: {move: Fraction}}`` where an anchor is
``(game id, infoset label)``; generalized beliefs are
``{anchor: {history: Fraction}}`` with histories of the anchor's game.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .awareness import (GameWithAwareness, feasible_histories,
                        generalized_info_sets, validate_awareness)
from .extform import (CHANCE, ExtensiveGame, GameError, best_response,
                      check_nash, expected_utility, validate_game)


def anchor_label(anchor) -> str:
    return f"{anchor[0]}/{anchor[1]}"


@dataclass(frozen=True, eq=False)
class NuGame:
    game: ExtensiveGame
    gwa: GameWithAwareness
    nu: Mapping[str, Fraction]
    history_origin: Mapping[tuple, tuple]   # glued history -> (game id, history)
    player_origin: Mapping                  # glued player -> (player, game id)
    infoset_anchor: Mapping[str, tuple]     # glued infoset label -> anchor
    possibility: Mapping[str, frozenset]

    def label_of(self, anchor) -> str:
        return anchor_label(anchor)


def uniform_nu(gwa: GameWithAwareness) -> dict:
    n = len(gwa.games)
    return {gid: Fraction(1, n) for gid in sorted(gwa.games)}


def build_nu(gwa: GameWithAwareness, nu: Mapping | None = None, validate: bool = True) -> NuGame:
    if validate:
        rep = validate_awareness(gwa)
        if not rep.ok:
            raise GameError("game with awareness fails validation: "
                            + "; ".join(map(str, rep.violations[:5])))
    nu = uniform_nu(gwa) if nu is None else {g: Fraction(p) for g, p in nu.items()}
    if set(nu) != set(gwa.games):
        raise GameError("nu must give a probability to every game")
    if any(p <= 0 for p in nu.values()) or sum(nu.values()) != 1:
        raise GameError("nu must be strictly positive and sum to 1")

    feasible = {gid: feasible_histories(gwa, gid) for gid in gwa.games}
    histories = [()]
    owner = {(): CHANCE}
    chance = {(): dict(nu)}
    origin = {}
    payoffs = {}
    agents = gwa.agents
    for gid in sorted(gwa.games):
        g = gwa.games[gid].game
        for h in feasible[gid]:
            nh = (gid,) + h
            histories.append(nh)
            origin[nh] = (gid, h)
            live = [m for m in g.moves_at(h) if h + (m,) in feasible[gid]]
            if not live:
                if not g.is_terminal(h):
                    raise GameError(f"every move pruned at {h!r} in {gid!r}")
                payoffs[nh] = {(i, gp): (g.payoffs[h][i] if gp == gid else Fraction(0))
                               for (i, gp) in agents}
                continue
            if g.owner[h] == CHANCE:
                owner[nh] = CHANCE
                chance[nh] = dict(g.chance[h])
            else:
                owner[nh] = (g.owner[h], gwa.F(gid, h)[0])

    infosets = {}
    label_anchor = {}
    possibility = {}
    for anchor, gis in generalized_info_sets(gwa).items():
        members = [(gid,) + h for gid, h in gis.members if h in feasible[gid]]
        if not members:
            continue
        label = anchor_label(anchor)
        agent = (gwa.anchor_player(anchor), anchor[0])
        infosets[label] = (agent, members)
        label_anchor[label] = anchor
        agid, alabel = anchor
        own = frozenset((agid,) + h for h in gwa.games[agid].game.infosets[alabel].histories
                        if h in feasible[agid])
        if not own <= set(members):
            raise GameError(f"histories of {anchor!r} are not in their own generalized information set")
        possibility[label] = own

    game = ExtensiveGame.build(agents, histories, owner, chance, infosets, payoffs)
    rep = validate_game(game)
    if not rep.ok:
        raise GameError("glued game is not a valid perfect-recall game: "
                        + "; ".join(map(str, rep.violations[:5])))
    return NuGame(game, gwa, nu, origin, {a: a for a in agents}, label_anchor, possibility)


def _check_shape(nug: NuGame, keys, what):
    expected = set(nug.infoset_anchor.values())
    if set(keys) != expected:
        missing = expected - set(keys)
        extra = set(keys) - expected
        raise GameError(f"{what} shape mismatch: missing {sorted(map(str, missing))}, "
                        f"unexpected {sorted(map(str, extra))}")


def lift_strategy(gwa: GameWithAwareness, gsigma: Mapping, nug: NuGame) -> dict:
    """Generalized profile -> behavioral profile of the glued game."""
    relevant = {a: d for a, d in gsigma.items() if a in set(nug.infoset_anchor.values())}
    _check_shape(nug, relevant, "generalized profile")
    out = {}
    for label, iset in nug.game.infosets.items():
        anchors = {gwa.F(*nug.history_origin[h]) for h in iset.histories}
        if len(anchors) != 1:
            raise GameError(f"glued information set {label!r} spans several anchors")
        (anchor,) = anchors
        out[label] = dict(gsigma[anchor])
    return out


def lower_strategy(nug: NuGame, sigma: Mapping) -> dict:
    if set(sigma) != set(nug.game.infosets):
        raise GameError("profile does not match the glued game's information sets")
    out = {}
    for label, iset in nug.game.infosets.items():
        gid, h = nug.history_origin[iset.histories[0]]
        out[nug.gwa.F(gid, h)] = dict(sigma[label])
    return out


def lift_beliefs(nug: NuGame, gmu: Mapping) -> dict:
    out = {}
    for label, anchor in nug.infoset_anchor.items():
        if anchor not in gmu:
            raise GameError(f"no generalized belief for {anchor!r}")
        gid = anchor[0]
        dist = {}
        for h, p in gmu[anchor].items():
            nh = (gid,) + tuple(h)
            if p and nh not in nug.possibility[label]:
                raise GameError(f"belief at {anchor!r} on history {h!r} outside the anchor game")
            if p:
                dist[nh] = p
        out[label] = dist
    return out


def lower_beliefs(nug: NuGame, mu: Mapping) -> dict:
    out = {}
    for label, anchor in nug.infoset_anchor.items():
        dist = {}
        for nh, p in mu[label].items():
            if not p:
                continue
            if nh not in nug.possibility[label]:
                raise GameError(f"belief at {label!r} puts mass on {nh!r}, outside the possibility set")
            dist[nug.history_origin[nh][1]] = p
        out[anchor] = dist
    return out


# views of a single game under a generalized profile

def local_view(gwa: GameWithAwareness, gid) -> ExtensiveGame:
    """One game of the family, restricted to playable histories, with movers
    replaced by agents and information sets replaced by anchors."""
    g = gwa.games[gid].game
    feasible = feasible_histories(gwa, gid)
    owner, chance, payoffs, members = {}, {}, {}, {}
    agents = set(gwa.agents)
    for h in feasible:
        live = [m for m in g.moves_at(h) if h + (m,) in feasible]
        if not live:
            continue
        if g.owner[h] == CHANCE:
            owner[h] = CHANCE
            chance[h] = dict(g.chance[h])
        else:
            anchor = gwa.F(gid, h)
            agent = (g.owner[h], anchor[0])
            owner[h] = agent
            agents.add(agent)
            members.setdefault(anchor_label(anchor), (agent, []))[1].append(h)
    players = tuple(sorted(agents, key=lambda a: (str(a[0]), str(a[1]))))
    for h in feasible:
        if h not in owner:
            payoffs[h] = {a: g.payoffs[h][a[0]] for a in players}
    view = ExtensiveGame.build(players, feasible, owner, chance, members, payoffs)
    rep = validate_game(view)
    if not rep.ok:
        raise GameError(f"view of {gid!r} is invalid: " + "; ".join(map(str, rep.violations[:5])))
    return view


def view_profile(gwa: GameWithAwareness, view: ExtensiveGame, gsigma: Mapping) -> dict:
    out = {}
    for label, iset in view.infosets.items():
        gid_anchor = _anchor_from_label(gwa, label)
        out[label] = dict(gsigma[gid_anchor])
    return out


def _anchor_from_label(gwa, label):
    for anchor in gwa.fmap.values():
        if anchor_label(anchor) == label:
            return anchor
    raise GameError(f"unknown anchor label {label!r}")


def induced_profile(gwa: GameWithAwareness, gid, gsigma: Mapping) -> dict:
    """Behavioral profile on a game's own information sets induced by ``F``."""
    g = gwa.games[gid].game
    out = {}
    for label in g.infosets:
        anchor = gwa.fmap[(gid, label)]
        moves = set(g.infoset_moves(label))
        dist = {m: p for m, p in gsigma[anchor].items() if p}
        if not set(dist) <= moves:
            raise GameError(f"{anchor!r} plays moves unavailable at {label!r} in {gid!r}")
        out[label] = {m: dist.get(m, Fraction(0)) for m in g.infoset_moves(label)}
    return out


def payoff_vector(gwa: GameWithAwareness, gsigma: Mapping, gid=None) -> dict:
    gid = gwa.modeler if gid is None else gid
    g = gwa.games[gid].game
    sigma = induced_profile(gwa, gid, gsigma)
    return {i: expected_utility(g, sigma, i) for i in gwa.underlying.players}


def check_gsigma(gwa: GameWithAwareness, gsigma: Mapping) -> None:
    anchors = set(generalized_info_sets(gwa))
    missing = anchors - set(gsigma)
    if missing:
        raise GameError(f"generalized profile misses anchors {sorted(map(str, missing))}")
    for a in anchors:
        dist = gsigma[a]
        moves = set(gwa.anchor_moves(a))
        if any(p and m not in moves for m, p in dist.items()) or any(p < 0 for p in dist.values()):
            raise GameError(f"bad distribution at {a!r}")
        if sum(dist.values()) != 1:
            raise GameError(f"distribution at {a!r} sums to {sum(dist.values())}")


@dataclass
class GeneralizedNashReport:
    ok: bool
    slack: dict          # agent -> slack computed inside the agent's game
    nu_slack: dict       # agent -> slack of the same agent in the glued game
    agree: bool

    def __bool__(self):
        return self.ok


def check_generalized_nash(gwa: GameWithAwareness, gsigma: Mapping, tol=Fraction(0),
                           nu: Mapping | None = None) -> GeneralizedNashReport:
    """Every local strategy must be a best response inside its own game.

    Computed twice: directly in each agent's game, and as Nash slack in the
    glued game. The glued slack equals ``nu(game) * direct slack``.
    """
    check_gsigma(gwa, gsigma)
    direct = {}
    views = {}
    for agent in gwa.agents:
        i, gid = agent
        if gid not in views:
            views[gid] = local_view(gwa, gid)
        view = views[gid]
        sigma = view_profile(gwa, view, gsigma)
        br, _ = best_response(view, sigma, agent, {(): Fraction(1)})
        direct[agent] = br - expected_utility(view, sigma, agent)

    nug = build_nu(gwa, nu, validate=False)
    rep = check_nash(nug.game, lift_strategy(gwa, gsigma, nug))
    nu_slack = dict(rep.slack)
    agree = all(nu_slack[a] == nug.nu[a[1]] * direct[a] for a in gwa.agents)
    ok_direct = all(s <= tol for s in direct.values())
    ok_nu = all(nu_slack[a] <= tol * nug.nu[a[1]] for a in gwa.agents)
    return GeneralizedNashReport(ok_direct and ok_nu, direct, nu_slack, agree and ok_direct == ok_nu)
