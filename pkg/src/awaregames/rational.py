"""Correlated rationalizability and the awareness structure built from it.

Beliefs are correlated: a player may hold any distribution over joint
profiles of the opponents. ``build_gamma_star`` turns a profile of
rationalizable strategies into a game with awareness in which each
strategy is a best reply inside some subjective game.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .awareness import AugmentedGame, GameWithAwareness, generalized_info_sets, validate_awareness
from .extform import CHANCE, ExtensiveGame, GameError, NormalFormGame
from .nuglue import check_generalized_nash
from .simplex import find_feasible


@dataclass(frozen=True)
class BeliefWitness:
    player: object
    strategy: object
    belief: Mapping[tuple, Fraction]   # opponent profile (player order, i removed) -> prob


@dataclass(frozen=True)
class RationalizableSets:
    sets: Mapping[object, tuple]
    trace: tuple   # one {player: strategies} per round, starting with the full sets

    def profiles(self):
        return itertools.product(*self.sets.values())


def _full(nf, i, s_i, opp):
    k = nf.index(i)
    return tuple(opp[:k]) + (s_i,) + tuple(opp[k:])


def _opponents(nf, i, D: Mapping | None = None):
    others = [p for p in nf.players if p != i]
    sets = [(D[p] if D is not None else nf.strategies[p]) for p in others]
    return [tuple(c) for c in itertools.product(*sets)]


def witness_belief(nf: NormalFormGame, i, s_i, D_minus_i: Sequence[tuple]) -> BeliefWitness | None:
    """A correlated belief over ``D_minus_i`` against which ``s_i`` is optimal."""
    if s_i not in nf.strategies[i]:
        raise GameError(f"{s_i!r} is not a strategy of {i!r}")
    D = [tuple(d) for d in D_minus_i]
    if not D:
        raise GameError("empty set of opponent profiles")
    u = lambda s, d: nf.payoff(_full(nf, i, s, d), i)
    rivals = [s for s in nf.strategies[i] if s != s_i]
    # variables: one weight per opponent profile, then one surplus per rival strategy
    A, b = [], []
    for r, s in enumerate(rivals):
        A.append([u(s_i, d) - u(s, d) for d in D] + [Fraction(-int(k == r)) for k in range(len(rivals))])
        b.append(Fraction(0))
    A.append([Fraction(1)] * len(D) + [Fraction(0)] * len(rivals))
    b.append(Fraction(1))
    x = find_feasible(A, b)
    if x is None:
        return None
    belief = {d: x[k] for k, d in enumerate(D) if x[k]}
    return BeliefWitness(i, s_i, belief)


def verify_witness(nf: NormalFormGame, w: BeliefWitness) -> bool:
    if any(p < 0 for p in w.belief.values()) or sum(w.belief.values()) != 1:
        return False
    eu = {s: sum(p * nf.payoff(_full(nf, w.player, s, d), w.player) for d, p in w.belief.items())
          for s in nf.strategies[w.player]}
    return eu[w.strategy] == max(eu.values())


def best_response_set(nf: NormalFormGame, i, D_minus_i: Sequence[tuple]) -> tuple:
    return tuple(s for s in nf.strategies[i] if witness_belief(nf, i, s, D_minus_i) is not None)


def rationalizable_sets(nf: NormalFormGame) -> RationalizableSets:
    current = {p: tuple(nf.strategies[p]) for p in nf.players}
    trace = [dict(current)]
    while True:
        nxt = {p: best_response_set(nf, p, _opponents(nf, p, current)) for p in nf.players}
        # B is taken over all strategies; intersecting keeps the trace monotone
        nxt = {p: tuple(s for s in current[p] if s in nxt[p]) for p in nf.players}
        trace.append(dict(nxt))
        if nxt == current:
            break
        current = nxt
    for p in nf.players:
        if best_response_set(nf, p, _opponents(nf, p, current)) != current[p]:
            raise AssertionError(f"rationalizable set of {p!r} is not a fixpoint")
    return RationalizableSets(current, tuple(trace))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def grid_witness(nf: NormalFormGame, i, s_i, D_minus_i: Sequence[tuple], resolution: int = 50):
    """Brute-force search over beliefs whose weights are multiples of ``1/resolution``."""
    D = [tuple(d) for d in D_minus_i]
    table = {s: [nf.payoff(_full(nf, i, s, d), i) for d in D] for s in nf.strategies[i]}
    for counts in _compositions(resolution, len(D)):
        eu = {s: sum(c * v for c, v in zip(counts, row)) for s, row in table.items()}
        if eu[s_i] == max(eu.values()):
            return {d: Fraction(c, resolution) for d, c in zip(D, counts) if c}
    return None


def pure_nash(nf: NormalFormGame) -> list:
    out = []
    for prof in nf.profiles():
        ok = True
        for k, p in enumerate(nf.players):
            here = nf.payoffs[prof][k]
            for s in nf.strategies[p]:
                alt = prof[:k] + (s,) + prof[k + 1:]
                if nf.payoffs[alt][k] > here:
                    ok = False
        if ok:
            out.append(prof)
    return out


# the awareness structure

def _node_label(p):
    return f"P{p}"


def _nf_subtree(nf, depth, prefix_payoff):
    players = nf.players
    if depth == len(players):
        return {"payoffs": list(nf.payoffs[prefix_payoff])}
    p = players[depth]
    return {"owner": p, "moves": {s: _nf_subtree(nf, depth + 1, prefix_payoff + (s,))
                                  for s in nf.strategies[p]}}


def _depth_histories(g, depth, prefix=()):
    return [h for h in g.histories if len(h) == len(prefix) + depth and h[:len(prefix)] == prefix]


def nf_to_extensive(nf: NormalFormGame) -> ExtensiveGame:
    """Players move in list order, each without seeing earlier moves."""
    tree = _nf_subtree(nf, 0, ())
    g = ExtensiveGame.from_tree(nf.players, tree)
    infosets = {_node_label(p): (p, _depth_histories(g, k)) for k, p in enumerate(nf.players)}
    return ExtensiveGame.from_tree(nf.players, tree, infosets)


def view_id(i, s_i) -> str:
    return f"{i}:{s_i}"


def _chance_label(d) -> str:
    return "nature[" + ",".join(map(str, d)) + "]"


@dataclass(frozen=True)
class GammaStar:
    gwa: GameWithAwareness
    rationalizable: RationalizableSets
    witnesses: Mapping   # (player, strategy) -> BeliefWitness


def build_gamma_star(nf: NormalFormGame, s: Sequence) -> GammaStar:
    s = tuple(s)
    rs = rationalizable_sets(nf)
    for p, si in zip(nf.players, s):
        if si not in rs.sets[p]:
            raise GameError(f"{si!r} is not rationalizable for {p!r}")
    U = nf_to_extensive(nf)
    H = U.history_set
    games = {"m": AugmentedGame(U, {label: H for label in U.infosets})}
    fmap = {("m", _node_label(p)): (view_id(p, si), _node_label(p)) for p, si in zip(nf.players, s)}
    witnesses = {}
    for i in nf.players:
        others = [p for p in nf.players if p != i]
        for si in rs.sets[i]:
            w = witness_belief(nf, i, si, _opponents(nf, i, rs.sets))
            if w is None:
                raise AssertionError(f"no witness for rationalizable {si!r}")
            witnesses[(i, si)] = w
            gid = view_id(i, si)
            support = sorted(w.belief, key=lambda d: tuple(map(str, d)))
            tree = {"owner": CHANCE, "chance": {_chance_label(d): w.belief[d] for d in support},
                    "moves": {_chance_label(d): _nf_subtree(nf, 0, ()) for d in support}}
            skeleton = ExtensiveGame.from_tree(nf.players, tree)
            k_i = nf.index(i)
            infosets = {_node_label(i): (i, [h for d in support
                                            for h in _depth_histories(skeleton, k_i, (_chance_label(d),))])}
            for d in support:
                c = _chance_label(d)
                for j, sj in zip(others, d):
                    label = f"{_node_label(j)}@{c}"
                    infosets[label] = (j, _depth_histories(skeleton, nf.index(j), (c,)))
                    fmap[(gid, label)] = (view_id(j, sj), _node_label(j))
            fmap[(gid, _node_label(i))] = (gid, _node_label(i))
            game = ExtensiveGame.from_tree(nf.players, tree, infosets)
            games[gid] = AugmentedGame(game, {label: H for label in game.infosets})
    gwa = GameWithAwareness(U, games, "m", fmap, canonical_form=True)
    return GammaStar(gwa, rs, witnesses)


def _domain(gwa, agent):
    i, gid = agent
    return [a for a in generalized_info_sets(gwa) if a[0] == gid and gwa.anchor_player(a) == i]


def underline_strategy(gwa: GameWithAwareness, agent, local: Mapping) -> dict:
    """Read a local strategy as a strategy of the underlying normal-form game.

    ``local`` is the move distribution the agent uses at its one generalized
    information set.
    """
    dom = _domain(gwa, agent)
    if len(dom) != 1:
        raise GameError(f"local strategy of {agent!r} spans {len(dom)} generalized information sets")
    i = agent[0]
    labels = gwa.underlying.player_infosets(i)
    if len(labels) != 1:
        raise GameError(f"{i!r} has {len(labels)} information sets in the underlying game")
    return {labels[0]: dict(local)}


def _pure(dist):
    (m,) = [m for m, p in dist.items() if p]
    return m


@dataclass
class Theorem51Report:
    part_i: bool
    profile: dict           # anchor -> dist, the constructed generalized profile
    modeler_strategies_match: bool
    part_ii: bool
    enumerated: int
    expected_count: int
    equilibria: int
    bad: list               # (agent, strategy) pairs outside the rationalizable sets

    @property
    def ok(self):
        return self.part_i and self.part_ii


def verify_theorem_5_1(nf: NormalFormGame, s: Sequence, cap: int = 10**6) -> Theorem51Report:
    """(i) the profile that copies each view's own strategy is a generalized
    Nash equilibrium, and (ii) every pure generalized Nash equilibrium only
    uses rationalizable strategies (checked by enumerating all of them)."""
    gs = build_gamma_star(nf, s)
    gwa = gs.gwa
    rep = validate_awareness(gwa)
    if not rep.ok:
        raise AssertionError("constructed game with awareness fails validation")
    anchors = list(generalized_info_sets(gwa))
    agent_of = {a: (gwa.anchor_player(a), a[0]) for a in anchors}

    profile = {}
    for a in anchors:
        i, gid = agent_of[a]
        moves = gwa.anchor_moves(a)
        chosen = next(m for m in moves if view_id(i, m) == gid)
        profile[a] = {m: Fraction(int(m == chosen)) for m in moves}
    part_i = check_generalized_nash(gwa, profile).ok
    match = True
    for p, si in zip(nf.players, s):
        agent = (p, view_id(p, si))
        under = underline_strategy(gwa, agent, profile[_domain(gwa, agent)[0]])
        match &= _pure(next(iter(under.values()))) == si

    expected = 1
    for a in anchors:
        expected *= len(gwa.anchor_moves(a))
    if expected > cap:
        raise GameError(f"{expected} pure generalized profiles exceed the cap {cap}")
    count, eqs, bad = 0, 0, []
    for combo in itertools.product(*(gwa.anchor_moves(a) for a in anchors)):
        count += 1
        prof = {a: {m: Fraction(int(m == c)) for m in gwa.anchor_moves(a)} for a, c in zip(anchors, combo)}
        if not check_generalized_nash(gwa, prof).ok:
            continue
        eqs += 1
        for a, c in zip(anchors, combo):
            i = agent_of[a][0]
            under = _pure(next(iter(underline_strategy(gwa, agent_of[a], prof[a]).values())))
            if under not in gs.rationalizable.sets[i]:
                bad.append((agent_of[a], c))
    return Theorem51Report(part_i and match, profile, match, not bad and count == expected,
                           count, expected, eqs, bad)
