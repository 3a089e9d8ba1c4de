"""Augmented games, games with awareness, and the consistency-condition validator.

The awareness map of an augmented game is stored per information set, and so
is the map ``F`` from (game, information set) to the (game, information set)
the mover believes she is in. Only conditions C1, C2, C5, C8 and C9 and the
three informal augmented-game requirements are checked; passing the validator
is necessary but not sufficient for the full set of constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .extform import (CHANCE, ExtensiveGame, GameError, ValidationReport,
                      is_prefix, validate_game)

Anchor = tuple  # (game id, infoset label)


@dataclass(frozen=True, eq=False)
class AugmentedGame:
    game: ExtensiveGame
    awareness: Mapping[str, frozenset]  # infoset label -> set of underlying histories

    def aware(self, h) -> frozenset:
        return self.awareness[self.game.infoset_of[h]]


@dataclass(frozen=True)
class GeneralizedInfoSet:
    anchor: Anchor
    members: frozenset  # of (game id, history)


@dataclass(frozen=True, eq=False)
class GameWithAwareness:
    underlying: ExtensiveGame
    games: Mapping[str, AugmentedGame]
    modeler: str
    fmap: Mapping[Anchor, Anchor]
    canonical_form: bool = False

    def F(self, gid, h) -> Anchor:
        g = self.games[gid].game
        return self.fmap[(gid, g.infoset_of[h])]

    def player_histories(self, gid):
        g = self.games[gid].game
        return [h for h in g.histories if h in g.owner and g.owner[h] != CHANCE]

    @cached_property
    def agents(self) -> tuple:
        """Pairs (player, game) such that the player takes that game to be the real one."""
        out = set()
        for (gid, label), (target, _) in self.fmap.items():
            if gid in self.games and label in self.games[gid].game.infosets:
                out.add((self.games[gid].game.infosets[label].player, target))
        return tuple(sorted(out, key=lambda a: (str(a[0]), str(a[1]))))

    def anchor_moves(self, anchor: Anchor) -> tuple:
        gid, label = anchor
        return self.games[gid].game.infoset_moves(label)

    def anchor_player(self, anchor: Anchor):
        gid, label = anchor
        return self.games[gid].game.infosets[label].player


def project(h, underlying: ExtensiveGame) -> tuple:
    """Drop every move that is not a move of the underlying game."""
    M = underlying.moves
    return tuple(m for m in h if m in M)


def prefix_closure(histories) -> frozenset:
    out = set()
    for h in histories:
        h = tuple(h)
        for k in range(len(h) + 1):
            out.add(h[:k])
    return frozenset(out)


def _check_augmented(aug: AugmentedGame, underlying: ExtensiveGame, report: ValidationReport, gid):
    g = aug.game
    H = underlying.history_set
    for label, iset in g.infosets.items():
        if label not in aug.awareness:
            report.add("awareness", (gid, label), "no awareness level for information set")
        elif not aug.awareness[label] <= H:
            report.add("awareness", (gid, label), "awareness contains non-histories of the underlying game")
    for h in g.histories:
        if project(h, underlying) not in H:
            report.add("projection", (gid, h), "projection is not an underlying history")
    for z in g.terminals:
        zbar = project(z, underlying)
        if zbar not in H or not underlying.is_terminal(zbar):
            report.add("payoff-knowledge", (gid, z), "run does not project onto an underlying run")
            continue
        for i in underlying.players:
            if g.payoffs.get(z, {}).get(i) != underlying.payoffs[zbar][i]:
                report.add("payoff-knowledge", (gid, z), f"u_{i} differs from underlying payoff")
    # players do not forget histories they were aware of
    for h in g.histories:
        i = g.owner.get(h)
        if i is None or i == CHANCE or h not in g.infoset_of:
            continue
        for k in range(len(h)):
            p = h[:k]
            if g.owner.get(p) == i and p in g.infoset_of:
                a_p, a_h = aug.awareness.get(g.infoset_of[p]), aug.awareness.get(g.infoset_of[h])
                if a_p is not None and a_h is not None and not a_p <= a_h:
                    report.add("awareness-monotone", (gid, h), f"forgets histories known at {p!r}")


def _c2_moves(underlying, a, hbar):
    return frozenset(m for m in underlying.moves_at(hbar) if hbar + (m,) in a) if hbar in underlying.history_set else frozenset()


def validate_awareness(gwa: GameWithAwareness) -> ValidationReport:
    report = ValidationReport()
    U = gwa.underlying
    report.extend(validate_game(U), prefix="underlying")
    if gwa.modeler not in gwa.games:
        report.add("modeler", gwa.modeler, "modeler game not in the family")
    for gid, aug in gwa.games.items():
        sub = validate_game(aug.game)
        report.extend(sub, prefix=gid)
        if sub.ok:
            _check_augmented(aug, U, report, gid)
    if not report.ok:
        return report

    # F total and well-typed
    for gid, aug in gwa.games.items():
        for label, iset in aug.game.infosets.items():
            key = (gid, label)
            if key not in gwa.fmap:
                report.add("F-total", key, "no F entry")
                continue
            tg, tl = gwa.fmap[key]
            if tg not in gwa.games or tl not in gwa.games[tg].game.infosets:
                report.add("F-target", key, f"unknown target {(tg, tl)!r}")
            elif gwa.games[tg].game.infosets[tl].player != iset.player:
                report.add("F-target", key, "target information set belongs to another player")
    for key in gwa.fmap:
        gid, label = key
        if gid not in gwa.games or label not in gwa.games[gid].game.infosets:
            report.add("F-domain", key, "F entry for unknown information set")
    if not report.ok:
        return report

    for gid, aug in gwa.games.items():
        g = aug.game
        for h in gwa.player_histories(gid):
            i = g.owner[h]
            tg, tl = gwa.F(gid, h)
            a = aug.aware(h)
            target = gwa.games[tg]
            tgame = target.game
            where = (gid, h)
            # C1
            if frozenset(project(x, U) for x in tgame.histories) != a:
                report.add("C1", where, f"histories of {tg!r} do not match the awareness level")
            # C2
            for h2 in gwa.player_histories(tg):
                j = tgame.owner[h2]
                if not target.aware(h2) <= a:
                    report.add("C2", where, f"{j!r} at {h2!r} in {tg!r} aware of more than the mover")
                hbar = project(h2, U)
                if _c2_moves(U, a, hbar) != frozenset(tgame.moves_at(h2)):
                    report.add("C2", where, f"moves at {h2!r} in {tg!r} differ from the aware moves")
            # C5
            for h2 in g.histories:
                if h2 == h or g.owner.get(h2) != i or h2 not in g.infoset_of:
                    continue
                if aug.aware(h2) != a:
                    continue
                same_set = g.infoset_of[h2] == g.infoset_of[h]
                if same_set and gwa.F(gid, h2) != (tg, tl):
                    report.add("C5", where, f"{h2!r} in the same information set has a different F")
                if (is_prefix(h, h2) or is_prefix(h2, h)) and gwa.F(gid, h2)[0] != tg:
                    report.add("C5", where, f"{h2!r} with unchanged awareness maps to another game")
            # C8
            mine = _own_targets(gwa, gid, h, i)
            for h2 in tgame.infosets[tl].histories:
                if _own_targets(gwa, tg, h2, i) != mine:
                    report.add("C8", where, f"{h2!r} in {(tg, tl)!r} has different own F-history")
            # C9
            if not any(_playable(gwa, tg, h2) for h2 in tgame.infosets[tl].histories):
                report.add("C9", where, f"no history of {(tg, tl)!r} is playable under movers' awareness")

    if gwa.canonical_form:
        m = gwa.games[gwa.modeler]
        for label in m.game.infosets:
            if m.awareness[label] != U.history_set:
                report.add("canonical", (gwa.modeler, label), "modeler awareness is not all of H")
    return report


def _own_targets(gwa, gid, h, i) -> frozenset:
    g = gwa.games[gid].game
    return frozenset((gwa.F(gid, h[:k]), h[k]) for k in range(len(h))
                     if g.owner.get(h[:k]) == i and h[:k] in g.infoset_of)


def _playable(gwa, gid, h) -> bool:
    g = gwa.games[gid].game
    for k in range(len(h)):
        p, m = h[:k], h[k]
        owner = g.owner.get(p)
        if owner is None or owner == CHANCE:
            continue
        tg, tl = gwa.F(gid, p)
        tgame = gwa.games[tg].game
        if any(h1 + (m,) not in tgame.history_set for h1 in tgame.infosets[tl].histories):
            return False
    return True


def feasible_histories(gwa: GameWithAwareness, gid) -> frozenset:
    """Histories of one game that can be played given every mover's own view."""
    if gid not in gwa.games:
        raise GameError(f"unknown game {gid!r}")
    return frozenset(h for h in gwa.games[gid].game.histories if _playable(gwa, gid, h))


def generalized_info_sets(gwa: GameWithAwareness) -> dict:
    members = {}
    for gid in gwa.games:
        for h in gwa.player_histories(gid):
            members.setdefault(gwa.F(gid, h), set()).add((gid, h))
    return {a: GeneralizedInfoSet(a, frozenset(ms))
            for a, ms in sorted(members.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))}


def player_views(gwa: GameWithAwareness, player) -> set:
    return {g for (i, g) in gwa.agents if i == player}


def canonical(g: ExtensiveGame, gid: str = "m") -> GameWithAwareness:
    """The game with awareness in which everyone is aware of everything."""
    H = g.history_set
    aug = AugmentedGame(g, {label: H for label in g.infosets})
    fmap = {(gid, label): (gid, label) for label in g.infosets}
    return GameWithAwareness(g, {gid: aug}, gid, fmap, canonical_form=True)


def lower_canonical(gwa: GameWithAwareness) -> ExtensiveGame:
    if len(gwa.games) != 1:
        raise GameError("not a one-game structure")
    return gwa.games[gwa.modeler].game
