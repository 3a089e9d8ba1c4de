"""Finite extensive-form games with exact rational probabilities and payoffs.

Histories are tuples of move labels. A behavioral profile is a plain dict
``{infoset_label: {move: Fraction}}`` and a belief system is
``{infoset_label: {history: Fraction}}``. Nothing in this module uses floating
point unless the caller passes floats in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping

History = tuple
Player = Hashable
Dist = Mapping[Any, Fraction]
Profile = Mapping[str, Dist]
Beliefs = Mapping[str, Mapping[History, Fraction]]

CHANCE = "chance"


class GameError(ValueError):
    """Raised when an operation gets an argument that does not fit the game."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass a Fraction or a 'p/q' string")
    return Fraction(x)


def is_prefix(prefix: History, h: History) -> bool:
    return len(prefix) <= len(h) and h[: len(prefix)] == prefix


def history_key(h: History):
    """Canonical ordering: shorter first, then lexicographic by move label."""
    return (len(h), tuple(str(m) for m in h))


@dataclass(frozen=True)
class InfoSet:
    label: str
    player: Player
    histories: tuple

    def __contains__(self, h) -> bool:
        return h in self.histories


@dataclass(frozen=True)
class Violation:
    kind: str
    where: Any
    detail: str = ""

    def __str__(self):
        return f"[{self.kind}] {self.where!r}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, where, detail=""):
        self.violations.append(Violation(kind, where, detail))

    def extend(self, other: "ValidationReport", prefix=None):
        for v in other.violations:
            where = (prefix, v.where) if prefix is not None else v.where
            self.violations.append(Violation(v.kind, where, v.detail))

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class ExtensiveGame:
    """A finite extensive game.

    ``owner`` maps every nonterminal history to a player or ``CHANCE``;
    ``chance`` maps chance histories to move distributions; ``infosets`` maps
    labels to :class:`InfoSet`; ``payoffs`` maps runs to ``{player: value}``.
    Construction never raises on structural defects: use :func:`validate_game`.
    """

    players: tuple
    histories: tuple
    owner: Mapping
    chance: Mapping
    infosets: Mapping[str, InfoSet]
    payoffs: Mapping

    @classmethod
    def build(cls, players, histories, owner, chance, infosets, payoffs):
        hs = tuple(sorted({tuple(h) for h in histories}, key=history_key))
        isets = {}
        for label in sorted(infosets):
            iset = infosets[label]
            if isinstance(iset, InfoSet):
                player, members = iset.player, iset.histories
            else:
                player, members = iset
            isets[label] = InfoSet(label, player,
                                   tuple(sorted({tuple(m) for m in members}, key=history_key)))
        return cls(
            players=tuple(players),
            histories=hs,
            owner={tuple(h): p for h, p in owner.items()},
            chance={tuple(h): {m: as_fraction(p) for m, p in d.items()} for h, d in chance.items()},
            infosets=isets,
            payoffs={tuple(z): {i: as_fraction(v) for i, v in u.items()} for z, u in payoffs.items()},
        )

    @classmethod
    def from_tree(cls, players, tree, infosets=None, auto_singletons=False):
        """Build from nested nodes.

        A node is ``{"owner": p, "moves": {m: node}}``, a chance node
        ``{"owner": CHANCE, "chance": {m: prob}, "moves": {...}}`` or a leaf
        ``{"payoffs": {player: value}}`` (a list in player order also works).
        ``infosets`` maps label -> (player, histories). With
        ``auto_singletons`` any player history left uncovered gets its own set.
        """
        players = tuple(players)
        histories, owner, chance, payoffs = [], {}, {}, {}

        def walk(node, h):
            histories.append(h)
            if "moves" in node and node["moves"]:
                owner[h] = node["owner"]
                if node["owner"] == CHANCE:
                    chance[h] = dict(node["chance"])
                for m, child in node["moves"].items():
                    walk(child, h + (m,))
            else:
                u = node["payoffs"]
                if not isinstance(u, Mapping):
                    u = dict(zip(players, u))
                payoffs[h] = u

        walk(tree, ())
        isets = dict(infosets or {})
        if auto_singletons:
            covered = {tuple(m) for _, members in isets.values() for m in members}
            for h in sorted(owner, key=history_key):
                if owner[h] != CHANCE and h not in covered:
                    isets[label_for(h)] = (owner[h], [h])
        return cls.build(players, histories, owner, chance, isets, payoffs)

    # derived structure

    @cached_property
    def history_set(self) -> frozenset:
        return frozenset(self.histories)

    @cached_property
    def children(self) -> dict:
        out = {h: [] for h in self.histories}
        for h in self.histories:
            if h and h[:-1] in out:
                out[h[:-1]].append(h[-1])
        return {h: tuple(sorted(ms, key=str)) for h, ms in out.items()}

    def moves_at(self, h) -> tuple:
        return self.children[h]

    @cached_property
    def terminals(self) -> tuple:
        return tuple(h for h in self.histories if not self.children[h])

    @cached_property
    def moves(self) -> frozenset:
        return frozenset(m for h in self.histories for m in h)

    @cached_property
    def infoset_of(self) -> dict:
        out = {}
        for label, iset in self.infosets.items():
            for h in iset.histories:
                out.setdefault(h, label)
        return out

    def infoset_moves(self, label) -> tuple:
        members = self.infosets[label].histories
        return self.children.get(members[0], ()) if members else ()

    def player_infosets(self, player) -> list:
        return [label for label, iset in self.infosets.items() if iset.player == player]

    def is_terminal(self, h) -> bool:
        return not self.children[h]

    def __repr__(self):
        return (f"ExtensiveGame(players={self.players!r}, |H|={len(self.histories)}, "
                f"|Z|={len(self.terminals)}, infosets={len(self.infosets)})")


def label_for(h: History) -> str:
    return "<" + ",".join(str(m) for m in h) + ">"


def own_experience(g: ExtensiveGame, h: History, player) -> tuple:
    """Sequence of (infoset, move) pairs ``player`` went through on the way to ``h``."""
    out = []
    for k in range(len(h)):
        prefix = h[:k]
        if g.owner.get(prefix) == player and prefix in g.infoset_of:
            out.append((g.infoset_of[prefix], h[k]))
    return tuple(out)


def validate_game(g: ExtensiveGame, check_perfect_recall: bool = True) -> ValidationReport:
    report = ValidationReport()
    H = g.history_set
    if () not in H:
        report.add("root", (), "empty history missing")
    for h in g.histories:
        if h and h[:-1] not in H:
            report.add("prefix-closure", h, f"prefix {h[:-1]!r} not in H")

    players = set(g.players)
    if CHANCE in players:
        report.add("players", CHANCE, "chance label used as a player id")
    for h in g.histories:
        terminal = g.is_terminal(h)
        if terminal:
            if h in g.owner:
                report.add("owner", h, "terminal history has an owner")
            if h not in g.payoffs:
                report.add("payoffs", h, "run without payoffs")
            else:
                missing = players - set(g.payoffs[h])
                if missing:
                    report.add("payoffs", h, f"no payoff for {sorted(map(str, missing))}")
        else:
            if h not in g.owner:
                report.add("owner", h, "nonterminal history without owner")
            elif g.owner[h] != CHANCE and g.owner[h] not in players:
                report.add("owner", h, f"unknown player {g.owner[h]!r}")
            if h in g.payoffs:
                report.add("payoffs", h, "payoff attached to nonterminal history")

    for h, dist in g.chance.items():
        if g.owner.get(h) != CHANCE:
            report.add("chance", h, "distribution on a non-chance history")
            continue
        if set(dist) != set(g.children.get(h, ())):
            report.add("chance", h, f"support {sorted(map(str, dist))} != moves {list(g.children.get(h, ()))}")
        if any(p <= 0 for p in dist.values()):
            report.add("chance", h, "chance probabilities must be strictly positive")
        if sum(dist.values()) != 1:
            report.add("chance", h, f"chance probabilities sum to {sum(dist.values())}")
    for h, p in g.owner.items():
        if p == CHANCE and h not in g.chance:
            report.add("chance", h, "chance history without distribution")

    seen = {}
    for label, iset in g.infosets.items():
        if not iset.histories:
            report.add("infoset", label, "empty information set")
            continue
        move_sets = set()
        for h in iset.histories:
            if h not in H:
                report.add("infoset", label, f"member {h!r} not a history")
                continue
            if g.owner.get(h) != iset.player:
                report.add("infoset", label, f"member {h!r} owned by {g.owner.get(h)!r}, not {iset.player!r}")
            if h in seen:
                report.add("infoset", label, f"member {h!r} also in {seen[h]!r}")
            seen[h] = label
            move_sets.add(g.children.get(h, ()))
        if len(move_sets) > 1:
            report.add("infoset-moves", label, "members have different move sets")
    for h, p in g.owner.items():
        if p != CHANCE and h not in seen:
            report.add("infoset", h, "player history not covered by any information set")

    if check_perfect_recall and report.ok:
        for label, iset in g.infosets.items():
            exps = {own_experience(g, h, iset.player) for h in iset.histories}
            if len(exps) > 1:
                report.add("perfect-recall", label, "members differ in own infoset/move sequence")
    return report


def require_valid(g: ExtensiveGame) -> None:
    rep = validate_game(g)
    if not rep.ok:
        raise GameError("invalid game: " + "; ".join(map(str, rep.violations[:5])))


# probabilities

def check_profile(g: ExtensiveGame, sigma: Profile, infosets: Iterable[str] | None = None) -> None:
    labels = g.infosets if infosets is None else infosets
    for label in labels:
        if label not in sigma:
            raise GameError(f"profile has no entry for information set {label!r}")
        dist = sigma[label]
        allowed = set(g.infoset_moves(label))
        extra = {m for m, p in dist.items() if p and m not in allowed}
        if extra:
            raise GameError(f"profile at {label!r} uses unavailable moves {sorted(map(str, extra))}")
        if any(p < 0 for p in dist.values()):
            raise GameError(f"negative probability at {label!r}")
        if sum(dist.values()) != 1:
            raise GameError(f"profile at {label!r} sums to {sum(dist.values())}")


def is_completely_mixed(g: ExtensiveGame, sigma: Profile) -> bool:
    return all(sigma[label].get(m, 0) > 0
               for label in g.infosets for m in g.infoset_moves(label))


def move_prob(g: ExtensiveGame, sigma: Profile, h: History, m):
    if g.owner[h] == CHANCE:
        return g.chance[h].get(m, 0)
    return sigma[g.infoset_of[h]].get(m, 0)


def _known(g, h):
    h = tuple(h)
    if h not in g.history_set:
        raise GameError(f"unknown history {h!r}")
    return h


def reach_prob(g: ExtensiveGame, sigma: Profile, h: History):
    """Probability that play passes through ``h``: the product of its move probabilities."""
    h = _known(g, h)
    p = Fraction(1)
    for k in range(len(h)):
        p *= move_prob(g, sigma, h[:k], h[k])
        if not p:
            break
    return p


def cond_reach_prob(g: ExtensiveGame, sigma: Profile, target: History, start: History):
    target, start = _known(g, target), _known(g, start)
    if not is_prefix(start, target):
        return Fraction(0)
    p = Fraction(1)
    for k in range(len(start), len(target)):
        p *= move_prob(g, sigma, target[:k], target[k])
    return p


def reach_probs(g: ExtensiveGame, sigma: Profile) -> dict:
    """Reach probability of every history, in one forward pass."""
    out = {(): Fraction(1)}
    for h in g.histories:
        if h:
            out[h] = out[h[:-1]] * move_prob(g, sigma, h[:-1], h[-1])
    return out


def continuation_values(g: ExtensiveGame, sigma: Profile, player) -> dict:
    """``V(h) = sum_z Pr(z|h) u(z)`` for every history, by backward induction."""
    values = {}
    for h in sorted(g.histories, key=len, reverse=True):
        if g.is_terminal(h):
            values[h] = g.payoffs[h][player]
        else:
            values[h] = sum(move_prob(g, sigma, h, m) * values[h + (m,)] for m in g.children[h])
    return values


def expected_utility(g: ExtensiveGame, sigma: Profile, player):
    return continuation_values(g, sigma, player)[()]


def _player_infoset(g, player, label):
    if label not in g.infosets or g.infosets[label].player != player:
        raise GameError(f"{label!r} is not an information set of {player!r}")
    return g.infosets[label]


def expected_utility_at(g: ExtensiveGame, sigma: Profile, mu: Beliefs, player, label):
    """Conditional expected utility at an information set given beliefs."""
    iset = _player_infoset(g, player, label)
    values = continuation_values(g, sigma, player)
    return sum(p * values[h] for h, p in mu[label].items() if p and h in iset)


def best_response(g: ExtensiveGame, sigma: Profile, player, weights: Mapping[History, Fraction]):
    """Best continuation value for ``player`` from weighted starting histories.

    Every other mover plays ``sigma``; ``player`` may change play at all of
    its information sets below the starts. Perfect recall lets the choice be
    made by backward induction over the player's own information sets.
    Returns ``(value, choices)`` with ties broken by the smallest move label.
    """
    W = {}
    origin = {}
    for start, w in weights.items():
        W[start] = w
        origin[start] = start
    for h in sorted(g.histories, key=len):
        if h in W or not h or h[:-1] not in W:
            continue
        parent = h[:-1]
        if g.owner[parent] == player:
            W[h] = W[parent]
        else:
            W[h] = W[parent] * move_prob(g, sigma, parent, h[-1])
        origin[h] = origin[parent]

    def last_decision(h, strict):
        top = len(origin[h])
        end = len(h) - 1 if strict else len(h)
        for k in range(end, top - 1, -1):
            if k < len(h) and g.owner.get(h[:k]) == player:
                return g.infoset_of[h[:k]], h[k]
        return None

    constant = 0
    Q = {}
    parent_of = {}
    for h, w in W.items():
        if g.is_terminal(h):
            dec = last_decision(h, strict=False)
            if dec is None:
                constant += w * g.payoffs[h][player]
            else:
                Q.setdefault(dec[0], {}).setdefault(dec[1], 0)
                Q[dec[0]][dec[1]] += w * g.payoffs[h][player]
        elif g.owner[h] == player:
            label = g.infoset_of[h]
            Q.setdefault(label, {})
            par = last_decision(h, strict=True) if len(h) > len(origin[h]) else None
            if label in parent_of and parent_of[label] != par:
                raise GameError(f"imperfect recall at {label!r}")
            parent_of[label] = par

    kids = {}
    for label, par in parent_of.items():
        kids.setdefault(par, []).append(label)

    choices = {}
    cache = {}

    def solve(label):
        if label in cache:
            return cache[label]
        best_m, best_v = None, None
        for m in g.infoset_moves(label):
            v = Q.get(label, {}).get(m, 0)
            v += sum(solve(c) for c in kids.get((label, m), ()))
            if best_v is None or v > best_v:
                best_m, best_v = m, v
        choices[label] = best_m
        cache[label] = best_v
        return best_v

    value = constant + sum(solve(label) for label in kids.get(None, ()))
    return value, choices


def best_response_value(g: ExtensiveGame, sigma: Profile, mu: Beliefs, player, label):
    iset = _player_infoset(g, player, label)
    weights = {h: p for h, p in mu[label].items() if h in iset}
    return best_response(g, sigma, player, weights)[0]


@dataclass
class NashReport:
    ok: bool
    slack: dict

    def __bool__(self):
        return self.ok


def check_nash(g: ExtensiveGame, sigma: Profile, tol=Fraction(0)) -> NashReport:
    """Ex-ante check: no player gains more than ``tol`` by any unilateral deviation."""
    check_profile(g, sigma)
    slack = {}
    for i in g.players:
        br, _ = best_response(g, sigma, i, {(): Fraction(1)})
        slack[i] = br - expected_utility(g, sigma, i)
    return NashReport(all(s <= tol for s in slack.values()), slack)


# normal form

@dataclass(frozen=True, eq=False)
class NormalFormGame:
    """Finite normal-form game; ``payoffs[profile]`` is a tuple in player order."""

    players: tuple
    strategies: Mapping[Any, tuple]
    payoffs: Mapping[tuple, tuple]
    owner: Mapping | None = None

    @classmethod
    def from_table(cls, players, strategies, table):
        players = tuple(players)
        strategies = {p: tuple(strategies[p]) for p in players}
        payoffs = {tuple(k): tuple(as_fraction(v) for v in vals) for k, vals in table.items()}
        return cls(players, strategies, payoffs)

    def index(self, player) -> int:
        return self.players.index(player)

    def profiles(self):
        return itertools.product(*(self.strategies[p] for p in self.players))

    def payoff(self, profile, player):
        return self.payoffs[tuple(profile)][self.index(player)]

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        for p in self.players:
            if not self.strategies.get(p):
                report.add("strategies", p, "empty strategy set")
        for prof in self.profiles():
            if prof not in self.payoffs:
                report.add("payoffs", prof, "missing payoff entry")
            elif len(self.payoffs[prof]) != len(self.players):
                report.add("payoffs", prof, "wrong payoff arity")
        return report

    def expected_payoff(self, mixed: Mapping[Any, Dist], player):
        """Expected payoff under independent mixed strategies."""
        i = self.index(player)
        total = 0
        supports = [[(s, mixed[p].get(s, 0)) for s in self.strategies[p] if mixed[p].get(s, 0)]
                    for p in self.players]
        for combo in itertools.product(*supports):
            prob = 1
            for _, q in combo:
                prob *= q
            total += prob * self.payoffs[tuple(s for s, _ in combo)][i]
        return total

    def deviation_payoffs(self, mixed: Mapping[Any, Dist], player) -> dict:
        out = {}
        for s in self.strategies[player]:
            trial = dict(mixed)
            trial[player] = {s: Fraction(1)}
            out[s] = self.expected_payoff(trial, player)
        return out


def pure_profile(choices: Mapping[str, Any]) -> dict:
    return {label: {m: Fraction(1)} for label, m in choices.items()}


def to_agent_normal_form(g: ExtensiveGame, max_profiles: int = 10**5) -> NormalFormGame:
    """Multiagent representation: one temporary player per information set."""
    agents = tuple(sorted(g.infosets))
    strategies = {a: g.infoset_moves(a) for a in agents}
    count = 1
    for a in agents:
        count *= len(strategies[a])
    if count > max_profiles:
        raise GameError(f"agent normal form has {count} profiles (cap {max_profiles})")
    owners = {a: g.infosets[a].player for a in agents}
    payoffs = {}
    for combo in itertools.product(*(strategies[a] for a in agents)):
        sigma = pure_profile(dict(zip(agents, combo)))
        utils = {i: expected_utility(g, sigma, i) for i in set(owners.values())}
        payoffs[combo] = tuple(utils[owners[a]] for a in agents)
    return NormalFormGame(agents, strategies, payoffs, owner=owners)
