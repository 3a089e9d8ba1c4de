"""Assessments, sequential rationality, belief consistency and equilibrium checks.

A possibility system is a dict ``{infoset label: frozenset of histories}``;
beliefs under it may only put mass on the listed histories. Limits are
verified through finite certificates: a sequence of completely mixed
profiles whose profiles and derived beliefs approach the assessment.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .awareness import GameWithAwareness, feasible_histories
from .extform import (ExtensiveGame, GameError, NormalFormGame, best_response,
                      check_profile, cond_reach_prob, continuation_values,
                      is_completely_mixed, reach_probs)
from .nuglue import (anchor_label, build_nu, check_gsigma, lift_beliefs,
                     lift_strategy, local_view, lower_beliefs, lower_strategy,
                     view_profile)

TOL_LIMIT = Fraction(1, 10**6)
DEFAULT_EPSILONS = tuple(Fraction(1, 10**k) for k in range(1, 9))


class SolveFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Assessment:
    profile: Mapping
    beliefs: Mapping


@dataclass(frozen=True)
class ConsistencyCertificate:
    profiles: Sequence[Mapping]
    epsilons: Sequence[Fraction] = DEFAULT_EPSILONS
    tol_limit: Fraction = TOL_LIMIT
    beliefs: Sequence[Mapping] | None = None   # optional declared beliefs, one per profile

    def __post_init__(self):
        if len(self.profiles) < 3:
            raise GameError("a certificate needs at least three profiles")
        if len(self.epsilons) != len(self.profiles):
            raise GameError("one tremble size per certificate profile")
        if any(e <= 0 for e in self.epsilons) or any(
                a <= b for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise GameError("tremble sizes must be positive and strictly decreasing")
        if self.beliefs is not None and len(self.beliefs) != len(self.profiles):
            raise GameError("declared beliefs must match the profiles one to one")


def full_possibility(g: ExtensiveGame) -> dict:
    return {label: frozenset(iset.histories) for label, iset in g.infosets.items()}


def _check_shape(g, K):
    for label, iset in g.infosets.items():
        if label not in K or not K[label]:
            raise GameError(f"possibility set at {label!r} is empty")
        if not set(K[label]) <= set(iset.histories):
            raise GameError(f"possibility set at {label!r} is not inside the information set")


def check_possibility_system(g: ExtensiveGame, K: Mapping) -> bool:
    """Runs through histories a mover rules out must all give that mover one payoff."""
    _check_shape(g, K)
    for label, iset in g.infosets.items():
        excluded = set(iset.histories) - set(K[label])
        if not excluded:
            continue
        i = iset.player
        values = {g.payoffs[z][i] for z in g.terminals
                  if any(z[:len(h)] == h for h in excluded)}
        if len(values) > 1:
            return False
    return True


def check_beliefs(g: ExtensiveGame, K: Mapping, mu: Mapping) -> None:
    for label in g.infosets:
        if label not in mu:
            raise GameError(f"no belief at {label!r}")
        dist = mu[label]
        if any(p < 0 for p in dist.values()):
            raise GameError(f"negative belief at {label!r}")
        if any(p and h not in K[label] for h, p in dist.items()):
            raise GameError(f"belief at {label!r} leaves the possibility set")
        if sum(dist.values()) != 1:
            raise GameError(f"belief at {label!r} sums to {sum(dist.values())}")


@dataclass
class RationalityReport:
    ok: bool
    slack: dict   # infoset label -> best response value minus current value
    best: dict    # infoset label -> optimal moves of the best continuation

    def __bool__(self):
        return self.ok


def check_sequential_rationality(g: ExtensiveGame, K: Mapping, assessment: Assessment,
                                 tol=Fraction(0)) -> RationalityReport:
    sigma, mu = assessment.profile, assessment.beliefs
    check_profile(g, sigma)
    _check_shape(g, K)
    check_beliefs(g, K, mu)
    values = {i: continuation_values(g, sigma, i) for i in g.players}
    slack, best = {}, {}
    for label, iset in g.infosets.items():
        i = iset.player
        weights = {h: p for h, p in mu[label].items() if p}
        current = sum(p * values[i][h] for h, p in weights.items())
        br, choices = best_response(g, sigma, i, weights)
        slack[label] = br - current
        best[label] = choices.get(label)
    return RationalityReport(all(s <= tol for s in slack.values()), slack, best)


def beliefs_from_profile(g: ExtensiveGame, K: Mapping, sigma: Mapping) -> dict:
    if not is_completely_mixed(g, sigma):
        raise GameError("beliefs can only be derived from a completely mixed profile")
    reach = reach_probs(g, sigma)
    out = {}
    for label in sorted(g.infosets):
        hs = sorted(K[label], key=lambda h: (len(h), tuple(map(str, h))))
        total = sum(reach[h] for h in hs)
        out[label] = {h: reach[h] / total for h in hs}
    return out


def _max_dist(a: Mapping, b: Mapping) -> Fraction:
    d = Fraction(0)
    for key in set(a) | set(b):
        x, y = a.get(key, {}), b.get(key, {})
        for k in set(x) | set(y):
            d = max(d, abs(Fraction(x.get(k, 0)) - Fraction(y.get(k, 0))))
    return d


@dataclass
class ConsistencyReport:
    ok: bool
    profile_distances: list
    belief_distances: list
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def judge_sequence(profiles, beliefs, sigma, mu, tol_limit, declared=None) -> ConsistencyReport:
    """Finite stand-in for the limit: the last distances are within ``tol_limit``
    and do not grow over the last ``min(3, K - 1)`` steps."""
    problems = []
    if declared is not None:
        for k, (d, b) in enumerate(zip(declared, beliefs)):
            if _max_dist(d, b) != 0:
                problems.append(f"declared beliefs at step {k + 1} differ from the derived ones")
    ds = [_max_dist(p, sigma) for p in profiles]
    dm = [_max_dist(b, mu) for b in beliefs]
    tail = min(3, len(profiles) - 1)
    for name, seq in (("profile", ds), ("belief", dm)):
        if seq[-1] > tol_limit:
            problems.append(f"final {name} distance {float(seq[-1]):.3g} exceeds the tolerance")
        last = seq[-tail - 1:]
        if any(b > a for a, b in zip(last, last[1:])):
            problems.append(f"{name} distances grow over the last {tail} steps")
    return ConsistencyReport(not problems, ds, dm, problems)


def check_consistency(g: ExtensiveGame, K: Mapping, assessment: Assessment,
                      cert: ConsistencyCertificate) -> ConsistencyReport:
    for k, prof in enumerate(cert.profiles):
        check_profile(g, prof)
        if not is_completely_mixed(g, prof):
            return ConsistencyReport(False, [], [], [f"profile {k + 1} is not completely mixed"])
    beliefs = [beliefs_from_profile(g, K, prof) for prof in cert.profiles]
    return judge_sequence(cert.profiles, beliefs, assessment.profile, assessment.beliefs,
                          cert.tol_limit, cert.beliefs)


@dataclass
class EquilibriumReport:
    ok: bool
    rationality: RationalityReport
    consistency: ConsistencyReport

    def __bool__(self):
        return self.ok


def check_conditional_seq_eq(g: ExtensiveGame, K: Mapping, assessment: Assessment,
                             cert: ConsistencyCertificate, tol=Fraction(0)) -> EquilibriumReport:
    if not check_possibility_system(g, K):
        raise GameError("possibility system excludes histories with different payoffs")
    rat = check_sequential_rationality(g, K, assessment, tol)
    con = check_consistency(g, K, assessment, cert)
    return EquilibriumReport(rat.ok and con.ok, rat, con)


# plain sequential equilibrium, computed without the dynamic program

def _pure_strategies(g, player, cap):
    labels = sorted(g.player_infosets(player))
    count = 1
    for label in labels:
        count *= len(g.infoset_moves(label))
    if count > cap:
        raise GameError(f"{player!r} has {count} pure strategies (cap {cap})")
    for combo in itertools.product(*(g.infoset_moves(label) for label in labels)):
        yield {label: {m: Fraction(1)} for label, m in zip(labels, combo)}


def _eu_at(g, sigma, mu_I, player):
    return sum(p * cond_reach_prob(g, sigma, z, h) * g.payoffs[z][player]
               for h, p in mu_I.items() if p
               for z in g.terminals if z[:len(h)] == h)


def check_sequential_equilibrium(g: ExtensiveGame, assessment: Assessment,
                                 cert: ConsistencyCertificate, tol=Fraction(0),
                                 cap: int = 4096) -> EquilibriumReport:
    """Sequential equilibrium with full information sets.

    Optimality at each information set is found by trying every pure
    strategy of the mover, which is enough because the conditional payoff is
    linear in each of the mover's local choices.
    """
    K = full_possibility(g)
    sigma, mu = assessment.profile, assessment.beliefs
    check_profile(g, sigma)
    check_beliefs(g, K, mu)
    slack, best = {}, {}
    for label, iset in g.infosets.items():
        i = iset.player
        current = _eu_at(g, sigma, mu[label], i)
        top, arg = None, None
        for pure in _pure_strategies(g, i, cap):
            trial = dict(sigma)
            trial.update(pure)
            v = _eu_at(g, trial, mu[label], i)
            if top is None or v > top:
                top, arg = v, next(iter(pure[label]))
        slack[label] = top - current
        best[label] = arg
    rat = RationalityReport(all(s <= tol for s in slack.values()), slack, best)
    con = check_consistency(g, K, assessment, cert)
    return EquilibriumReport(rat.ok and con.ok, rat, con)


# perfect equilibrium of a normal-form game

@dataclass
class PerfectReport:
    ok: bool
    problems: list

    def __bool__(self):
        return self.ok


def check_perfect_equilibrium(nf: NormalFormGame, sigma: Mapping, cert: Sequence[Mapping],
                              tol_limit=TOL_LIMIT) -> PerfectReport:
    """``sigma`` is exactly optimal against every tremble in ``cert`` and the
    trembles approach ``sigma``."""
    if len(cert) < 3:
        raise GameError("a certificate needs at least three profiles")
    problems = []
    for k, prof in enumerate(cert):
        for p in nf.players:
            if any(prof[p].get(s, 0) <= 0 for s in nf.strategies[p]) or sum(prof[p].values()) != 1:
                problems.append(f"step {k + 1}: {p!r} is not completely mixed")
        if problems:
            continue
        for p in nf.players:
            dev = nf.deviation_payoffs(prof, p)
            top = max(dev.values())
            for s, q in sigma[p].items():
                if q and dev[s] != top:
                    problems.append(f"step {k + 1}: {s!r} is not a best reply for {p!r}")
    if not problems:
        rep = judge_sequence(list(cert), [{}] * len(cert), sigma, {}, tol_limit)
        problems.extend(rep.problems)
    return PerfectReport(not problems, problems)


# solver

@dataclass(frozen=True)
class SolverConfig:
    epsilons: tuple = DEFAULT_EPSILONS
    damping: float = 0.5
    max_iter: int = 10**4
    restarts: int = 16
    seed: int = 0
    tol_limit: Fraction = TOL_LIMIT
    belief_denominator: int = 1000


def _float_values(g, sigma, player):
    values = {}
    for h in sorted(g.histories, key=len, reverse=True):
        if g.is_terminal(h):
            values[h] = float(g.payoffs[h][player])
        else:
            values[h] = sum(_fprob(g, sigma, h, m) * values[h + (m,)] for m in g.children[h])
    return values


def _fprob(g, sigma, h, m):
    if g.owner[h] == "chance":
        return float(g.chance[h][m])
    return sigma[g.infoset_of[h]][m]


def _float_reach(g, sigma):
    out = {(): 1.0}
    for h in g.histories:
        if h:
            out[h] = out[h[:-1]] * _fprob(g, sigma, h[:-1], h[-1])
    return out


def _targets(g, sigma):
    """Best move of each agent against ``sigma``, ties to the smallest label."""
    reach = _float_reach(g, sigma)
    values = {i: _float_values(g, sigma, i) for i in g.players}
    out = {}
    for label, iset in g.infosets.items():
        i = iset.player
        q = {m: sum(reach[h] * values[i][h + (m,)] for h in iset.histories)
             for m in g.infoset_moves(label)}
        top = max(q.values())
        out[label] = min((m for m in q if q[m] >= top - 1e-12 * max(1.0, abs(top))),
                         key=lambda m: str(m))
    return out


def _vertex(g, choices, eps):
    out = {}
    for label, best in choices.items():
        moves = g.infoset_moves(label)
        out[label] = {m: (1 - (len(moves) - 1) * eps if m == best else eps) for m in moves}
    return out


def _exact_targets_ok(g, sigma, choices):
    reach = reach_probs(g, sigma)
    values = {i: continuation_values(g, sigma, i) for i in g.players}
    for label, iset in g.infosets.items():
        i = iset.player
        q = {m: sum(reach[h] * values[i][h + (m,)] for h in iset.histories)
             for m in g.infoset_moves(label)}
        if q[choices[label]] != max(q.values()):
            return False
    return True


def _eps_equilibrium(g, start, eps, cfg):
    x = {label: dict(d) for label, d in start.items()}
    fe = float(eps)
    for _ in range(cfg.max_iter):
        choices = _targets(g, x)
        target = _vertex(g, choices, fe)
        gap = max(abs(x[l][m] - target[l][m]) for l in x for m in x[l])
        if gap < 1e-10:
            exact = _vertex(g, choices, eps)
            if _exact_targets_ok(g, exact, choices):
                return choices, exact
            return None
        for l in x:
            for m in x[l]:
                x[l][m] = (1 - cfg.damping) * x[l][m] + cfg.damping * target[l][m]
    return None


def _random_start(g, rng):
    out = {}
    for label in sorted(g.infosets):
        ws = [rng.random() + 1e-3 for _ in g.infoset_moves(label)]
        s = sum(ws)
        out[label] = {m: w / s for m, w in zip(g.infoset_moves(label), ws)}
    return out


def _snap(dist, denominator):
    snapped = {k: Fraction(v).limit_denominator(denominator) for k, v in dist.items()}
    total = sum(snapped.values())
    return {k: v / total for k, v in snapped.items()}


def solve_conditional_seq_eq(g: ExtensiveGame, K: Mapping | None = None,
                             config: SolverConfig | None = None):
    """Find an assessment together with a certificate that passes
    ``check_conditional_seq_eq``.

    For each tremble size, damped best-response iteration on the trembled
    agent normal form settles on a vertex; the last vertex gives the pure
    limit profile and, after rounding, the limit beliefs.
    """
    cfg = config or SolverConfig()
    K = full_possibility(g) if K is None else K
    if not check_possibility_system(g, K):
        raise GameError("possibility system excludes histories with different payoffs")
    width = max(len(g.infoset_moves(label)) for label in g.infosets)
    eps_list = [Fraction(e) for e in cfg.epsilons if width * Fraction(e) < 1]
    if len(eps_list) < 3:
        raise SolveFailure("tremble schedule has fewer than three usable sizes")
    rng = random.Random(cfg.seed)
    for restart in range(cfg.restarts):
        start = ({label: {m: 1.0 / len(g.infoset_moves(label)) for m in g.infoset_moves(label)}
                  for label in g.infosets} if restart == 0 else _random_start(g, rng))
        profiles, choices = [], None
        for eps in eps_list:
            found = _eps_equilibrium(g, start, eps, cfg)
            if found is None:
                break
            choices, exact = found
            profiles.append(exact)
            start = {l: {m: float(p) for m, p in d.items()} for l, d in exact.items()}
        if len(profiles) != len(eps_list):
            continue
        sigma = {label: {m: Fraction(int(m == choices[label])) for m in g.infoset_moves(label)}
                 for label in g.infosets}
        last = beliefs_from_profile(g, K, profiles[-1])
        mu = {label: _snap(d, cfg.belief_denominator) for label, d in last.items()}
        assessment = Assessment(sigma, mu)
        cert = ConsistencyCertificate(profiles, tuple(eps_list), cfg.tol_limit)
        if check_conditional_seq_eq(g, K, assessment, cert):
            return assessment, cert
    raise SolveFailure(f"no certified equilibrium after {cfg.restarts} restarts")


def extend_beliefs(g: ExtensiveGame, K: Mapping, assessment: Assessment,
                   cert: ConsistencyCertificate) -> dict:
    """Beliefs over whole information sets that keep the assessment a
    sequential equilibrium.

    Mass on the possibility set keeps the proportions of the given beliefs;
    the rest of each information set is weighted by the last certificate
    profile. With a full possibility system this returns the beliefs unchanged.
    """
    if not check_conditional_seq_eq(g, K, assessment, cert):
        raise GameError("assessment is not a conditional sequential equilibrium for this certificate")
    reach = reach_probs(g, cert.profiles[-1])
    out = {}
    for label, iset in g.infosets.items():
        total = sum(reach[h] for h in iset.histories)
        inside = sum(reach[h] for h in K[label]) / total
        dist = {}
        for h in iset.histories:
            if h in K[label]:
                dist[h] = Fraction(assessment.beliefs[label].get(h, 0)) * inside
            else:
                dist[h] = reach[h] / total
        out[label] = dist
    return out


def random_profile(g: ExtensiveGame, rng: random.Random, denominator: int = 12,
                   pure_bias: float = 0.5) -> dict:
    """Random exact profile; roughly half the information sets play a pure move."""
    out = {}
    for label in sorted(g.infosets):
        moves = g.infoset_moves(label)
        if rng.random() < pure_bias:
            pick = rng.choice(moves)
            out[label] = {m: Fraction(int(m == pick)) for m in moves}
        else:
            ws = [rng.randint(1, denominator) for _ in moves]
            out[label] = {m: Fraction(w, sum(ws)) for m, w in zip(moves, ws)}
    return out


def tremble_certificate(g: ExtensiveGame, sigma: Mapping, epsilons=DEFAULT_EPSILONS,
                        tol_limit=TOL_LIMIT) -> ConsistencyCertificate:
    """Certificate ``(1 - eps) * sigma + eps * uniform`` for each tremble size."""
    profiles = []
    for eps in epsilons:
        prof = {}
        for label in g.infosets:
            moves = g.infoset_moves(label)
            prof[label] = {m: (1 - eps) * Fraction(sigma[label].get(m, 0)) + eps / len(moves)
                           for m in moves}
        profiles.append(prof)
    return ConsistencyCertificate(profiles, tuple(epsilons), tol_limit)


def limit_beliefs(g: ExtensiveGame, K: Mapping, cert: ConsistencyCertificate,
                  denominator: int = 1000) -> dict:
    return {label: _snap(d, denominator)
            for label, d in beliefs_from_profile(g, K, cert.profiles[-1]).items()}


# games with awareness

@dataclass
class GeneralizedReport:
    ok: bool
    direct: EquilibriumReport    # computed inside each anchor's own game
    glued: EquilibriumReport     # computed in the glued game with the induced possibility system
    agree: bool

    def __bool__(self):
        return self.ok


def _check_gmu(gwa, gmu, feasible):
    for anchor in {a for a in gwa.fmap.values()}:
        gid, label = anchor
        if anchor not in gmu:
            raise GameError(f"no generalized belief at {anchor!r}")
        allowed = set(gwa.games[gid].game.infosets[label].histories) & feasible[gid]
        dist = gmu[anchor]
        if any(p and tuple(h) not in allowed for h, p in dist.items()) or any(p < 0 for p in dist.values()):
            raise GameError(f"generalized belief at {anchor!r} leaves its information set")
        if sum(dist.values()) != 1:
            raise GameError(f"generalized belief at {anchor!r} sums to {sum(dist.values())}")


def _direct_generalized(gwa, assessment, cert, tol):
    gsigma, gmu = assessment.profile, assessment.beliefs
    feasible = {gid: feasible_histories(gwa, gid) for gid in gwa.games}
    _check_gmu(gwa, gmu, feasible)
    anchors = sorted(set(gwa.fmap.values()), key=lambda a: (str(a[0]), str(a[1])))
    views = {gid: local_view(gwa, gid) for gid in sorted({a[0] for a in anchors})}
    slack, best = {}, {}
    for anchor in anchors:
        gid, label = anchor
        view = views[gid]
        sigma = view_profile(gwa, view, gsigma)
        agent = (gwa.anchor_player(anchor), gid)
        values = continuation_values(view, sigma, agent)
        weights = {tuple(h): p for h, p in gmu[anchor].items() if p}
        br, choices = best_response(view, sigma, agent, weights)
        slack[anchor] = br - sum(p * values[h] for h, p in weights.items())
        best[anchor] = choices.get(anchor_label(anchor))
    rat = RationalityReport(all(s <= tol for s in slack.values()), slack, best)

    beliefs = []
    for k, prof in enumerate(cert.profiles):
        check_gsigma(gwa, prof)
        if any(prof[a].get(m, 0) <= 0 for a in prof for m in gwa.anchor_moves(a)):
            return EquilibriumReport(False, rat, ConsistencyReport(
                False, [], [], [f"profile {k + 1} is not completely mixed"]))
        reach = {gid: reach_probs(view, view_profile(gwa, view, prof)) for gid, view in views.items()}
        mu_k = {}
        for anchor in anchors:
            gid, label = anchor
            hs = [h for h in gwa.games[gid].game.infosets[label].histories if h in feasible[gid]]
            total = sum(reach[gid][h] for h in hs)
            mu_k[anchor] = {h: reach[gid][h] / total for h in hs}
        beliefs.append(mu_k)
    con = judge_sequence(cert.profiles, beliefs, gsigma, {a: gmu[a] for a in anchors},
                         cert.tol_limit, cert.beliefs)
    return EquilibriumReport(rat.ok and con.ok, rat, con)


def check_generalized_seq_eq(gwa: GameWithAwareness, assessment: Assessment,
                             cert: ConsistencyCertificate, nu: Mapping | None = None,
                             tol=Fraction(0)) -> GeneralizedReport:
    """Generalized sequential equilibrium, checked directly and in the glued game.

    ``assessment`` holds a generalized profile and generalized beliefs; the
    certificate holds completely mixed generalized profiles.
    """
    check_gsigma(gwa, assessment.profile)
    direct = _direct_generalized(gwa, assessment, cert, tol)
    nug = build_nu(gwa, nu, validate=False)
    lifted = Assessment(lift_strategy(gwa, assessment.profile, nug),
                        lift_beliefs(nug, assessment.beliefs))
    lcert = ConsistencyCertificate([lift_strategy(gwa, p, nug) for p in cert.profiles],
                                   cert.epsilons, cert.tol_limit,
                                   None if cert.beliefs is None
                                   else [lift_beliefs(nug, b) for b in cert.beliefs])
    glued = check_conditional_seq_eq(nug.game, nug.possibility, lifted, lcert, tol)
    agree = direct.ok == glued.ok and all(
        glued.rationality.slack[anchor_label(a)] == s for a, s in direct.rationality.slack.items())
    return GeneralizedReport(direct.ok and glued.ok, direct, glued, agree)


def solve_generalized_seq_eq(gwa: GameWithAwareness, config: SolverConfig | None = None,
                             nu: Mapping | None = None):
    """Solve in the glued game and carry the result back to generalized form."""
    nug = build_nu(gwa, nu)
    assessment, cert = solve_conditional_seq_eq(nug.game, nug.possibility, config)
    gassessment = Assessment(lower_strategy(nug, assessment.profile),
                             lower_beliefs(nug, assessment.beliefs))
    gcert = ConsistencyCertificate([lower_strategy(nug, p) for p in cert.profiles],
                                   cert.epsilons, cert.tol_limit)
    return gassessment, gcert
