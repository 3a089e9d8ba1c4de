from fractions import Fraction

import pytest
from hypothesis import given, settings

from awaregames import demos
from awaregames.awareness import (AugmentedGame, GameWithAwareness, _playable, canonical,
                                  feasible_histories, generalized_info_sets, lower_canonical,
                                  player_views, project, validate_awareness)
from awaregames.extform import ExtensiveGame, GameError

from gamegen import extensive_games

FAMILY = ["canonical-fig1", "gpd", "fig2", "syn1"]


def test_project_examples():
    U = demos.gpd_underlying()
    assert project(("unaware_B", "C_A", "D_B"), U) == ("C_A", "D_B")
    assert project(("C_A", "D_B"), U) == ("C_A", "D_B")
    assert project(("unaware_B",), U) == ()


@pytest.mark.parametrize("name", FAMILY)
def test_family_validates(name):
    rep = validate_awareness(demos.demo(name))
    assert rep.ok, rep.violations


def test_canonical_fig1_one_game():
    gwa = canonical(demos.fig1())
    assert list(gwa.games) == ["m"] and validate_awareness(gwa).ok
    assert feasible_histories(gwa, "m") == demos.fig1().history_set


def test_canonical_pd_with_escape():
    gwa = canonical(demos.gpd_underlying())
    assert len(gwa.games) == 1 and validate_awareness(gwa).ok


def test_redirect_to_unaware_view_breaks_c1():
    gwa = demos.gpd()
    fmap = dict(gwa.fmap)
    fmap[("m", "I_A")] = ("B.1", "I_A")
    bad = GameWithAwareness(gwa.underlying, gwa.games, "m", fmap)
    assert "C1" in validate_awareness(bad).kinds()


def test_view_player_aware_of_more_breaks_c2():
    gwa = demos.gpd()
    games = dict(gwa.games)
    b1 = games["B.1"]
    games["B.1"] = AugmentedGame(b1.game, {"I_A": b1.awareness["I_A"],
                                           "I_B": gwa.underlying.history_set})
    bad = GameWithAwareness(gwa.underlying, games, "m", gwa.fmap)
    assert "C2" in validate_awareness(bad).kinds()


def _two_step():
    tree = {"owner": "x", "moves": {
        "a": {"owner": "x", "moves": {"c": {"payoffs": [1]}, "d": {"payoffs": [0]}}},
        "b": {"payoffs": [2]}}}
    return ExtensiveGame.from_tree(("x",), tree, {"r": ("x", [()]), "s": ("x", [("a",)])})


def test_switching_view_without_new_awareness_breaks_c5():
    U = _two_step()
    H = U.history_set
    aug = lambda: AugmentedGame(_two_step(), {"r": H, "s": H})
    fmap = {("m", "r"): ("m", "r"), ("m", "s"): ("m2", "s"),
            ("m2", "r"): ("m2", "r"), ("m2", "s"): ("m2", "s")}
    bad = GameWithAwareness(U, {"m": aug(), "m2": aug()}, "m", fmap)
    kinds = validate_awareness(bad).kinds()
    assert "C5" in kinds and "C8" in kinds


def test_unplayable_anchor_breaks_c9():
    U = demos.syn1_underlying()
    H = U.history_set
    only_y = frozenset({(), ("y",)})
    v = ExtensiveGame.from_tree((1, 2), {"owner": 1, "moves": {"y": {"payoffs": [1, 0]}}},
                                {"1": (1, [()])})
    games = {
        "m": AugmentedGame(demos.syn1_underlying(), {"1": H, "2": H}),
        "w": AugmentedGame(demos.syn1_underlying(), {"1": only_y, "2": H}),
        "v": AugmentedGame(v, {"1": only_y}),
    }
    fmap = {("m", "1"): ("m", "1"), ("m", "2"): ("w", "2"), ("w", "1"): ("v", "1"),
            ("w", "2"): ("w", "2"), ("v", "1"): ("v", "1")}
    rep = validate_awareness(GameWithAwareness(U, games, "m", fmap))
    assert "C9" in rep.kinds()


def test_payoff_mismatch_is_reported():
    gwa = demos.syn1()
    g = gwa.games["2v"].game
    payoffs = dict(g.payoffs)
    payoffs[("x", "n2")] = {1: Fraction(9), 2: Fraction(1)}
    g2 = ExtensiveGame.build(g.players, g.histories, g.owner, g.chance, g.infosets, payoffs)
    games = dict(gwa.games)
    games["2v"] = AugmentedGame(g2, gwa.games["2v"].awareness)
    rep = validate_awareness(GameWithAwareness(gwa.underlying, games, "m", gwa.fmap))
    assert "payoff-knowledge" in rep.kinds()


def test_missing_f_entry_is_reported():
    gwa = demos.gpd()
    fmap = dict(gwa.fmap)
    del fmap[("A", "I_B.u")]
    rep = validate_awareness(GameWithAwareness(gwa.underlying, gwa.games, "m", fmap))
    assert "F-total" in rep.kinds()


def test_feasible_examples():
    gpd = demos.gpd()
    assert feasible_histories(gpd, "B.1") == gpd.games["B.1"].game.history_set
    syn = demos.syn1()
    pruned = syn.games["m"].game.history_set - feasible_histories(syn, "m")
    assert pruned == demos.SYN1_PRUNED
    with pytest.raises(GameError):
        feasible_histories(syn, "nope")


@pytest.mark.parametrize("name", ["canonical-fig1", "gpd", "fig2"])
def test_family_games_are_fully_feasible(name):
    gwa = demos.demo(name)
    for gid, aug in gwa.games.items():
        assert feasible_histories(gwa, gid) == aug.game.history_set


def test_generalized_info_set_of_aware_b():
    gis = generalized_info_sets(demos.gpd())
    members = gis[("B.2", "I_B")].members
    assert members == {
        ("m", ("C_A",)), ("m", ("D_A",)),
        ("A", ("aware_B", "C_A")), ("A", ("aware_B", "D_A")),
        ("B.2", ("C_A",)), ("B.2", ("D_A",)),
    }
    assert {gid for gid, _ in gis[("A", "I_A")].members} == {"m", "A"}


def test_canonical_generalized_sets():
    gis = generalized_info_sets(canonical(demos.fig1()))
    assert set(gis) == {("m", "I_A"), ("m", "I_B")}


def test_player_views():
    gpd = demos.gpd()
    assert player_views(gpd, "A") == {"A", "B.1", "B.2"}
    assert player_views(gpd, "B") == {"B.1", "B.2"}
    assert len(gpd.agents) == 5
    c = canonical(demos.fig1())
    assert player_views(c, "A") == player_views(c, "B") == {"m"}


@pytest.mark.parametrize("name", FAMILY)
def test_structural_properties(name):
    gwa = demos.demo(name)
    owned = {(gid, h) for gid in gwa.games for h in gwa.player_histories(gid)}
    gis = generalized_info_sets(gwa)
    union = set()
    for s in gis.values():
        assert not (union & s.members)
        union |= s.members
    assert union == owned
    for gid in gwa.games:
        feas = feasible_histories(gwa, gid)
        assert () in feas and all(h[:k] in feas for h in feas for k in range(len(h)))
    for (tg, tl) in gis:
        assert any(_playable(gwa, tg, h) for h in gwa.games[tg].game.infosets[tl].histories)
    for gid, aug in gwa.games.items():
        for h in aug.game.histories:
            assert project(project(h, gwa.underlying), gwa.underlying) == project(h, gwa.underlying)


@settings(max_examples=40, deadline=None)
@given(extensive_games())
def test_canonical_round_trip(g):
    gwa = canonical(g)
    assert validate_awareness(gwa).ok
    back = lower_canonical(gwa)
    assert back.histories == g.histories and back.payoffs == g.payoffs
    assert back.infosets == g.infosets
    assert feasible_histories(gwa, "m") == g.history_set
