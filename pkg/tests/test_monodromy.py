import copy
import json
from fractions import Fraction

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import categorical_node_match

from fdtc.core import InvalidData
from fdtc.fiber import delta_invariants, load_fiber, validate_fiber
from fdtc.monodromy import (
    MonodromyData,
    MonodromyFormatError,
    PeriodicPart,
    assemble_fiber,
    check_bounds,
    check_fdtc_bound,
    cut_curve_type,
    delta_from_map,
    fdtc_all,
    lower_bound,
    part_euler,
    piece_genera,
    piece_genus_rh,
    validate_monodromy,
    verify_main_identity,
)


def part(pid, n, qg, pieces, branches, slots):
    return {"id": pid, "mult": n, "quotient_genus": qg, "pieces": pieces, "branch_valencies": branches, "slots": slots}


def end(p, s, v):
    return {"part": p, "slot": s, "valency": v}


def datum(genus, parts, annuli):
    return MonodromyData.from_json({"genus": genus, "parts": parts, "annuli": annuli})


# three curves in one orbit, s = -6
ORBIT3 = lambda: datum(
    3,
    [part("P1", 3, 0, 1, [[1, 3, 1]] * 3, ["s"]), part("P2", 3, 0, 1, [[1, 3, 1], [1, 3, 2]], ["s"])],
    [{"id": "A", "orbit_len": 3, "screw": "-6", "amphidrome": False, "ends": [end("P1", "s", [3, 1, 0]), end("P2", "s", [3, 1, 0])]}],
)

# two amphidrome orbits on one part, |c| = 1/2 each
TWO_AMPH = lambda: datum(
    4,
    [part("P", 4, 0, 1, [[1, 4, 1], [1, 4, 3]], ["s1", "s2"])],
    [
        {"id": f"A{k}", "orbit_len": 1, "screw": "-1", "amphidrome": True, "ends": [end("P", f"s{k}", [2, 2, 1])]}
        for k in (1, 2)
    ],
)

# a separating curve between a genus-1 and a genus-2 side
SPLIT_1_2 = lambda: datum(
    3,
    [part("P1", 1, 1, 1, [], ["s"]), part("P2", 1, 2, 1, [], ["s"])],
    [{"id": "A", "orbit_len": 1, "screw": "-1", "amphidrome": False, "ends": [end("P1", "s", [1, 1, 0]), end("P2", "s", [1, 1, 0])]}],
)

# two one-holed tori swapped by the map, glued along one curve
SWAP = lambda: datum(
    2,
    [part("P", 2, 1, 2, [], ["s"])],
    [{"id": "A", "orbit_len": 1, "screw": "-2", "amphidrome": True, "ends": [end("P", "s", [2, 1, 0])]}],
)


# -- validation ------------------------------------------------------------------


def test_worked_is_valid(worked):
    assert validate_monodromy(worked).ok
    assert sum(part_euler(p) for p in worked.parts) == -2


def test_wrong_genus_is_invalid(worked):
    bad = MonodromyData(3, worked.parts, worked.annuli)
    problems = validate_monodromy(bad).problems
    assert any("Euler characteristic -2" in p for p in problems)


def _mutated(worked, fn):
    raw = copy.deepcopy(worked.to_json())
    fn(raw)
    return MonodromyData.from_json(raw)


@pytest.mark.parametrize(
    "mutation, needle",
    [
        (lambda r: r["annuli"][0].update(screw="0"), "not negative"),
        (lambda r: r["annuli"][0].update(screw="1/12"), "not negative"),
        (lambda r: r["parts"][0]["slots"].append("s2"), "used by 0"),
        (lambda r: r["annuli"][0]["ends"][1].update(slot="zz"), "no slot"),
        (lambda r: r["annuli"][0]["ends"][1].update(part="P9"), "unknown part"),
        (lambda r: r["parts"][0]["branch_valencies"].append([6, 1, 0]), "simple point"),
        (lambda r: r["parts"][0]["branch_valencies"].__setitem__(0, [1, 2, 1]), "m*lambda"),
        (lambda r: r["annuli"][0].update(orbit_len=2), "first entry 2"),
        (lambda r: r["parts"][1]["branch_valencies"].__setitem__(1, [1, 4, 3]), "rotation data"),
        (lambda r: r["parts"][0].update(pieces=2), "pieces"),
        (lambda r: r.update(genus=1), "below 2"),
    ],
)
def test_invalid_data(worked, mutation, needle):
    problems = validate_monodromy(_mutated(worked, mutation)).problems
    assert problems and any(needle in p for p in problems), problems


def test_disk_part_rejected():
    d = datum(
        2,
        [part("P", 1, 2, 1, [], ["a"]), part("D", 1, 0, 1, [], ["b"])],
        [{"id": "A", "orbit_len": 1, "screw": "-1", "amphidrome": False, "ends": [end("P", "a", [1, 1, 0]), end("D", "b", [1, 1, 0])]}],
    )
    assert any("disks or annuli" in p for p in validate_monodromy(d).problems)


def test_too_many_curves():
    d = datum(
        2,
        [part("P", 1, 1, 1, [], ["a", "b", "c", "e", "f", "g"])],
        [
            {"id": f"A{k}", "orbit_len": 1, "screw": "-1", "amphidrome": False, "ends": [end("P", x, [1, 1, 0]), end("P", y, [1, 1, 0])]}
            for k, (x, y) in enumerate([("a", "b"), ("c", "e"), ("f", "g")])
        ],
    )
    assert any("exceed the genus" in p for p in validate_monodromy(d).problems)


def test_invalid_data_raises_in_pipelines(worked):
    bad = MonodromyData(3, worked.parts, worked.annuli)
    for fn in (fdtc_all, assemble_fiber, delta_from_map):
        with pytest.raises(InvalidData):
            fn(bad)


# -- map side ------------------------------------------------------------------------


def test_fdtc_all(worked, amph_datum):
    assert fdtc_all(worked) == {"A1": Fraction(-1, 12)}
    assert fdtc_all(amph_datum) == {"A": Fraction(-1, 2)}
    assert fdtc_all(ORBIT3()) == {"A": Fraction(-2)}


def test_piece_genus_rh(worked):
    assert piece_genera(worked) == {"P1": 1, "P2": 1}
    trivial = PeriodicPart("T", 1, 0, 1, (), ("s",))
    assert part_euler(trivial) == 1
    assert piece_genus_rh(trivial, [1]) == 0
    with pytest.raises(InvalidData):
        piece_genus_rh(PeriodicPart("T", 2, 0, 1, (), ("s",)), [1])  # odd closed-up Euler characteristic


def test_cut_curve_types(worked, amph_datum):
    assert cut_curve_type(worked, "A1") == 1
    assert cut_curve_type(amph_datum, amph_datum.annuli[0]) == 0
    assert cut_curve_type(ORBIT3(), "A") == 0
    assert cut_curve_type(SPLIT_1_2(), "A") == 1
    assert cut_curve_type(SWAP(), "A") == 1
    with pytest.raises(InvalidData):
        cut_curve_type(worked, "nope")


def test_delta_from_map(worked, smooth_datum):
    r = delta_from_map(worked)
    assert r.total == Fraction(1, 12) and r.by_type[1] == Fraction(1, 12)
    assert delta_from_map(smooth_datum).total == 0
    two = delta_from_map(TWO_AMPH())
    assert two.total == 1 and two.by_type[0] == 1
    # each orbit contributes orbit_len * |c| = |s|
    assert delta_from_map(ORBIT3()).total == 6


# -- fiber side -------------------------------------------------------------------------


def _nx(g):
    h = nx.MultiGraph()
    for v in g.vertices:
        h.add_node(v.id, mult=v.mult, genus=v.genus)
    h.add_edges_from(g.edges)
    return h


def test_assemble_worked_is_example(worked, data_dir):
    built = assemble_fiber(worked)
    target = load_fiber(data_dir / "worked_g2_fiber.json")
    match = categorical_node_match(["mult", "genus"], [0, 0])
    assert nx.is_isomorphic(_nx(built), _nx(target), node_match=match)
    assert {v.id: v.piece_genus for v in built.vertices if v.piece_genus is not None} == {"P1": 1, "P2": 1}
    assert built.genus_hint == 2


def test_assemble_smooth(smooth_datum):
    g = assemble_fiber(smooth_datum)
    assert [(v.mult, v.genus) for v in g.vertices] == [(1, 2)] and g.edges == ()


def test_assemble_amphidrome(amph_datum):
    g = assemble_fiber(amph_datum)
    assert validate_fiber(g).ok
    r = delta_invariants(g)
    (chain,) = r.chains
    assert chain.seq.entries == (4, 2) and chain.amphidrome and chain.type == 0
    fold_tails = [t.seq.entries for t in r.tails if t.fold]
    assert fold_tails == [(2, 1), (2, 1)]


@pytest.mark.parametrize("make", [ORBIT3, TWO_AMPH, SPLIT_1_2])
def test_identity_on_hand_data(make):
    d = make()
    assert validate_fiber(assemble_fiber(d)).ok
    assert verify_main_identity(d).equal


def test_identity_worked_and_smooth(worked, smooth_datum, amph_datum):
    r = verify_main_identity(worked)
    assert r.equal and r.fiber_side.total == r.map_side.total == Fraction(1, 12)
    assert r.per_type()[1] == (Fraction(1, 12), Fraction(1, 12))
    assert verify_main_identity(smooth_datum).map_side.total == 0
    assert verify_main_identity(amph_datum).equal


def test_swapped_pieces_untyped_on_fiber_side():
    # the fiber cannot tell one two-holed torus from two swapped one-holed tori
    r = verify_main_identity(SWAP())
    assert r.fiber_side.total == r.map_side.total == 1
    assert r.map_side.by_type[1] == 1
    assert r.fiber_side.untyped == 1
    assert not r.equal


# -- bounds -----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "g, i, value",
    [(2, None, Fraction(1, 72)), (2, 0, Fraction(1, 32)), (2, 1, Fraction(1, 72)), (3, None, Fraction(1, 180)), (3, 1, Fraction(1, 180))],
)
def test_lower_bound(g, i, value):
    assert lower_bound(g, i) == value


def test_lower_bound_errors():
    with pytest.raises(InvalidData):
        lower_bound(2, 2)
    with pytest.raises(InvalidData):
        lower_bound(1)


def test_check_bounds(worked, amph_datum):
    assert check_bounds(worked).ok
    (row,) = check_bounds(amph_datum).rows
    assert row.abs_c == Fraction(1, 2) and row.type == 0 and row.ok
    assert not check_fdtc_bound(Fraction(1, 1000), 2).ok
    tiny = _mutated_screw(worked, "-1/1000")
    report = check_bounds(tiny)
    assert [r.annulus for r in report.violations] == ["A1"]


def _mutated_screw(worked, screw):
    raw = worked.to_json()
    raw["annuli"][0]["screw"] = screw
    return MonodromyData.from_json(raw)


# -- file format --------------------------------------------------------------------------


def test_json_round_trip(worked, amph_datum):
    for d in (worked, amph_datum):
        assert MonodromyData.from_json(json.loads(json.dumps(d.to_json()))) == d


def test_amphidrome_end_forms(amph_datum):
    raw = amph_datum.to_json()
    raw["annuli"][0]["ends"] = raw["annuli"][0]["ends"] * 2
    assert MonodromyData.from_json(raw) == amph_datum
    raw["annuli"][0]["ends"][1] = {"part": "P", "slot": "other", "valency": [2, 2, 1]}
    with pytest.raises(MonodromyFormatError):
        MonodromyData.from_json(raw)


@pytest.mark.parametrize(
    "mutation",
    [
        lambda r: r.update(colour=1),
        lambda r: r["parts"][0].update(colour=1),
        lambda r: r["annuli"][0].update(screw="a/b"),
        lambda r: r["annuli"][0].update(amphidrome="yes"),
        lambda r: r["annuli"][0]["ends"].pop(),
        lambda r: r["parts"][0]["branch_valencies"].append([1, 2]),
        lambda r: r["parts"][0].update(mult="6"),
        lambda r: r.pop("annuli"),
    ],
)
def test_format_errors(worked, mutation):
    raw = copy.deepcopy(worked.to_json())
    mutation(raw)
    with pytest.raises(MonodromyFormatError):
        MonodromyData.from_json(raw)
