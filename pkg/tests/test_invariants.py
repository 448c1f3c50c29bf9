from fractions import Fraction

import pytest

from frobinv.frobenius import pushforward_presentation
from frobinv.ideals import Ideal, PreconditionError
from frobinv.invariants import (
    assoc_check,
    depth_probe,
    equi_check,
    euler_numbers,
    frobenius_betti_euler,
    fsig_estimates,
    fsig_via_hk,
    hk_function,
    localize_betti,
    minimal_resolution,
)
from frobinv.ring import RingSpec

import oracles

PLANE = RingSpec(2, ["x", "y"])
QUADRIC = RingSpec(2, "xyzw", modulus="x*y+z*w")
CROSSING = RingSpec(2, ["x", "y"], modulus="x*y")


@pytest.fixture(scope="module")
def quadric_slice():
    return minimal_resolution(pushforward_presentation(QUADRIC, 1), 2)


@pytest.fixture(scope="module")
def crossing_slice():
    return minimal_resolution(pushforward_presentation(CROSSING, 1), 4)


def normalized_ok(report, table):
    dim = report.ring.dim
    p = report.ring.p
    return all(Fraction(row["normalized"]) == Fraction(row["lambda"], p ** (row["e"] * dim))
               for row in report.tables[table])


def test_hk_regular():
    rep = hk_function(Ideal.maximal(PLANE), 2)
    assert rep.tables["hk"][-1] == {"e": 2, "lambda": 16, "normalized": "16/16"}
    assert normalized_ok(rep, "hk")


def test_hk_quadric():
    rows = hk_function(Ideal.maximal(QUADRIC), 2).tables["hk"]
    assert rows[1]["lambda"] == 10 and rows[1]["normalized"] == "10/8"
    assert 1 < Fraction(rows[2]["normalized"]) < 2


def test_hk_rejects_positive_dimension():
    with pytest.raises(PreconditionError):
        hk_function(Ideal.parse(PLANE, ["x"]), 1)


def test_fsig_quadric():
    rep = fsig_estimates(Ideal.maximal(QUADRIC), 1)
    assert rep.tables["fsig"] == [{"e": 1, "lambda": 6, "normalized": "6/8"}]
    assert normalized_ok(rep, "fsig")


def test_fsig_regular_is_one():
    for row in fsig_estimates(Ideal.maximal(RingSpec(3, "xy")), 2).tables["fsig"]:
        assert Fraction(row["normalized"]) == 1


def test_fsig_of_square_exceeds_fsig_of_maximal_ideal():
    m = Ideal.maximal(PLANE)
    small = fsig_estimates(m, 2).tables["fsig"]
    big = fsig_estimates(m.power(2), 2).tables["fsig"]
    assert all(Fraction(b["normalized"]) > Fraction(s["normalized"]) for s, b in zip(small, big))


def test_fsig_via_hk():
    assert fsig_via_hk(Ideal.maximal(PLANE), 1, 1) == 1
    value = fsig_via_hk(Ideal.maximal(QUADRIC), 1, 1)
    assert Fraction(6, 8) - Fraction(1, 2) < value < Fraction(6, 8) + Fraction(1, 2)
    assert fsig_via_hk(Ideal.maximal(QUADRIC), 1, 0) == Fraction(6, 8)


@pytest.mark.parametrize("p,n,e", [(2, 1, 1), (2, 2, 2), (3, 2, 1), (5, 1, 2)])
def test_regular_resolution(p, n, e):
    ring = RingSpec(p, ["x", "y", "z"][:n])
    rep = frobenius_betti_euler(ring, e, 2)
    assert [r["beta"] for r in rep.tables["betti"]] == [p ** (e * n), 0, 0]
    assert all(rep.verdicts.values())


def test_crossing_betti(crossing_slice):
    assert crossing_slice.betti == [3, 2, 2, 2, 2]
    assert crossing_slice.syzygy_ranks == [2, 1, 1, 1, 1]
    assert crossing_slice.is_complex() and crossing_slice.is_minimal()


def test_crossing_second_matrix_matches_truncated_syzygies(crossing_slice):
    d1, d2 = crossing_slice.matrices[:2]
    S = CROSSING.polynomial_ring()
    rows = [[S.coerce(c[i]) for c in d1.cols] for i in range(d1.nrows)]
    columns = [[row[j] for row in rows] for j in range(d1.ncols)]
    truncated = oracles.truncated_syzygies(columns, CROSSING, 2)
    assert truncated
    from frobinv.groebner import ModuleElement, module_groebner, module_normal_form
    ours = d2.column_elements(CROSSING)
    basis = module_groebner(ours, d1.ncols, CROSSING)
    for v in truncated:
        assert module_normal_form(ModuleElement.from_entries(CROSSING, v), basis).is_zero()


def test_quadric_betti(quadric_slice):
    assert quadric_slice.betti == [10, 4, 4]
    rep = frobenius_betti_euler(QUADRIC, 1, 2, quadric_slice)
    assert all(rep.verdicts.values()), rep.verdicts
    chi = [r["chi"] for r in rep.tables["betti"]]
    assert chi == euler_numbers([10, 4, 4]) == [10, -6, 10]


def test_localization_at_maximal_ideal_is_identity(quadric_slice):
    rep = localize_betti(quadric_slice, Ideal.maximal(QUADRIC))
    assert [r["beta_local"] for r in rep.tables["localized"]] == [10, 4, 4]


def test_localization_at_height_one_prime(quadric_slice):
    rep = localize_betti(quadric_slice, Ideal.parse(QUADRIC, ["x", "z"]))
    assert [r["beta_local"] for r in rep.tables["localized"]] == [8, 0, 0]
    assert all(rep.verdicts.values())


def test_localization_in_regular_ring():
    ring = RingSpec(3, ["x", "y"])
    slice_ = minimal_resolution(pushforward_presentation(ring, 1), 2)
    rep = localize_betti(slice_, Ideal.parse(ring, ["x"]))
    assert [r["beta_local"] for r in rep.tables["localized"]][1:] == [0, 0]


def test_equi_check_fsig():
    P = Ideal.parse(QUADRIC, ["x", "z"])
    rep = equi_check(P, 1, "fsig")
    assert rep.verdicts == {"splitting_equality": False}
    assert rep.witnesses["splitting_equality"][0] == "x*w"
    assert all(equi_check(Ideal.parse(PLANE, ["x"]), e, "fsig").ok for e in (1, 2))


def test_equi_check_hk():
    rep = equi_check(Ideal.parse(QUADRIC, ["x", "z"]), 1, "hk")
    row = rep.tables["generators"][0]
    assert (row["mu"], row["mu_presentation"], row["mu_local"]) == (10, 10, 8)
    assert rep.verdicts == {"presentation_matches_colength": True, "generator_equality": False}


def test_depth_probe_quadric():
    x, y, z, w = QUADRIC.gens()
    rep = depth_probe(Ideal.parse(QUADRIC, ["x", "z"]), 1, [y, w, y + w])
    row = rep.tables["depth"][0]
    assert row["sequence"] == ["y"] and row["depth_certified"]
    assert rep.tables["depth"][1]["length"] == 2


def test_depth_probe_regular():
    x, y = PLANE.gens()
    rep = depth_probe(Ideal.parse(PLANE, ["x"]), 1, [x, y])
    assert rep.tables["depth"][0]["ideal"] == ["x^2"]
    assert rep.verdicts["depths_equal"] and rep.verdicts["prime_sequence_transfers"]


def test_assoc_check_crossing():
    rep = assoc_check(Ideal.parse(PLANE, ["x*y"]), [PLANE.parse("x + y")], 1, 6,
                      [Ideal.parse(PLANE, ["x"]), Ideal.parse(PLANE, ["y"])])
    assert rep.tables["rhs"]["value"] == 8
    assert all(Fraction(r["lhs"]) == 8 for r in rep.tables["lhs"])
    assert all(rep.verdicts.values())


def test_assoc_check_derives_primes():
    rep = assoc_check(Ideal.parse(PLANE, ["x*y^2"]), [PLANE.parse("x + y")], 1, 4)
    comps = {tuple(c["prime"]): c["local_length"] for c in rep.tables["components"]}
    assert comps == {("x",): 2, ("y",): 4}
    assert all(rep.verdicts.values())


def test_assoc_check_zero_parameters():
    I = Ideal.parse(PLANE, ["x^2", "y^3"])
    rep = assoc_check(I, [], 1, 3)
    lam = rep.tables["lhs"][0]["lambda"]
    assert rep.tables["rhs"]["value"] == lam == 24


def test_assoc_check_rejects_non_parameters():
    with pytest.raises(PreconditionError):
        assoc_check(Ideal.parse(PLANE, ["x*y"]), [PLANE.var("x")], 1, 3)


def test_report_layout():
    rep = fsig_estimates(Ideal.maximal(QUADRIC), 1).to_dict()
    assert list(rep) == ["command", "inputs", "tables", "verdicts", "witnesses", "timings"]
    assert rep["inputs"]["ring"]["modulus"] == "x*y + z*w"
