"""Oracles for the torsion/localisation functors on the shipped modules.

The expected values here are computed independently, in the tests themselves,
by expanding each module's free lines by hand: a line born in degree b
contributes one class label/B^i in every degree b - 8i (i >= 1) of the
B-inverted quotient, free except that a line fed by a degree-raising single
(slope d) is cut to Z/d at i = 1.  The library must reproduce the expansion
degree by degree, including labels.
"""

import math

import pytest

from loccoh.datasets import build_ko_p2, build_tmf_n_p2, build_tmf_n_p3
from loccoh.gradedmod import (
    AmbiguousExtension,
    GradedModulePresentation,
    StabilityError,
    gamma_x,
    gorenstein_shift,
    graded_mismatches,
    local_cohomology_one,
    local_cohomology_two,
    localize_x,
    mod_p_infty,
    mod_x_infty,
    parse_presentation,
)
from loccoh.gradedmod.localcoh import gamma_x_divisible, mod_x_infty_divisible
from loccoh.pgroups import DIVISIBLE, FREE


@pytest.fixture(scope="module")
def ko():
    return build_ko_p2()


@pytest.fixture(scope="module")
def tmf2():
    return build_tmf_n_p2()


@pytest.fixture(scope="module")
def tmf3():
    return build_tmf_n_p3()


# ---- independent expansion of the B-inverted quotient -----------------------

def quotient_expansion(pres, lo, hi, slopes):
    """Expected degreewise summands of M/B^infinity over [lo, hi].

    ``slopes`` maps a line label to the order d cutting its i = 1 class
    (the line is fed by d times a generator one step below its birth).
    Returns {degree: sorted list of (label, code)}.
    """
    out = {}
    for g in pres.generators:
        if not g.tower:
            continue
        i = 1
        while g.degree - 8 * i >= lo:
            n = g.degree - 8 * i
            if n <= hi:
                label = "%s/B^%d" % (g.label, i) if i > 1 else "%s/B" % g.label
                if g.exponent is not None:
                    code = g.exponent
                elif g.label in slopes and i == 1:
                    code = valuation_of(slopes[g.label], pres.prime)
                else:
                    code = FREE
                out.setdefault(n, []).append((label, code))
            i += 1
    return {n: sorted(v) for n, v in out.items()}


def valuation_of(order, p):
    e = 0
    while order % p == 0 and order > 1:
        order //= p
        e += 1
    return e


def summands_at(graded, n):
    return sorted(graded.at(n).summands)


P2_SLOPES = {"B_%d" % k: 8 // math.gcd(k, 8) for k in range(1, 8)}
P3_SLOPES = {"B_1": 3, "B_2": 3}


# ---- ko at p=2 ---------------------------------------------------------------

def test_ko_has_no_b_torsion_anywhere(ko):
    bundle = local_cohomology_one(ko)
    assert bundle.checked_degrees > 0
    for n in range(ko.lo, ko.hi + 1):
        assert bundle.h0.at(n).is_trivial


def test_ko_quotient_matches_expansion(ko):
    h1 = mod_x_infty(ko)
    expected = quotient_expansion(ko, -40, -1, slopes={})
    for n in range(-40, 0):
        assert summands_at(h1, n) == expected.get(n, []), "degree %d" % n


def test_ko_quotient_first_period(ko):
    h1 = mod_x_infty(ko)
    assert summands_at(h1, -8) == [("1/B", FREE)]
    assert summands_at(h1, -7) == [("eta/B", 1)]
    assert summands_at(h1, -6) == [("eta^2/B", 1)]
    assert summands_at(h1, -4) == [("A/B", FREE)]
    for n in (-5, -3, -2, -1):
        assert h1.at(n).is_trivial
    # the quotient vanishes in non-negative degrees: the module is all towers
    for n in range(0, ko.hi + 1):
        assert h1.at(n).is_trivial
    # deep in the tail the same pattern repeats with raised denominators
    assert summands_at(h1, -12) == [("A/B^2", FREE)]
    assert summands_at(h1, -160) == [("1/B^20", FREE)]


def test_ko_two_generator_bundle(ko):
    two = local_cohomology_two(ko)
    assert not two.symmetry_mismatches
    for n in range(-30, 30):
        assert two.h0.at(n).is_trivial
    h1 = two.h1_resolved()
    for m in range(1, 4):
        assert summands_at(h1, 1 - 8 * m) == [("eta/B^%d" % m if m > 1 else "eta/B", 1)]
        assert summands_at(h1, 2 - 8 * m) == [("eta^2/B^%d" % m if m > 1 else "eta^2/B", 1)]
        assert summands_at(two.h2, -8 * m) == [("1/B^%d" % m if m > 1 else "1/B", DIVISIBLE)]
        assert summands_at(two.h2, 4 - 8 * m) == [("A/B^%d" % m if m > 1 else "A/B", DIVISIBLE)]
    for n in (-5, -3, 0, 5):
        assert h1.at(n).is_trivial
    assert two.h1.ambiguous_degrees(-40, 40) == []


# ---- tmf block at p=2 --------------------------------------------------------

def test_p2_quotient_matches_expansion_on_wide_window(tmf2):
    h1 = mod_x_infty(tmf2)
    expected = quotient_expansion(tmf2, -20, 180, slopes=P2_SLOPES)
    for n in range(-20, 181):
        assert summands_at(h1, n) == expected.get(n, []), "degree %d" % n


def test_p2_quotient_spot_degrees(tmf2):
    h1 = mod_x_infty(tmf2)
    g = h1.at(24)
    assert g.free_rank == 6
    assert g.torsion_exponents == (3,)
    assert ("B_1/B", 3) in g.summands
    assert summands_at(h1, 172) == [("C_7/B", FREE)]
    assert summands_at(h1, 28) == sorted(
        [("C_1/B", FREE), ("C_2/B^4", FREE), ("C_3/B^7", FREE),
         ("C_4/B^10", FREE), ("C_5/B^13", FREE), ("C_6/B^16", FREE),
         ("C_7/B^19", FREE)]
    )


def test_p2_divisible_quotient_spot_degrees(tmf2):
    two = local_cohomology_two(tmf2)
    assert not two.symmetry_mismatches
    # towers over B_k start one step later than towers over C_k: the slope
    # relation kills the first layer of each fed line
    at24 = two.h2.at(24)
    assert at24.divisible_rank == 6 and len(at24.summands) == 6
    assert all(code == DIVISIBLE for _, code in at24.summands)
    assert ("B_1/B", DIVISIBLE) not in at24.summands
    at0 = two.h2.at(0)
    assert at0.divisible_rank == 7
    assert sorted(at0.labels()) == sorted(
        ["B_%d/B^%d" % (k, 3 * k + 1) for k in range(1, 8)]
    )
    atm4 = two.h2.at(-4)
    assert atm4.divisible_rank == 8
    assert sorted(atm4.labels()) == sorted(
        ["C/B^2"] + ["C_%d/B^%d" % (k, 3 * k + 2) for k in range(1, 8)]
    )


def test_p2_divisible_torsion_lives_on_the_free_generators(tmf2):
    gd = gamma_x_divisible(tmf2)
    for k in range(1, 8):
        g = gd.at(24 * k)
        assert g.labels() == ("B_%d/B" % k,)
        assert g.torsion_exponents == (valuation_of(8 // math.gcd(k, 8), 2),)
    for n in range(tmf2.lo, tmf2.stability_degree):
        if n % 24 or n // 24 not in range(1, 8):
            assert gd.at(n).is_trivial, "degree %d" % n


def test_p2_middle_cohomology_resolves_everywhere(tmf2):
    two = local_cohomology_two(tmf2)
    record = two.h1
    assert record.ambiguous_degrees(-200, 200) == []
    h1 = two.h1_resolved()
    # degree 24k: the order-d_k quotient of the fed line, named from above
    for k in range(1, 8):
        g = h1.at(24 * k)
        assert g.labels() == ("B_%d/B" % k,)
        assert g.order() == 8 // math.gcd(k, 8)
    # the middle cohomology of the pair is exactly the torsion part of the
    # one-generator quotient, degree by degree
    expected = quotient_expansion(tmf2, -30, 180, slopes=P2_SLOPES)
    for n in range(-30, 181):
        torsion_only = [s for s in expected.get(n, []) if s[1] >= 1]
        assert summands_at(h1, n) == torsion_only, "degree %d" % n


def test_p2_eta_line_quotient_census(tmf2):
    # sixteen order-2 lines, two per summand of the free part
    two = local_cohomology_two(tmf2)
    h1 = two.h1_resolved()
    eta_lines = [g for g in tmf2.generators if g.tower and g.exponent == 1]
    assert len(eta_lines) == 16
    for g in eta_lines:
        got = h1.at(g.degree - 8)
        assert ("%s/B" % g.label, 1) in got.summands, g.label


def test_p2_h0_of_pair_equals_b_power_torsion(tmf2):
    two = local_cohomology_two(tmf2)
    assert graded_mismatches(two.h0, gamma_x(tmf2), -50, 250) == []


# ---- tmf block at p=3 --------------------------------------------------------

def test_p3_quotient_matches_expansion(tmf3):
    h1 = mod_x_infty(tmf3)
    expected = quotient_expansion(tmf3, -20, 60, slopes=P3_SLOPES)
    for n in range(-20, 61):
        assert summands_at(h1, n) == expected.get(n, []), "degree %d" % n
    g = h1.at(24)
    assert g.torsion_exponents == (1,) and ("B_1/B", 1) in g.summands
    assert g.free_rank == 1 and ("B_2/B^4", FREE) in g.summands


def test_p3_two_generator_bundle(tmf3):
    two = local_cohomology_two(tmf3)
    assert not two.symmetry_mismatches
    assert two.h1.ambiguous_degrees(-100, 100) == []
    h1 = two.h1_resolved()
    assert summands_at(h1, 24) == [("B_1/B", 1)]
    assert summands_at(h1, 48) == [("B_2/B", 1)]
    for n in range(-50, 100):
        if n not in (24, 48):
            assert h1.at(n).is_trivial, "degree %d" % n
    assert summands_at(two.h2, 0) == sorted([("B_1/B^4", DIVISIBLE),
                                             ("B_2/B^7", DIVISIBLE)])
    assert summands_at(two.h2, -4) == sorted([("C/B^2", DIVISIBLE),
                                              ("C_1/B^5", DIVISIBLE),
                                              ("C_2/B^8", DIVISIBLE)])


def test_p3_h0_is_the_torsion_table(tmf3):
    two = local_cohomology_two(tmf3)
    assert graded_mismatches(two.h0, gamma_x(tmf3), -10, 100) == []
    assert two.h0.at(3).order() == 3
    assert two.h0.at(40).labels() == ("beta^4",)


# ---- robustness of the engine ------------------------------------------------

@pytest.mark.parametrize("build", [build_ko_p2, build_tmf_n_p2, build_tmf_n_p3])
def test_radical_invariance_of_torsion_and_quotient(build):
    pres = build()
    assert graded_mismatches(gamma_x(pres), gamma_x(pres, power=2),
                             pres.lo, pres.hi, compare_labels=True) == []
    a, b = mod_x_infty(pres), mod_x_infty(pres, power=2)
    assert graded_mismatches(a, b, pres.lo - 40, pres.hi,
                             compare_labels=True) == []


@pytest.mark.parametrize("build", [build_ko_p2, build_tmf_n_p2, build_tmf_n_p3])
def test_extra_iterates_do_not_change_the_answer(build):
    pres = build()
    assert graded_mismatches(gamma_x(pres), gamma_x(pres, extra_iterates=1),
                             pres.lo, pres.hi, compare_labels=True) == []


def test_stability_degree_choice_is_immaterial(tmf3):
    relaxed = GradedModulePresentation(
        prime=3,
        window=(tmf3.lo, tmf3.hi),
        stability_degree=69,
        generators=tmf3.generators,
        overrides=tmf3.overrides,
        period_hint=tmf3.period_hint,
        name="relaxed",
    )
    assert graded_mismatches(gamma_x(tmf3), gamma_x(relaxed),
                             tmf3.lo, tmf3.hi, compare_labels=True) == []
    assert graded_mismatches(mod_x_infty(tmf3), mod_x_infty(relaxed),
                             tmf3.lo - 20, tmf3.hi, compare_labels=True) == []


def test_window_too_small_for_stable_range():
    text = """\
prime 2
window 0 12
stability 9
gen a 0 inf tower
"""
    with pytest.raises(StabilityError):
        localize_x(parse_presentation(text))


def test_localized_module_is_periodic_both_ways(ko):
    loc = localize_x(ko)
    assert summands_at(loc, 0) == [("1", FREE)]
    assert summands_at(loc, -4) == [("A/B", FREE)]
    assert summands_at(loc, 800) == [("B^100", FREE)]
    assert summands_at(loc, -799) == [("eta/B^100", 1)]


def test_genuinely_ambiguous_extension_is_refused():
    # a free B-torsion class and an order-2 line quotient meet in degree 0:
    # both short exact sequences have two nonzero ends there
    text = """\
prime 2
window 0 24
stability 1
gen f 0 inf single
gen t 8 2 tower
assumed B f
"""
    pres = parse_presentation(text, name="ambiguous")
    two = local_cohomology_two(pres)
    assert two.h1.ambiguous_degrees(-5, 5) == [0]
    assert two.h1.resolve_at(0) is None
    with pytest.raises(AmbiguousExtension):
        two.h1_resolved()


def test_divisible_side_routes_agree_for_the_quotient(tmf2):
    direct = mod_x_infty_divisible(tmf2)
    composite = mod_p_infty(mod_x_infty(tmf2))
    assert graded_mismatches(direct, composite, -30, 180) == []


# ---- duality shift constants ---------------------------------------------------

def test_duality_shift_table():
    assert gorenstein_shift([2]) == -3
    assert gorenstein_shift([2, 6]) == -10
    assert gorenstein_shift([4, 8]) == -14
    assert gorenstein_shift([8, 12]) == -22
    assert gorenstein_shift([2], target="Fp") == -4
    assert gorenstein_shift([8, 12], target="Fp") == -23


def test_duality_shift_composes_with_a_rank_cutting_cofiber():
    # cutting one polynomial generator of degree 2 with a single cofiber of
    # an order-raising self-map of degree 1 lowers the shift by two
    assert gorenstein_shift([2], target="Fp") - 2 == -6


def test_duality_shift_warns_on_odd_degrees():
    with pytest.warns(UserWarning):
        gorenstein_shift([3])
