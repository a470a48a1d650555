import pytest
from hypothesis import given, strategies as st

from loccoh.pgroups import MixedGroup
from loccoh.gradedmod import (
    GradedGroup,
    PeriodicFamily,
    Tail,
    graded_mismatches,
    join_label,
    shift_label,
    split_label,
    tensor_periodic,
)


def test_label_split_join_cases():
    cases = {
        "B": ("1", 1),
        "B^3": ("1", 3),
        "eta": ("eta", 0),
        "eta*B": ("eta", 1),
        "eta*B^21": ("eta", 21),
        "B_1/B": ("B_1", -1),
        "C_7/B^19": ("C_7", -19),
        "1/B^2": ("1", -2),
        "B*nu_2": ("B*nu_2", 0),       # a named class, not a tower element
        "eta*B_2": ("eta*B_2", 0),     # suffix _2 is part of the name
        "eta*B_2*B^3": ("eta*B_2", 3),
        "kappa": ("kappa", 0),
    }
    for label, (base, exp) in cases.items():
        assert split_label(label) == (base, exp), label
        assert join_label(base, exp) == label


def test_shift_label_composes():
    assert shift_label("B_1/B", 1) == "B_1"
    assert shift_label("B_1/B", 4) == "B_1*B^3"
    assert shift_label("eta", -2) == "eta/B^2"
    assert shift_label("B^3", -3) == "1"


@given(
    base=st.sampled_from(["g", "eta", "kappa_4", "B_1", "eta*eta_1", "1"]),
    e=st.integers(-30, 30),
    a=st.integers(-10, 10),
    b=st.integers(-10, 10),
)
def test_shift_label_is_an_action(base, e, a, b):
    label = join_label(base, e)
    assert split_label(label) == (base, e)
    assert shift_label(shift_label(label, a), b) == shift_label(label, a + b)


def _single(prime, n, group, lo, hi, **kw):
    return GradedGroup(prime, {n: group}, lo, hi, **kw)


def test_window_validation():
    z2 = MixedGroup.build(2, free=1, labels=["x"])
    with pytest.raises(ValueError):
        GradedGroup(2, {}, 5, 4)
    with pytest.raises(ValueError):
        GradedGroup(2, {10: z2}, 0, 8)
    with pytest.raises(ValueError):
        GradedGroup(2, {0: z2}, 0, 5, down_tail=Tail(8))


def test_at_inside_and_outside():
    z2 = MixedGroup.build(2, free=1, labels=["x"])
    g = _single(2, 3, z2, 0, 10)
    assert g.at(3).labels() == ("x",)
    assert g.at(4).is_trivial
    assert g.at(-100).is_trivial
    assert g.at(100).is_trivial


def test_down_tail_divides_labels():
    # pattern: Z_2{g/B} in degree -8 repeats downward, one more /B per period
    base = MixedGroup.build(2, free=1, labels=["g/B"])
    g = GradedGroup(2, {-8: base}, -8, -1, down_tail=Tail(8))
    assert g.at(-8).labels() == ("g/B",)
    assert g.at(-16).labels() == ("g/B^2",)
    assert g.at(-40).labels() == ("g/B^5",)
    assert g.at(-9).is_trivial
    assert g.tail_residues("down") == frozenset({0})


def test_up_tail_multiplies_labels():
    top = MixedGroup.build(2, free=1, labels=["B^2"])
    g = GradedGroup(2, {16: top}, 9, 16, up_tail=Tail(8))
    assert g.at(24).labels() == ("B^3",)
    assert g.at(80).labels() == ("B^10",)
    assert g.at(17).is_trivial  # 17 is in the repeating pattern, but its slot is 9 (zero)
    assert g.at(25).is_trivial


def test_mapped_and_shifted():
    mixed = MixedGroup.build(2, free=1, torsion=(3,), labels=["a", "b"])
    g = _single(2, 0, mixed, 0, 8)
    from loccoh.gradedmod import gamma_p, mod_p_infty
    assert gamma_p(g).at(0).describe() == "Z/8"
    assert mod_p_infty(g).at(0).describe() == "Q_2/Z_2"
    assert g.shifted(5).at(5) == mixed
    assert g.shifted(5).window == (5, 13)


def test_support_and_equality():
    z2 = MixedGroup.build(2, torsion=(1,), labels=["t"])
    g = GradedGroup(2, {0: z2, 4: z2}, 0, 7)
    assert g.support(-2, 9) == [0, 4]
    assert g.explicit_support() == [0, 4]
    assert g == GradedGroup(2, {4: z2, 0: z2}, 0, 7)
    assert g != GradedGroup(2, {0: z2}, 0, 7)


def test_family_multiples_mode():
    # one free class in degree 0, tensored up with period 8
    base = _single(2, 0, MixedGroup.build(2, free=1, labels=["x"]), 0, 0)
    fam = tensor_periodic(base, 8, "Z[M]")
    assert fam.at(0).labels() == ("x",)
    assert fam.at(8).labels() == ("x*M",)
    assert fam.at(16).labels() == ("x*M^2",)
    assert fam.at(5).is_trivial
    assert fam.at(-8).is_trivial


def test_family_quotient_mode():
    base = _single(2, 0, MixedGroup.build(2, free=1, labels=["x"]), 0, 0)
    fam = tensor_periodic(base, 8, "Z[M]/M^inf")
    assert fam.at(0).is_trivial
    assert fam.at(-8).labels() == ("x/M",)
    assert fam.at(-24).labels() == ("x/M^3",)
    assert fam.at(-5).is_trivial


def test_family_quotient_collects_all_higher_copies():
    vals = {
        0: MixedGroup.build(2, torsion=(1,), labels=["a"]),
        8: MixedGroup.build(2, torsion=(1,), labels=["b"]),
    }
    base = GradedGroup(2, vals, 0, 8)
    fam = tensor_periodic(base, 8, "Z[M]/M^inf")
    got = fam.at(-8)
    assert got.labels() == ("a/M", "b/M^2")
    assert got.invariants() == (0, 0, (1, 1))


def test_family_mode_preconditions():
    base = GradedGroup(2, {0: MixedGroup.build(2, free=1)}, 0, 7, down_tail=Tail(8))
    with pytest.raises(ValueError):
        tensor_periodic(base, 8, "Z[M]")
    base_up = GradedGroup(2, {0: MixedGroup.build(2, free=1)}, -7, 0, up_tail=Tail(8))
    with pytest.raises(ValueError):
        tensor_periodic(base_up, 8, "Z[M]/M^inf")
    with pytest.raises(ValueError):
        tensor_periodic(base, 8, "Z[M]/M")


def test_graded_mismatches():
    z2 = MixedGroup.build(2, torsion=(1,), labels=["t"])
    z4 = MixedGroup.build(2, torsion=(2,), labels=["t"])
    a = GradedGroup(2, {0: z2, 8: z2}, 0, 8)
    b = GradedGroup(2, {0: z2, 8: z4}, 0, 8)
    assert graded_mismatches(a, b, 0, 8) == [8]
    assert graded_mismatches(a, a, -5, 20) == []
