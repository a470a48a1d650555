"""Graded p-local groups with an explicit window and periodic tails.

A ``GradedGroup`` stores one ``MixedGroup`` per degree on a finite window
``[lo, hi]``.  Outside the window the value is either zero or given by a
periodic *tail*: the pattern of the first (respectively last) ``period``
degrees of the window repeats indefinitely downward (upward), with summand
labels re-exponentiated each period.  That is exactly the shape of every
graded group this package produces: connective modules are zero below the
window, periodic localisations repeat, and quotient modules repeat the full
localisation pattern below their window.

Labels follow a single multiplicative convention.  A summand label is a pair
``(base, e)`` printed as ``base*B^e`` for ``e > 0``, ``base`` for ``e == 0``
and ``base/B^m`` for ``e == -m < 0`` (with ``B^1`` shortened to ``B`` and the
empty base ``"1"`` absorbed, so ``("1", 3)`` prints as ``B^3``).  Shifting a
degree by one period shifts ``e`` by one.
"""

import re
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from ..pgroups import MixedGroup

_BARE_RE = re.compile(r"^B(?:\^(\d+))?$")
_TOWER_RE = re.compile(r"^(?P<base>.+?)\*B(?:\^(?P<exp>\d+))?$")
_QUOT_RE = re.compile(r"^(?P<base>.+?)/B(?:\^(?P<exp>\d+))?$")


def split_label(label: str) -> Tuple[str, int]:
    """Split a summand label into (base, exponent-of-B)."""
    m = _BARE_RE.match(label)
    if m:
        return "1", int(m.group(1) or "1")
    m = _QUOT_RE.match(label)
    if m:
        return m.group("base"), -int(m.group("exp") or "1")
    m = _TOWER_RE.match(label)
    if m:
        return m.group("base"), int(m.group("exp") or "1")
    return label, 0


def join_label(base: str, exp: int) -> str:
    if exp == 0:
        return base
    power = "B" if abs(exp) == 1 else "B^%d" % abs(exp)
    if exp > 0:
        return power if base == "1" else "%s*%s" % (base, power)
    return "%s/%s" % (base, power)


def shift_label(label: str, k: int) -> str:
    """Multiply a label by B^k (k may be negative)."""
    if k == 0:
        return label
    base, exp = split_label(label)
    return join_label(base, exp + k)


def _shift_group_labels(group: MixedGroup, k: int) -> MixedGroup:
    if k == 0:
        return group
    return group.relabel([shift_label(l, k) for l in group.labels()])


class Tail:
    """Periodic continuation of a window edge."""

    __slots__ = ("period",)

    def __init__(self, period: int):
        if period <= 0:
            raise ValueError("tail period must be positive")
        self.period = period

    def __eq__(self, other):
        return isinstance(other, Tail) and other.period == self.period

    def __repr__(self):
        return "Tail(period=%d)" % self.period


class GradedGroup:
    """Degreewise p-local groups on a window, with optional periodic tails.

    ``down_tail`` continues the pattern of ``[lo, lo+period)`` to all degrees
    below ``lo``; a degree ``k`` periods below its in-window representative
    has every label divided by ``B^k``.  ``up_tail`` is symmetric (labels are
    multiplied).  A tail over an all-zero edge pattern is harmless: it just
    certifies that the group vanishes out there.
    """

    def __init__(
        self,
        prime: int,
        values: Mapping[int, MixedGroup],
        lo: int,
        hi: int,
        down_tail: Optional[Tail] = None,
        up_tail: Optional[Tail] = None,
    ):
        if lo > hi:
            raise ValueError("empty window [%d, %d]" % (lo, hi))
        self.prime = prime
        self.lo = lo
        self.hi = hi
        self.down_tail = down_tail
        self.up_tail = up_tail
        vals: Dict[int, MixedGroup] = {}
        for n, g in values.items():
            if g.prime != prime:
                raise ValueError("degree %d group has prime %d, expected %d"
                                 % (n, g.prime, prime))
            if not (lo <= n <= hi):
                raise ValueError("degree %d outside window [%d, %d]" % (n, lo, hi))
            if not g.is_trivial:
                vals[n] = g
        self._values = vals
        if down_tail is not None and lo + down_tail.period - 1 > hi:
            raise ValueError("window shorter than the down-tail period")
        if up_tail is not None and hi - up_tail.period + 1 < lo:
            raise ValueError("window shorter than the up-tail period")

    @property
    def window(self) -> Tuple[int, int]:
        return (self.lo, self.hi)

    def at(self, n: int) -> MixedGroup:
        if self.lo <= n <= self.hi:
            return self._values.get(n, MixedGroup.zero(self.prime))
        if n < self.lo:
            if self.down_tail is None:
                return MixedGroup.zero(self.prime)
            period = self.down_tail.period
            rep = self.lo + ((n - self.lo) % period)
            k = (rep - n) // period
            return _shift_group_labels(self.at(rep), -k)
        if self.up_tail is None:
            return MixedGroup.zero(self.prime)
        period = self.up_tail.period
        offset = (n - self.hi) % period
        rep = self.hi if offset == 0 else self.hi - period + offset
        k = (n - rep) // period
        return _shift_group_labels(self.at(rep), k)

    def support(self, lo: int, hi: int) -> List[int]:
        """Degrees in [lo, hi] with a nonzero value."""
        return [n for n in range(lo, hi + 1) if not self.at(n).is_trivial]

    def explicit_support(self) -> List[int]:
        return sorted(self._values)

    def tail_residues(self, side: str) -> frozenset:
        """Residues (mod the tail period) where the given tail is nonzero."""
        tail = self.down_tail if side == "down" else self.up_tail
        if tail is None:
            return frozenset()
        if side == "down":
            edge = range(self.lo, self.lo + tail.period)
        else:
            edge = range(self.hi - tail.period + 1, self.hi + 1)
        return frozenset(n % tail.period for n in edge if not self.at(n).is_trivial)

    def mapped(self, fn: Callable[[MixedGroup], MixedGroup]) -> "GradedGroup":
        """Apply a degreewise functor.

        Valid for label-preserving closed forms (each output summand keeps
        the label of the input summand it came from), so the tail patterns
        stay correct after mapping.
        """
        return GradedGroup(
            self.prime,
            {n: fn(g) for n, g in self._values.items()},
            self.lo,
            self.hi,
            down_tail=self.down_tail,
            up_tail=self.up_tail,
        )

    def shifted(self, a: int) -> "GradedGroup":
        """Regrade so the old degree-n value sits in degree n + a."""
        return GradedGroup(
            self.prime,
            {n + a: g for n, g in self._values.items()},
            self.lo + a,
            self.hi + a,
            down_tail=self.down_tail,
            up_tail=self.up_tail,
        )

    def is_zero_on_window(self) -> bool:
        return not self._values

    def __eq__(self, other):
        if not isinstance(other, GradedGroup):
            return NotImplemented
        return (self.prime == other.prime and self.window == other.window
                and self._values == other._values
                and self.down_tail == other.down_tail
                and self.up_tail == other.up_tail)

    def __repr__(self):
        return "GradedGroup(p=%d, window=[%d,%d], %d nonzero degrees)" % (
            self.prime, self.lo, self.hi, len(self._values))


def gamma_p(graded: GradedGroup) -> GradedGroup:
    """Degreewise p-power torsion subgroup."""
    from ..pgroups import gamma_p_group
    return graded.mapped(gamma_p_group)


def mod_p_infty(graded: GradedGroup) -> GradedGroup:
    """Degreewise quotient by the p-divisible closure of torsion."""
    from ..pgroups import mod_p_infty_group
    return graded.mapped(mod_p_infty_group)


def graded_mismatches(a, b, lo: int, hi: int, compare_labels: bool = False) -> List[int]:
    """Degrees in [lo, hi] where two degreewise-group objects disagree.

    Compares abstract isomorphism type (invariants) by default; with
    ``compare_labels`` the canonicalised label sequences must agree as well.
    Accepts anything with ``.at(n)``.
    """
    bad = []
    for n in range(lo, hi + 1):
        ga = a.at(n)
        gb = b.at(n)
        if ga.invariants() != gb.invariants():
            bad.append(n)
        elif compare_labels and ga.canonical().labels() != gb.canonical().labels():
            bad.append(n)
    return bad


def family_quotient_label(label: str, gen: str, j: int) -> str:
    return "%s/%s" % (label, gen) if j == 1 else "%s/%s^%d" % (label, gen, j)


def family_multiple_label(label: str, gen: str, j: int) -> str:
    if j == 0:
        return label
    return "%s*%s" % (label, gen) if j == 1 else "%s*%s^%d" % (label, gen, j)


class PeriodicFamily:
    """A graded group tensored with Z[M] or with Z[M]/M^infinity.

    ``M`` is a formal periodicity generator of degree ``period`` (its label
    is configurable).  In mode ``"Z[M]"`` the degree-n value collects copies
    of the base at n, n-period, n-2*period, ...; the base must be bounded
    below.  In mode ``"Z[M]/M^inf"`` it collects copies at n+period,
    n+2*period, ... labelled ``x/M^j``; the base must be bounded above.
    Either way every degree is a finite sum.
    """

    MODES = ("Z[M]", "Z[M]/M^inf")

    def __init__(self, base: GradedGroup, period: int, mode: str, gen_label: str = "M"):
        if period <= 0:
            raise ValueError("period must be positive")
        if mode not in self.MODES:
            raise ValueError("unknown mode %r (expected one of %s)" % (mode, list(self.MODES)))
        if mode == "Z[M]" and base.down_tail is not None:
            raise ValueError("Z[M] tensor needs a base bounded below")
        if mode == "Z[M]/M^inf" and base.up_tail is not None:
            raise ValueError("Z[M]/M^inf tensor needs a base bounded above")
        self.base = base
        self.period = period
        self.mode = mode
        self.gen_label = gen_label

    @property
    def prime(self) -> int:
        return self.base.prime

    def copy_indices(self, n: int) -> List[int]:
        """The exponents j contributing to degree n."""
        if self.mode == "Z[M]":
            jmax = (n - self.base.lo) // self.period
            return list(range(0, jmax + 1))
        jmin_degree = self.base.hi - n
        jmax = jmin_degree // self.period
        return list(range(1, jmax + 1))

    def at(self, n: int) -> MixedGroup:
        total = MixedGroup.zero(self.prime)
        for j in self.copy_indices(n):
            if self.mode == "Z[M]":
                piece = self.base.at(n - self.period * j)
                labels = [family_multiple_label(l, self.gen_label, j)
                          for l in piece.labels()]
            else:
                piece = self.base.at(n + self.period * j)
                labels = [family_quotient_label(l, self.gen_label, j)
                          for l in piece.labels()]
            if not piece.is_trivial:
                total = total.direct_sum(piece.relabel(labels))
        return total

    def support(self, lo: int, hi: int) -> List[int]:
        return [n for n in range(lo, hi + 1) if not self.at(n).is_trivial]

    def with_base(self, base: GradedGroup) -> "PeriodicFamily":
        return PeriodicFamily(base, self.period, self.mode, self.gen_label)

    def __repr__(self):
        return "PeriodicFamily(mode=%s, gen=%s, period=%d, base=%r)" % (
            self.mode, self.gen_label, self.period, self.base)


def tensor_periodic(base: GradedGroup, period: int, mode: str,
                    gen_label: str = "M") -> PeriodicFamily:
    """Tensor a graded group with Z[M] or Z[M]/M^infinity, |M| = period."""
    return PeriodicFamily(base, period, mode, gen_label)
