"""Two-row and three-row spectral sequences built from local cohomology.

A page is a finite family of rows indexed by the cohomological filtration
``s``; the cell at ``(s, t)`` is a named `MixedGroup`, and the whole row is
either a `GradedGroup` or a `PeriodicFamily` (for the shapes where the
module is first tensored against negative powers of a periodicity
generator).  Differentials and hidden additive extensions are *inputs*:
they arrive as small rule files, are checked against the page arithmetic
(bidegree alignment, image orders dividing cell orders, order
conservation), and are then applied mechanically.

Conventions, chosen once and used everywhere downstream:

* charts plot a cell ``(s, t)`` at column ``n = t - s`` and height ``s``;
* ``d_r`` maps ``(s, t)`` to ``(s + r, t + r - 1)``, i.e. one column to the
  left and ``r`` rows up;
* higher filtration means *deeper subgroup* of the assembled column: the
  column at ``n`` is filtered ``... <= F^2 <= F^1 <= F^0 = total`` with
  ``F^s / F^(s+1)`` the surviving cell at ``(s, n + s)``.

Pages are immutable; `apply_differentials` and `assemble_abutment` return
new objects and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import (Dict, Iterable, List, Mapping, Optional, Sequence,
                    Tuple, Union)

from .pgroups import DIVISIBLE, FREE, MixedGroup, valuation
from .gradedmod import (GradedGroup, PeriodicFamily, Tail,
                        family_quotient_label)
from .gradedmod.localcoh import (STEP, AmbiguousExtension, ExtensionRecord,
                                 local_cohomology_one, local_cohomology_two)
from .gradedmod.presentation import GradedModulePresentation

Row = Union[GradedGroup, PeriodicFamily]

__all__ = [
    "DifferentialRule", "ExtensionRule", "Decoration", "RuleSet",
    "parse_rules", "BigradedPage", "build_e2", "apply_differentials",
    "RoomReport", "no_differential_room", "converge",
    "AbutmentGroup", "assemble_abutment",
]


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DifferentialRule:
    """``d_<page>`` carries <source> onto a subgroup of order <image_order>
    inside <target>; both labels name single summands on the page."""
    page: int
    source: str
    target: str
    image_order: int


@dataclass(frozen=True)
class ExtensionRule:
    """In the abutted column the class <low> is not split off: it lifts to
    an element whose <multiplier>-th multiple generates the image of the
    summand <high> one filtration deeper (same column)."""
    low: str
    high: str
    multiplier: int


@dataclass(frozen=True)
class Decoration:
    """A pictorial multiplication witness between two cells; drawn by the
    chart layer and never used in any computation."""
    kind: str  # "eta" or "nu"
    low: str
    high: str


@dataclass(frozen=True)
class RuleSet:
    differentials: Tuple[DifferentialRule, ...] = ()
    extensions: Tuple[ExtensionRule, ...] = ()
    decorations: Tuple[Decoration, ...] = ()


class RuleSyntaxError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__("line %d: %s" % (line_no, message))
        self.line_no = line_no


_DECORATION_KINDS = {"etaext": "eta", "nuext": "nu"}


def parse_rules(text: str) -> RuleSet:
    """Parse a rule file.

    Line grammar (blank lines and ``#`` comments are skipped)::

        d <page> <source-label> <target-label> <image-order>
        ext <low-label> <high-label> <multiplier>
        etaext <low-label> <high-label>
        nuext <low-label> <high-label>
    """
    diffs: List[DifferentialRule] = []
    exts: List[ExtensionRule] = []
    decos: List[Decoration] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        if kind == "d":
            if len(args) != 4:
                raise RuleSyntaxError(line_no, "expected: d <page> <source> <target> <image-order>")
            try:
                page, order = int(args[0]), int(args[3])
            except ValueError:
                raise RuleSyntaxError(line_no, "page and image-order must be integers")
            if page < 2:
                raise RuleSyntaxError(line_no, "differentials start on page 2")
            if order < 2:
                raise RuleSyntaxError(line_no, "image-order must exceed 1")
            diffs.append(DifferentialRule(page, args[1], args[2], order))
        elif kind == "ext":
            if len(args) != 3:
                raise RuleSyntaxError(line_no, "expected: ext <low> <high> <multiplier>")
            try:
                mult = int(args[2])
            except ValueError:
                raise RuleSyntaxError(line_no, "multiplier must be an integer")
            if mult < 2:
                raise RuleSyntaxError(line_no, "multiplier must exceed 1")
            exts.append(ExtensionRule(args[0], args[1], mult))
        elif kind in _DECORATION_KINDS:
            if len(args) != 2:
                raise RuleSyntaxError(line_no, "expected: %s <low> <high>" % kind)
            decos.append(Decoration(_DECORATION_KINDS[kind], args[0], args[1]))
        else:
            raise RuleSyntaxError(line_no, "unknown statement %r" % kind)
    return RuleSet(tuple(diffs), tuple(exts), tuple(decos))


# ---------------------------------------------------------------------------
# Pages
# ---------------------------------------------------------------------------


def _row_base(row: Row) -> GradedGroup:
    return row.base if isinstance(row, PeriodicFamily) else row


def _row_rebuild(row: Row, base: GradedGroup) -> Row:
    return row.with_base(base) if isinstance(row, PeriodicFamily) else base


@dataclass(frozen=True, eq=False)
class BigradedPage:
    """One page of a spectral sequence: rows of graded groups plus the
    differential rules still waiting for their page number to come up.

    ``rows`` maps the filtration ``s`` to the row; ``flagged`` lists cells
    ``(s, t)`` whose isomorphism type could not be pinned down exactly
    (right order, possibly wrong splitting) and which therefore must not
    reach an abutment.  ``t`` in every rule-facing API is the *base* degree
    of a label: on a periodically wrapped page the actual copies sit at
    ``t - j * period`` for ``j >= 1``, and every statement about the base
    class is applied to all of its copies at once.
    """
    prime: int
    r: int
    rows: Tuple[Tuple[int, Row], ...]
    pending: Tuple[DifferentialRule, ...] = ()
    extensions: Tuple[ExtensionRule, ...] = ()
    decorations: Tuple[Decoration, ...] = ()
    flagged: Tuple[Tuple[int, int], ...] = ()
    name: str = ""
    ideal: Tuple[str, ...] = ()

    # -- access ------------------------------------------------------------

    def row_indices(self) -> Tuple[int, ...]:
        return tuple(s for s, _ in self.rows)

    def row(self, s: int) -> Row:
        for idx, row in self.rows:
            if idx == s:
                return row
        raise KeyError("no row at filtration %d" % s)

    def cell(self, s: int, t: int) -> MixedGroup:
        for idx, row in self.rows:
            if idx == s:
                return row.at(t)
        return MixedGroup.zero(self.prime)

    def column(self, n: int) -> Dict[int, MixedGroup]:
        """Nonzero cells over the chart column ``n = t - s``."""
        out: Dict[int, MixedGroup] = {}
        for s, row in self.rows:
            g = row.at(n + s)
            if not g.is_trivial:
                out[s] = g
        return out

    @property
    def is_family_page(self) -> bool:
        return any(isinstance(row, PeriodicFamily) for _, row in self.rows)

    @property
    def family_gen(self) -> Optional[str]:
        for _, row in self.rows:
            if isinstance(row, PeriodicFamily):
                return row.gen_label
        return None

    @property
    def family_period(self) -> Optional[int]:
        for _, row in self.rows:
            if isinstance(row, PeriodicFamily):
                return row.period
        return None

    def locate(self, label: str) -> Tuple[int, int]:
        """The unique ``(s, t)`` whose cell carries a summand named
        ``label``; base coordinates on a wrapped page."""
        hits: List[Tuple[int, int]] = []
        for s, row in self.rows:
            base = _row_base(row)
            for t in base.explicit_support():
                if label in base.at(t).labels():
                    hits.append((s, t))
        if not hits:
            raise KeyError("no cell carries a summand labelled %r" % label)
        if len(hits) > 1:
            raise KeyError("label %r is ambiguous: found at %s"
                           % (label, ", ".join("(s=%d, t=%d)" % h for h in hits)))
        return hits[0]

    def _with(self, **changes) -> "BigradedPage":
        data = dict(
            prime=self.prime, r=self.r, rows=self.rows, pending=self.pending,
            extensions=self.extensions, decorations=self.decorations,
            flagged=self.flagged, name=self.name, ideal=self.ideal,
        )
        data.update(changes)
        return BigradedPage(**data)


# ---------------------------------------------------------------------------
# E_2 construction
# ---------------------------------------------------------------------------


def _resolve_with_flags(record: ExtensionRecord) -> Tuple[GradedGroup, List[int]]:
    """Like ``record.resolved()`` but an unresolved degree is kept (as the
    order-correct direct sum of the two ends) and reported instead of
    raising."""
    lo, hi = record.window()
    values: Dict[int, MixedGroup] = {}
    unresolved: List[int] = []
    for n in range(lo, hi + 1):
        g = record.resolve_at(n)
        if g is None:
            left, right = record.p_first
            g = left.at(n).direct_sum(right.at(n))
            unresolved.append(n)
        if not g.is_trivial:
            values[n] = g
    return GradedGroup(record.prime, values, lo, hi, down_tail=Tail(STEP)), unresolved


def _normalise_ideal(pres: GradedModulePresentation,
                     ideal: Sequence[str]) -> Tuple[bool, bool]:
    """Return (two_generator, wrap_periodic) or raise."""
    tokens = [str(x) for x in ideal]
    p = str(pres.prime)
    two_gen = bool(tokens) and tokens[0] == p
    if two_gen:
        tokens = tokens[1:]
    if not tokens or tokens[0] != "B":
        raise ValueError("unsupported ideal %r: expected (B), (%s, B), or the "
                         "same followed by the periodicity generator"
                         % (tuple(ideal), p))
    tokens = tokens[1:]
    wrap = False
    if tokens:
        hint = pres.period_hint
        if hint is None:
            raise ValueError("ideal %r asks for a periodic wrap but the "
                             "module declares no periodicity generator"
                             % (tuple(ideal),))
        if len(tokens) > 1 or tokens[0] != hint[0]:
            raise ValueError("unsupported ideal %r: trailing generator must "
                             "be %r" % (tuple(ideal), hint[0]))
        if hint[0] in ("B", p):
            raise ValueError("periodicity generator %r clashes with the "
                             "ideal generators" % hint[0])
        wrap = True
    return two_gen, wrap


def build_e2(pres: GradedModulePresentation, ideal: Sequence[str],
             rules: Union[RuleSet, str, None] = None) -> BigradedPage:
    """The starting page of the local cohomology spectral sequence.

    Supported ideal shapes, ``p`` the module's prime and ``L`` its declared
    periodicity generator:

    * ``("B",)``          -- rows 0..1: B-power torsion, B-quotient classes;
    * ``(p, "B")``        -- rows 0..2, the middle row resolved degreewise
      from both composition orders (unresolvable degrees are flagged);
    * ``("B", L)``        -- the one-generator rows tensored against all
      negative powers of ``L`` and pushed up one filtration (rows 1..2);
    * ``(p, "B", L)``     -- likewise for the two-generator rows (rows 1..3).

    ``rules`` (a `RuleSet` or raw rule text) attaches the differentials,
    extensions and decorations; differentials and extensions are validated
    against the page before it is returned.
    """
    if isinstance(rules, str):
        rules = parse_rules(rules)
    elif rules is None:
        rules = RuleSet()

    two_gen, wrap = _normalise_ideal(pres, ideal)

    flagged_degrees: List[int] = []
    if two_gen:
        bundle = local_cohomology_two(pres)
        h1, flagged_degrees = _resolve_with_flags(bundle.h1)
        base_rows: Dict[int, GradedGroup] = {0: bundle.h0, 1: h1, 2: bundle.h2}
    else:
        one = local_cohomology_one(pres)
        base_rows = {0: one.h0, 1: one.h1}

    rows: Dict[int, Row]
    if wrap:
        label, period = pres.period_hint  # type: ignore[misc]
        rows = {s + 1: PeriodicFamily(base, period, "Z[M]/M^inf", gen_label=label)
                for s, base in base_rows.items()}
        flagged = tuple((2, t) for t in flagged_degrees)
    else:
        rows = dict(base_rows)
        flagged = tuple((1, t) for t in flagged_degrees)

    page = BigradedPage(
        prime=pres.prime, r=2,
        rows=tuple(sorted(rows.items())),
        pending=rules.differentials,
        extensions=rules.extensions,
        decorations=rules.decorations,
        flagged=flagged,
        name=pres.name or "",
        ideal=tuple(str(x) for x in ideal),
    )
    for rule in rules.differentials:
        _check_differential(page, rule)
    for rule in rules.extensions:
        _check_extension(page, rule)
    return page


# ---------------------------------------------------------------------------
# Differentials
# ---------------------------------------------------------------------------


def _order_exponent(page: BigradedPage, value: int, what: str) -> int:
    v = valuation(value, page.prime)
    if page.prime ** v != value:
        raise ValueError("%s %d is not a power of the prime %d"
                         % (what, value, page.prime))
    return v


def _summand_code(row_base: GradedGroup, t: int, label: str) -> int:
    cell = row_base.at(t)
    for lbl, code in cell.summands:
        if lbl == label:
            return code
    raise KeyError("cell at degree %d has no summand %r" % (t, label))


def _check_differential(page: BigradedPage, rule: DifferentialRule) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    src = page.locate(rule.source)
    tgt = page.locate(rule.target)
    if tgt[0] != src[0] + rule.page or tgt[1] != src[1] + rule.page - 1:
        raise ValueError(
            "d_%d %s -> %s does not fit the bidegree: source (s=%d, t=%d), "
            "target (s=%d, t=%d), expected (s=%d, t=%d)"
            % (rule.page, rule.source, rule.target, src[0], src[1],
               tgt[0], tgt[1], src[0] + rule.page, src[1] + rule.page - 1))
    v = _order_exponent(page, rule.image_order, "image order")
    src_code = _summand_code(_row_base(page.row(src[0])), src[1], rule.source)
    if 1 <= src_code < v:
        raise ValueError("image order %d exceeds the order of the source "
                         "summand %r" % (rule.image_order, rule.source))
    tgt_code = _summand_code(_row_base(page.row(tgt[0])), tgt[1], rule.target)
    if tgt_code == FREE:
        raise ValueError("differential target %r is a free summand: a "
                         "nonzero finite image cannot sit inside it"
                         % rule.target)
    if 1 <= tgt_code < v:
        raise ValueError("image order %d exceeds the order of the target "
                         "summand %r" % (rule.image_order, rule.target))
    return src, tgt


def _strike(base: GradedGroup, t: int, label: str, v: int,
            role: str) -> GradedGroup:
    """Divide the summand ``label`` of the degree-``t`` group by ``p^v``
    (kernel bookkeeping at a source, cokernel bookkeeping at a target)."""
    cell = base.at(t)
    new_summands: List[Tuple[str, int]] = []
    seen = False
    for lbl, code in cell.summands:
        if lbl != label:
            new_summands.append((lbl, code))
            continue
        seen = True
        if code == FREE:
            if role == "target":
                raise ValueError("free summand %r cannot absorb a finite image" % label)
            new_summands.append((lbl, code))  # kernel of Z_p onto finite is Z_p
        elif code == DIVISIBLE:
            new_summands.append((lbl, code))  # Q/Z is unchanged either way
        else:
            if code < v:
                raise ValueError("summand %r has order %d < image order %d"
                                 % (label, base.prime ** code, base.prime ** v))
            if code > v:
                new_summands.append((lbl, code - v))
    if not seen:
        raise KeyError("cell at degree %d has no summand %r" % (t, label))
    values = {n: base.at(n) for n in base.explicit_support() if n != t}
    struck = MixedGroup(base.prime, new_summands)
    if not struck.is_trivial:
        values[t] = struck
    return GradedGroup(base.prime, values, base.lo, base.hi,
                       down_tail=base.down_tail, up_tail=base.up_tail)


def apply_differentials(page: BigradedPage,
                        rules: Optional[Sequence[DifferentialRule]] = None) -> BigradedPage:
    """Apply the page-``r`` differentials and turn to page ``r + 1``.

    Each rule replaces its source summand by the kernel (order divided by
    the image order) and its target summand by the cokernel; every other
    cell is carried over unchanged.  With no rules the page advances with
    identical rows.  Order conservation is asserted for every finite cell
    the rules touch.
    """
    if rules is None:
        rules = tuple(r for r in page.pending if r.page == page.r)
    applied = tuple(rules)
    for rule in applied:
        if rule.page != page.r:
            raise ValueError("rule %r belongs to page %d, not page %d"
                             % (rule, rule.page, page.r))

    bases: Dict[int, GradedGroup] = {s: _row_base(row) for s, row in page.rows}
    for rule in applied:
        (s1, t1), (s2, t2) = _check_differential(page, rule)
        v = valuation(rule.image_order, page.prime)
        before = (bases[s1].at(t1), bases[s2].at(t2))
        bases[s1] = _strike(bases[s1], t1, rule.source, v, "source")
        bases[s2] = _strike(bases[s2], t2, rule.target, v, "target")
        after = (bases[s1].at(t1), bases[s2].at(t2))
        for old, new in zip(before, after):
            if old.is_finite and new.order() * rule.image_order != old.order():
                raise ArithmeticError(
                    "order bookkeeping failed for %r: |E_%d| = %d, |E_%d| = %d, "
                    "image order %d" % (rule, page.r, old.order(),
                                        page.r + 1, new.order(), rule.image_order))

    new_rows = tuple((s, _row_rebuild(row, bases[s])) for s, row in page.rows)
    leftover = tuple(r for r in page.pending if r not in applied)
    return page._with(r=page.r + 1, rows=new_rows, pending=leftover)


# ---------------------------------------------------------------------------
# Collapse detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoomReport:
    """Alignment audit: could any later differential have both a nonzero
    source and a nonzero target?  ``collisions`` lists every aligned pair
    ``(r, (s, t) source, (s + r, t + r - 1) target)`` over the audited
    columns; soundness of the finite audit window rests on the rows being
    eventually periodic in both directions."""
    page_r: int
    columns: Tuple[int, int]
    collisions: Tuple[Tuple[int, Tuple[int, int], Tuple[int, int]], ...]

    @property
    def no_room(self) -> bool:
        return not self.collisions

    def describe(self) -> str:
        lo, hi = self.columns
        if self.no_room:
            return ("page %d: no differential of any length fits over columns "
                    "%d..%d (and, by periodicity, anywhere); the sequence has "
                    "collapsed" % (self.page_r, lo, hi))
        lines = ["page %d: %d aligned source/target pairs over columns %d..%d:"
                 % (self.page_r, len(self.collisions), lo, hi)]
        for r, src, tgt in self.collisions:
            lines.append("  d_%d could map (s=%d, t=%d) -> (s=%d, t=%d)"
                         % (r, src[0], src[1], tgt[0], tgt[1]))
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.describe()


def _audit_columns(page: BigradedPage) -> Tuple[int, int]:
    """A finite column window whose alignment pattern provably repeats
    below: the explicit hull extended one full period downward."""
    los: List[int] = []
    his: List[int] = []
    periods: List[int] = [1]
    for s, row in page.rows:
        base = _row_base(row)
        support = base.explicit_support()
        if support:
            los.append(min(support) - s)
            his.append(max(support) - s)
        if base.down_tail is not None:
            periods.append(base.down_tail.period)
        if isinstance(row, PeriodicFamily):
            periods.append(row.period)
    if not los:
        return (0, 0)
    period = 1
    for p in periods:
        period = period * p // _gcd(period, p)
    return (min(los) - period, max(his))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def no_differential_room(page: BigradedPage,
                         columns: Optional[Tuple[int, int]] = None) -> RoomReport:
    """Audit every differential length from the current page onward.

    ``d_r`` needs a nonzero cell at ``(s, t)`` and another at
    ``(s + r, t + r - 1)``; with finitely many rows only finitely many
    lengths exist, and the audit window defaults to the explicit support
    hull extended one full period downward, which covers the periodic
    continuations of every row.
    """
    if columns is None:
        columns = _audit_columns(page)
    lo, hi = columns
    indices = page.row_indices()
    collisions: List[Tuple[int, Tuple[int, int], Tuple[int, int]]] = []
    if indices:
        span = max(indices) - min(indices)
        for r in range(max(2, page.r), span + 1):
            for s in indices:
                if s + r not in indices:
                    continue
                src_row = page.row(s)
                tgt_row = page.row(s + r)
                for n in range(lo, hi + 1):
                    t = n + s
                    if src_row.at(t).is_trivial:
                        continue
                    if not tgt_row.at(t + r - 1).is_trivial:
                        collisions.append((r, (s, t), (s + r, t + r - 1)))
    return RoomReport(page.r, columns, tuple(collisions))


def converge(page: BigradedPage) -> Tuple[BigradedPage, RoomReport]:
    """Run the page forward until collapse is proved.

    On each page: apply the pending rules for that page if there are any;
    otherwise audit for room.  If the audit still finds aligned pairs with
    no rule to settle them the data is incomplete and we refuse to guess.
    """
    while True:
        due = tuple(r for r in page.pending if r.page == page.r)
        if due:
            page = apply_differentials(page, due)
            continue
        report = no_differential_room(page)
        if report.no_room:
            if page.pending:
                raise ArithmeticError(
                    "rules %r wait for a later page, but no differential of "
                    "any length fits any more" % (page.pending,))
            return page, report
        raise ArithmeticError(
            "page %d still has room for differentials but no rules resolve "
            "them:\n%s" % (page.r, report.describe()))


# ---------------------------------------------------------------------------
# Abutment
# ---------------------------------------------------------------------------


class AbutmentGroup:
    """The assembled column groups of a collapsed page over a window.

    ``provenance`` records, per degree and in increasing filtration order,
    which page summands were consumed; ``merges`` records the extension
    rules that glued two of them.  Degrees outside the assembled window
    raise instead of silently reading as zero.
    """

    def __init__(self, prime: int, lo: int, hi: int,
                 values: Mapping[int, MixedGroup],
                 provenance: Mapping[int, Tuple[Tuple[int, str], ...]],
                 merges: Mapping[int, Tuple[ExtensionRule, ...]]):
        self.prime = prime
        self.lo = lo
        self.hi = hi
        self._values = dict(values)
        self._provenance = dict(provenance)
        self._merges = dict(merges)

    @property
    def window(self) -> Tuple[int, int]:
        return (self.lo, self.hi)

    def at(self, n: int) -> MixedGroup:
        if not (self.lo <= n <= self.hi):
            raise ValueError("degree %d outside the assembled window [%d, %d]"
                             % (n, self.lo, self.hi))
        return self._values.get(n, MixedGroup.zero(self.prime))

    def support(self, lo: Optional[int] = None, hi: Optional[int] = None) -> List[int]:
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        return [n for n in range(lo, hi + 1) if n in self._values]

    def provenance_at(self, n: int) -> Tuple[Tuple[int, str], ...]:
        self.at(n)
        return self._provenance.get(n, ())

    def merges_at(self, n: int) -> Tuple[ExtensionRule, ...]:
        self.at(n)
        return self._merges.get(n, ())

    def describe(self, n: int) -> str:
        return self.at(n).describe()


def _check_extension(page: BigradedPage, rule: ExtensionRule) -> None:
    low = page.locate(rule.low)
    high = page.locate(rule.high)
    if high[0] != low[0] + 1 or high[1] != low[1] + 1:
        raise ValueError(
            "ext %s %s: the cells do not sit in the same column on adjacent "
            "rows: low (s=%d, t=%d), high (s=%d, t=%d)"
            % (rule.low, rule.high, low[0], low[1], high[0], high[1]))
    v = _order_exponent(page, rule.multiplier, "multiplier")
    low_code = _summand_code(_row_base(page.row(low[0])), low[1], rule.low)
    if low_code < 1:
        raise ValueError("extension low class %r must be a finite cyclic "
                         "summand" % rule.low)
    if low_code < v:
        raise ValueError("multiplier %d exceeds the order of %r"
                         % (rule.multiplier, rule.low))
    high_code = _summand_code(_row_base(page.row(high[0])), high[1], rule.high)
    if high_code == DIVISIBLE:
        raise ValueError("extension high class %r is divisible: the sequence "
                         "splits and the rule says nothing" % rule.high)


def _merge_summands(prime: int, low_label: str, low_code: int,
                    high_code: int, v: int) -> List[Tuple[str, int]]:
    """The middle group of 0 -> high -> F -> Z/p^low_code -> 0 when the
    lift of the low generator times p^v generates the image of high."""
    out: List[Tuple[str, int]] = []
    if high_code == FREE:
        out.append((low_label, FREE))
    else:
        out.append((low_label, v + high_code))
    if low_code > v:
        out.append(("res(%s)" % low_label, low_code - v))
    return out


def _column_entries(page: BigradedPage, n: int) -> List[List[object]]:
    entries: List[List[object]] = []
    for s, row in page.rows:
        cell = row.at(n + s)
        for lbl, code in cell.summands:
            entries.append([s, lbl, code])
    return entries


def _wrapped(label: str, gen: Optional[str], j: int) -> str:
    if j == 0:
        return label
    assert gen is not None
    return family_quotient_label(label, gen, j)


def assemble_abutment(page: BigradedPage,
                      extensions: Optional[Sequence[ExtensionRule]] = None,
                      window: Optional[Tuple[int, int]] = None) -> AbutmentGroup:
    """Assemble the columns of a collapsed page into degreewise groups.

    Within a column the cells are totally ordered by filtration; with no
    extension rule the column is the direct sum of its cells, and each
    ``ext low high m`` rule glues the named low summand under the named
    high summand one row up (per periodic copy, on a wrapped page).  The
    window defaults to the explicit support hull, or to columns -200..0 on
    a periodically wrapped page.
    """
    if extensions is None:
        extensions = page.extensions
    for rule in extensions:
        _check_extension(page, rule)
    for s, t in page.flagged:
        if not page.row(s).at(t).is_trivial:
            raise AmbiguousExtension(
                "cell (s=%d, t=%d) carries an unresolved extension; its "
                "splitting is not trustworthy enough to abut" % (s, t))

    if window is None:
        if page.is_family_page:
            window = (-200, 0)
        else:
            los, his = [], []
            for s, row in page.rows:
                support = _row_base(row).explicit_support()
                if support:
                    los.append(min(support) - s)
                    his.append(max(support) - s)
            window = (min(los), max(his)) if los else (0, 0)
    lo, hi = window

    gen = page.family_gen
    values: Dict[int, MixedGroup] = {}
    provenance: Dict[int, Tuple[Tuple[int, str], ...]] = {}
    merges: Dict[int, Tuple[ExtensionRule, ...]] = {}
    for n in range(lo, hi + 1):
        entries = _column_entries(page, n)
        if not entries:
            continue
        prov = tuple((s, lbl) for s, lbl, _ in entries)
        column_merges: List[ExtensionRule] = []
        finite_order = 1
        all_finite = all(code >= 1 for _, _, code in entries)
        if all_finite:
            for _, _, code in entries:
                finite_order *= page.prime ** code  # type: ignore[operator]

        for rule in extensions:
            v = valuation(rule.multiplier, page.prime)
            js = [0]
            if gen is not None:
                js = sorted({j for s, lbl, _ in entries for j in
                             _matching_copies(lbl, rule.low, gen)})
            for j in js:
                low_l = _wrapped(rule.low, gen, j)
                high_l = _wrapped(rule.high, gen, j)
                li = _find_entry(entries, low_l)
                hi_i = _find_entry(entries, high_l)
                if li is None or hi_i is None:
                    continue
                s_low, _, low_code = entries[li]
                s_high, _, high_code = entries[hi_i]
                if s_high != s_low + 1:
                    continue
                merged = _merge_summands(page.prime, low_l, low_code,  # type: ignore[arg-type]
                                         high_code, v)  # type: ignore[arg-type]
                replacement = [[s_low, lbl, code] for lbl, code in merged]
                for idx in sorted((li, hi_i), reverse=True):
                    entries.pop(idx)
                entries[li:li] = replacement
                column_merges.append(rule)

        group = MixedGroup(page.prime, [(lbl, code) for _, lbl, code in entries])
        if all_finite and group.order() != finite_order:
            raise ArithmeticError(
                "column %d lost mass while assembling: cells multiply to %d "
                "but the abutment has order %d" % (n, finite_order, group.order()))
        if not group.is_trivial:
            values[n] = group
            provenance[n] = prov
            if column_merges:
                merges[n] = tuple(column_merges)
    return AbutmentGroup(page.prime, lo, hi, values, provenance, merges)


def _find_entry(entries: List[List[object]], label: str) -> Optional[int]:
    for i, (_, lbl, _) in enumerate(entries):
        if lbl == label:
            return i
    return None


def _matching_copies(label: str, base_label: str, gen: str) -> List[int]:
    """Copy exponents j with label == base_label/gen^j (j >= 1)."""
    prefix = "%s/%s" % (base_label, gen)
    if label == prefix:
        return [1]
    if label.startswith(prefix + "^"):
        tail = label[len(prefix) + 1:]
        if tail.isdigit():
            return [int(tail)]
    return []
