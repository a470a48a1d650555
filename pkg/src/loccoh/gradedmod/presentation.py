"""Finite presentations of graded modules over a p-local polynomial ring.

A module is described by a finite list of generators, each either a *tower*
generator (free over the degree-8 polynomial operator B, so it contributes a
basis slot in every eighth degree at and above its birth degree) or a
*single* generator (one slot in its own degree).  The degreewise slice in
degree n is the direct sum of the slots alive there; the operator B acts by
a matrix per degree, defaulting to "shift towers up, kill singles" with
whole-matrix overrides where the action is anything else.

Degreewise operators of degree 1 and 3 (eta and nu) are derived
syntactically: a slot whose label is a product monomial maps to the slot
labelled by the same monomial times the operator, when such a slot exists in
the right degree.  Recorded exceptions are stored as override matrices, the
same way as for B.

The text format round-trips through :func:`parse_presentation` and
:func:`serialize_presentation`::

    # comment
    prime 2
    window 0 28
    stability 12
    period B 8
    gen 1 0 inf tower
    gen eta 1 2 tower
    ...
    assumed B kappa
    action B 24
    1 0
    0 8

All ``gen`` lines must precede all ``action`` blocks.  An ``action`` block
spells the complete matrix from the slice at its degree to the slice eight
(for B), one (eta) or three (nu) degrees up: one line per target slot, one
integer column per source slot.  Orders in ``gen`` lines are written as the
actual cyclic order (a power of the prime) or ``inf``.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..pgroups import FREE, GroupMorphism, MixedGroup, valuation
from .graded import GradedGroup, Tail, join_label

OPERATOR_SHIFTS = {"B": 8, "eta": 1, "nu": 3, "two": 0}
_OPERATOR_ORDER = {"B": 0, "eta": 1, "nu": 2}


class ParseError(ValueError):
    """A syntax or consistency error in a presentation file."""

    def __init__(self, line_no: int, message: str):
        super().__init__("line %d: %s" % (line_no, message))
        self.line_no = line_no
        self.message = message


@dataclass(frozen=True)
class Generator:
    label: str
    degree: int
    exponent: Optional[int]  # None for an infinite cyclic generator
    tower: bool
    assumed: bool = False  # B-action transcribed as zero without a source

    @property
    def code(self) -> int:
        return FREE if self.exponent is None else self.exponent


def _order_text(gen: Generator, prime: int) -> str:
    return "inf" if gen.exponent is None else str(prime ** gen.exponent)


def label_factors(label: str) -> Tuple[str, ...]:
    """The sorted factor multiset of a product-monomial label."""
    bag: Counter = Counter()
    for token in label.split("*"):
        if token == "1":
            continue
        if "^" in token:
            name, _, power = token.rpartition("^")
            bag[name] += int(power)
        else:
            bag[token] += 1
    return tuple(sorted(bag.elements()))


class OperatorAction:
    """Degreewise matrices of one operator on a presentation."""

    def __init__(self, presentation: "GradedModulePresentation", name: str):
        if name not in OPERATOR_SHIFTS:
            raise ValueError("unknown operator %r" % name)
        self.presentation = presentation
        self.name = name
        self.shift = OPERATOR_SHIFTS[name]

    def matrix(self, degree: int) -> List[List[int]]:
        return self.presentation.operator_rows(self.name, degree)

    def morphism(self, degree: int) -> GroupMorphism:
        return self.presentation.operator_morphism(self.name, degree)


class GradedModulePresentation:
    """A graded module given by generators and degreewise operator matrices."""

    def __init__(
        self,
        prime: int,
        window: Tuple[int, int],
        stability_degree: int,
        generators: Sequence[Generator],
        overrides: Optional[Dict[str, Dict[int, Tuple[Tuple[int, ...], ...]]]] = None,
        period_hint: Optional[Tuple[str, int]] = None,
        name: str = "",
    ):
        self.prime = prime
        self.lo, self.hi = window
        if self.lo > self.hi:
            raise ValueError("empty window")
        self.stability_degree = stability_degree
        self.generators = tuple(generators)
        self.period_hint = period_hint
        self.name = name
        self.overrides = {
            op: {deg: tuple(tuple(row) for row in mat) for deg, mat in blocks.items()}
            for op, blocks in (overrides or {}).items()
        }
        seen = set()
        for g in self.generators:
            if g.label in seen:
                raise ValueError("duplicate generator label %r" % g.label)
            seen.add(g.label)
            if not (self.lo <= g.degree <= self.hi):
                raise ValueError("generator %s born at %d, outside window [%d, %d]"
                                 % (g.label, g.degree, self.lo, self.hi))
            if g.exponent is not None and g.exponent < 1:
                raise ValueError("generator %s has non-positive torsion exponent" % g.label)
        if period_hint is not None and any(g.label == period_hint[0] for g in self.generators):
            raise ValueError("period generator %r collides with a module generator"
                             % period_hint[0])
        for op in self.overrides:
            if op not in ("B", "eta", "nu"):
                raise ValueError("overrides not supported for operator %r" % op)
        self._basis_cache: Dict[int, Tuple[Tuple[int, int], ...]] = {}
        self._slice_cache: Dict[int, MixedGroup] = {}
        self._factor_index = None

    # ---- slices ----------------------------------------------------------

    def slice_basis(self, n: int) -> Tuple[Tuple[int, int], ...]:
        """Slots alive in degree n, as (generator index, B-exponent) pairs."""
        cached = self._basis_cache.get(n)
        if cached is not None:
            return cached
        slots = []
        for i, g in enumerate(self.generators):
            if g.tower:
                if n >= g.degree and (n - g.degree) % 8 == 0:
                    slots.append((i, (n - g.degree) // 8))
            elif n == g.degree:
                slots.append((i, 0))
        result = tuple(slots)
        self._basis_cache[n] = result
        return result

    def slot_labels(self, n: int) -> List[str]:
        return [join_label(self.generators[i].label, e) for i, e in self.slice_basis(n)]

    def slice_group(self, n: int) -> MixedGroup:
        if not (self.lo <= n <= self.hi):
            raise ValueError("degree %d outside window [%d, %d]" % (n, self.lo, self.hi))
        cached = self._slice_cache.get(n)
        if cached is None:
            summands = [
                (join_label(self.generators[i].label, e), self.generators[i].code)
                for i, e in self.slice_basis(n)
            ]
            cached = MixedGroup(self.prime, summands)
            self._slice_cache[n] = cached
        return cached

    # ---- operator matrices ----------------------------------------------

    def _default_b_rows(self, n: int) -> List[List[int]]:
        source = self.slice_basis(n)
        target = self.slice_basis(n + 8)
        index = {slot: row for row, slot in enumerate(target)}
        rows = [[0] * len(source) for _ in target]
        for col, (i, e) in enumerate(source):
            if self.generators[i].tower:
                rows[index[(i, e + 1)]][col] = 1
        return rows

    def _syntactic_rows(self, op: str, n: int) -> List[List[int]]:
        source = self.slot_labels(n)
        target = self.slot_labels(n + OPERATOR_SHIFTS[op])
        index = {}
        for row, label in enumerate(target):
            index.setdefault(label_factors(label), row)
        rows = [[0] * len(source) for _ in target]
        for col, label in enumerate(source):
            want = tuple(sorted(label_factors(label) + (op,)))
            row = index.get(want)
            if row is not None:
                rows[row][col] = 1
        return rows

    def operator_rows(self, op: str, n: int) -> List[List[int]]:
        if op == "two":
            k = len(self.slice_basis(n))
            return [[self.prime if i == j else 0 for j in range(k)] for i in range(k)]
        block = self.overrides.get(op, {}).get(n)
        if block is not None:
            return [list(row) for row in block]
        if op == "B":
            return self._default_b_rows(n)
        return self._syntactic_rows(op, n)

    def operator_morphism(self, op: str, n: int) -> GroupMorphism:
        shift = OPERATOR_SHIFTS[op]
        return GroupMorphism(self.slice_group(n), self.slice_group(n + shift),
                             self.operator_rows(op, n))

    def b_morphism(self, n: int) -> GroupMorphism:
        return self.operator_morphism("B", n)

    def operator(self, name: str) -> OperatorAction:
        return OperatorAction(self, name)

    # ---- derived views ----------------------------------------------------

    def as_graded_group(self) -> GradedGroup:
        """The underlying graded group; B-periodic above the window top."""
        values = {n: self.slice_group(n) for n in range(self.lo, self.hi + 1)}
        return GradedGroup(self.prime, values, self.lo, self.hi, up_tail=Tail(8))

    def torsion_sub_presentation(self) -> "GradedModulePresentation":
        """The sub-presentation on the torsion generators.

        The p-power torsion of every slice is spanned by the torsion slots
        (well-definedness forces operator entries out of a torsion slot into
        a free slot to vanish), so restricting rows and columns to torsion
        slots is the honest induced action.
        """
        keep = [i for i, g in enumerate(self.generators) if g.exponent is not None]
        pos = {i: k for k, i in enumerate(keep)}
        gens = [self.generators[i] for i in keep]
        overrides: Dict[str, Dict[int, Tuple[Tuple[int, ...], ...]]] = {}
        for op, blocks in self.overrides.items():
            shift = OPERATOR_SHIFTS[op]
            for deg, mat in blocks.items():
                src = self.slice_basis(deg)
                tgt = self.slice_basis(deg + shift)
                cols = [c for c, (i, _) in enumerate(src) if i in pos]
                rows = [r for r, (i, _) in enumerate(tgt) if i in pos]
                if not cols or not rows:
                    continue
                sub = tuple(tuple(mat[r][c] for c in cols) for r in rows)
                overrides.setdefault(op, {})[deg] = sub
        return GradedModulePresentation(
            self.prime, (self.lo, self.hi), self.stability_degree, gens,
            overrides=overrides, period_hint=self.period_hint,
            name=self.name + ".torsion" if self.name else "",
        )

    def __eq__(self, other):
        if not isinstance(other, GradedModulePresentation):
            return NotImplemented
        return (
            self.prime == other.prime
            and (self.lo, self.hi) == (other.lo, other.hi)
            and self.stability_degree == other.stability_degree
            and self.period_hint == other.period_hint
            and self.generators == other.generators
            and self.overrides == other.overrides
        )

    def __repr__(self):
        return "GradedModulePresentation(%s, p=%d, window=[%d,%d], %d generators)" % (
            self.name or "<anonymous>", self.prime, self.lo, self.hi, len(self.generators))


# ---- validation -----------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    problems: List[Tuple[Optional[int], str]] = field(default_factory=list)

    def degrees(self) -> List[int]:
        return sorted({d for d, _ in self.problems if d is not None})

    def __str__(self):
        if self.ok:
            return "presentation valid"
        lines = ["presentation INVALID (%d problems)" % len(self.problems)]
        for deg, msg in self.problems:
            where = "degree %d" % deg if deg is not None else "global"
            lines.append("  [%s] %s" % (where, msg))
        return "\n".join(lines)


def _zero_columns(morphism: GroupMorphism) -> List[int]:
    reduced = morphism.matrix
    cols = len(morphism.domain.summands)
    return [j for j in range(cols)
            if all(row[j] == 0 for row in reduced)]


def _unreached_rows(morphism: GroupMorphism, prime: int) -> List[int]:
    rows = morphism.matrix
    out = []
    for i, row in enumerate(rows):
        if all(entry % prime == 0 for entry in row):
            out.append(i)
    return out


def validate_presentation(pres: GradedModulePresentation) -> ValidationReport:
    """Structural and stability checks; reports every failing degree."""
    from ..pgroups import is_bijective

    problems: List[Tuple[Optional[int], str]] = []
    if pres.hi < pres.stability_degree + 8:
        problems.append((None, "window top %d leaves no room above the stability degree %d"
                         % (pres.hi, pres.stability_degree)))
    for g in pres.generators:
        if not g.tower and not g.assumed:
            has_block = g.degree in pres.overrides.get("B", {})
            # When the target slice is empty (or falls outside the window)
            # the action is forced to vanish, so no statement is owed.
            forced = (g.degree + 8 > pres.hi
                      or not pres.slice_basis(g.degree + 8))
            if not has_block and not forced:
                problems.append((g.degree, "single generator %s has neither a stated "
                                 "nor an assumed B-action" % g.label))
    # well-definedness of every stored or derived matrix in range
    for op in ("B", "eta", "nu"):
        shift = OPERATOR_SHIFTS[op]
        known = set(pres.overrides.get(op, {}))
        degrees = (range(pres.lo, pres.hi - shift + 1) if op == "B"
                   else sorted(known))
        for n in degrees:
            if n + shift > pres.hi:
                problems.append((n, "%s-action block at %d runs past the window" % (op, n)))
                continue
            try:
                pres.operator_morphism(op, n)
            except ValueError as exc:
                problems.append((n, "%s-action at %d ill-defined: %s" % (op, n, exc)))
    # stability: B must be one-to-one and onto from the stability degree up
    lo = max(pres.stability_degree, pres.lo)
    for n in range(lo, pres.hi - 8 + 1):
        try:
            f = pres.b_morphism(n)
        except ValueError:
            continue  # already reported above
        if is_bijective(f):
            continue
        src_labels = pres.slot_labels(n)
        tgt_labels = pres.slot_labels(n + 8)
        killed = [src_labels[j] for j in _zero_columns(f)]
        if killed:
            problems.append((n, "B is not injective on degree %d: kills %s"
                             % (n, ", ".join(killed))))
        missed = [tgt_labels[i] for i in _unreached_rows(f, pres.prime)]
        if missed:
            problems.append((n + 8, "B onto degree %d misses new generator(s) %s"
                             % (n + 8, ", ".join(missed))))
        if not killed and not missed:
            problems.append((n, "B is not bijective from degree %d to %d" % (n, n + 8)))
    return ValidationReport(ok=not problems, problems=problems)


# ---- text format ----------------------------------------------------------


def serialize_presentation(pres: GradedModulePresentation) -> str:
    lines = []
    if pres.name:
        lines.append("# %s" % pres.name)
    lines.append("prime %d" % pres.prime)
    lines.append("window %d %d" % (pres.lo, pres.hi))
    lines.append("stability %d" % pres.stability_degree)
    if pres.period_hint is not None:
        lines.append("period %s %d" % pres.period_hint)
    lines.append("")
    for g in pres.generators:
        lines.append("gen %s %d %s %s" % (g.label, g.degree, _order_text(g, pres.prime),
                                          "tower" if g.tower else "single"))
    assumed = [g.label for g in pres.generators if g.assumed]
    if assumed:
        lines.append("")
        for label in assumed:
            lines.append("assumed B %s" % label)
    for op in sorted(pres.overrides, key=_OPERATOR_ORDER.get):
        for deg in sorted(pres.overrides[op]):
            lines.append("")
            lines.append("action %s %d" % (op, deg))
            for row in pres.overrides[op][deg]:
                lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_presentation(text: str, name: str = "") -> GradedModulePresentation:
    prime = None
    window = None
    stability = None
    period_hint = None
    generators: List[Generator] = []
    assumed_labels: List[Tuple[int, str]] = []
    overrides: Dict[str, Dict[int, List[List[int]]]] = {}
    gen_index: Dict[str, int] = {}
    actions_started = False

    pending = None  # (op, degree, rows wanted, collected rows, header line no)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if pending is not None:
            op, degree, want, rows, header_line = pending
            try:
                rows.append([int(tok) for tok in parts])
            except ValueError:
                raise ParseError(line_no, "expected a matrix row (integers), got %r" % raw.strip())
            if len(rows) == want:
                overrides.setdefault(op, {})[degree] = rows
                pending = None
            else:
                pending = (op, degree, want, rows, header_line)
            continue
        key = parts[0]
        if key == "prime":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(line_no, "usage: prime <p>")
            prime = int(parts[1])
            if prime < 2:
                raise ParseError(line_no, "prime must be at least 2")
        elif key == "window":
            if len(parts) != 3:
                raise ParseError(line_no, "usage: window <lo> <hi>")
            window = (int(parts[1]), int(parts[2]))
            if window[0] > window[1]:
                raise ParseError(line_no, "window is empty")
        elif key == "stability":
            if len(parts) != 2:
                raise ParseError(line_no, "usage: stability <degree>")
            stability = int(parts[1])
        elif key == "period":
            if len(parts) != 3:
                raise ParseError(line_no, "usage: period <label> <degree>")
            period_hint = (parts[1], int(parts[2]))
        elif key == "gen":
            if actions_started:
                raise ParseError(line_no, "gen lines must precede action blocks")
            if len(parts) != 5:
                raise ParseError(line_no, "usage: gen <label> <degree> <order|inf> <tower|single>")
            if prime is None or window is None:
                raise ParseError(line_no, "gen before prime/window header")
            label, degree_s, order_s, kind = parts[1:]
            degree = int(degree_s)
            if not (window[0] <= degree <= window[1]):
                raise ParseError(line_no, "generator %s born at %d, outside window [%d, %d]"
                                 % (label, degree, window[0], window[1]))
            if order_s == "inf":
                exponent = None
            else:
                order = int(order_s)
                exponent = valuation(order, prime)
                if order != prime ** exponent or exponent < 1:
                    raise ParseError(line_no, "order %s is not a positive power of %d"
                                     % (order_s, prime))
            if kind not in ("tower", "single"):
                raise ParseError(line_no, "generator kind must be 'tower' or 'single'")
            if label in gen_index:
                raise ParseError(line_no, "duplicate generator label %r" % label)
            gen_index[label] = len(generators)
            generators.append(Generator(label, degree, exponent, kind == "tower"))
        elif key == "assumed":
            if len(parts) != 3 or parts[1] != "B":
                raise ParseError(line_no, "usage: assumed B <label>")
            if parts[2] not in gen_index:
                raise ParseError(line_no, "assumed marker for unknown generator %r" % parts[2])
            assumed_labels.append((line_no, parts[2]))
        elif key == "action":
            actions_started = True
            if len(parts) != 3 or parts[1] not in ("B", "eta", "nu"):
                raise ParseError(line_no, "usage: action <B|eta|nu> <from-degree>")
            if prime is None or window is None or stability is None:
                raise ParseError(line_no, "action before complete header")
            op = parts[1]
            degree = int(parts[2])
            shift = OPERATOR_SHIFTS[op]
            if not (window[0] <= degree and degree + shift <= window[1]):
                raise ParseError(line_no, "action block at %d does not fit in the window" % degree)
            probe = GradedModulePresentation(prime, window, stability, generators)
            want = len(probe.slice_basis(degree + shift))
            ncols = len(probe.slice_basis(degree))
            if want == 0 or ncols == 0:
                raise ParseError(line_no, "action block at %d has an empty slice" % degree)
            if degree in overrides.get(op, {}):
                raise ParseError(line_no, "duplicate action block for %s at %d" % (op, degree))
            pending = (op, degree, want, [], line_no)
        else:
            raise ParseError(line_no, "unknown directive %r" % key)

    if pending is not None:
        raise ParseError(pending[4], "action block at %d is missing matrix rows" % pending[1])
    if prime is None or window is None or stability is None:
        raise ParseError(0, "missing prime/window/stability header")
    for line_no, label in assumed_labels:
        i = gen_index[label]
        g = generators[i]
        if g.tower:
            raise ParseError(line_no, "assumed marker on tower generator %r" % label)
        generators[i] = Generator(g.label, g.degree, g.exponent, g.tower, assumed=True)
    pres = GradedModulePresentation(
        prime, window, stability, generators,
        overrides={op: {d: tuple(tuple(r) for r in m) for d, m in blocks.items()}
                   for op, blocks in overrides.items()},
        period_hint=period_hint, name=name,
    )
    # shape-check every override now so errors carry the file context
    for op, blocks in pres.overrides.items():
        shift = OPERATOR_SHIFTS[op]
        for deg, mat in blocks.items():
            ncols = len(pres.slice_basis(deg))
            if any(len(row) != ncols for row in mat):
                raise ParseError(0, "action %s %d: expected %d columns" % (op, deg, ncols))
    return pres
