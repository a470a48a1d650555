"""Degreewise dualisation and the mechanical duality verdict.

Two dualities are implemented degreewise against a graded source:

* the Z_p-linear dual, whose degree ``-t`` part is
  ``Ext(G_{t-1}, Z_p) (+) Hom(G_t, Z_p)`` and which refuses divisible
  input (Ext against Z_p leaves the realm of our group model there);
* the Pontryagin-style dual, whose degree ``-t`` part is
  ``Hom(G_t, Q_p/Z_p)``.

`verify_duality` compares an assembled abutment against a shifted dual
over a window, degree by degree, and renders the verdict both as an
aligned table for humans and as tab-separated text for machines.  The
comparison is up to isomorphism: labels are carried along (marked with a
trailing ``*``) purely for readability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .pgroups import (MixedGroup, ext_to_zp, hom_to_zp, is_isomorphic,
                      pontryagin_dual)
from .gradedmod import GradedGroup, Tail
from .gradedmod.localcoh import STEP
from .gradedmod.presentation import GradedModulePresentation

__all__ = [
    "module_homotopy", "anderson_dual", "brown_comenetz_dual", "shift",
    "DualityRow", "DualityReport", "verify_duality",
]


def module_homotopy(pres: GradedModulePresentation) -> GradedGroup:
    """The module itself as a graded group: zero below the window (the
    modules are connective) and tower-periodic above it, where only the
    infinite families remain."""
    values = {n: pres.slice_group(n) for n in range(pres.lo, pres.hi + 1)}
    return GradedGroup(pres.prime, values, pres.lo, pres.hi,
                       up_tail=Tail(STEP))


def _starred(g: MixedGroup) -> MixedGroup:
    return g.relabel([lbl + "*" for lbl in g.labels()])


class _Dual:
    """Lazy degreewise dual of anything with ``.at(n)``."""

    mode = "?"

    def __init__(self, source):
        self.source = source

    def at(self, n: int) -> MixedGroup:
        raise NotImplementedError


class AndersonDual(_Dual):
    mode = "anderson"

    def at(self, n: int) -> MixedGroup:
        tail = ext_to_zp(self.source.at(-n - 1))
        head = hom_to_zp(self.source.at(-n))
        return _starred(tail.direct_sum(head))


class BrownComenetzDual(_Dual):
    mode = "bc"

    def at(self, n: int) -> MixedGroup:
        return _starred(pontryagin_dual(self.source.at(-n)))


def anderson_dual(source) -> AndersonDual:
    """Degree ``-t`` reads ``Ext(G_{t-1}, Z_p) (+) Hom(G_t, Z_p)``."""
    return AndersonDual(source)


def brown_comenetz_dual(source) -> BrownComenetzDual:
    """Degree ``-t`` reads ``Hom(G_t, Q_p/Z_p)``."""
    return BrownComenetzDual(source)


class _Shifted:
    def __init__(self, inner, offset: int):
        self.inner = inner
        self.offset = offset

    def at(self, n: int) -> MixedGroup:
        return self.inner.at(n - self.offset)


def shift(graded, a: int) -> _Shifted:
    """Suspension by ``a``: the degree-``n`` value of the result is the
    degree-``n - a`` value of the input."""
    return _Shifted(graded, a)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualityRow:
    degree: int
    abutment: MixedGroup
    dual: MixedGroup
    verdict: str  # "iso" or "mismatch"


@dataclass(frozen=True)
class DualityReport:
    mode: str
    shift: int
    window: Tuple[int, int]
    rows: Tuple[DualityRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.verdict == "iso" for row in self.rows)

    def mismatches(self) -> Tuple[int, ...]:
        return tuple(row.degree for row in self.rows if row.verdict != "iso")

    def first_mismatch(self) -> Optional[int]:
        bad = self.mismatches()
        return bad[0] if bad else None

    def table(self, include_trivial: bool = False) -> str:
        """Aligned 'degree | abutment | dual | verdict' text."""
        picked = [row for row in self.rows
                  if include_trivial or not (row.abutment.is_trivial
                                             and row.dual.is_trivial)
                  or row.verdict != "iso"]
        cells = [("degree", "abutment", "dual", "verdict")]
        for row in picked:
            cells.append((str(row.degree), row.abutment.describe(),
                          row.dual.describe(), row.verdict))
        widths = [max(len(line[i]) for line in cells) for i in range(4)]
        lines = [" | ".join(text.ljust(width)
                            for text, width in zip(line, widths)).rstrip()
                 for line in cells]
        lines.insert(1, "-+-".join("-" * w for w in widths))
        verdict = "PASS" if self.passed else "FAIL"
        lines.append("overall: %s (%s dual, shift %d, degrees %d..%d)"
                     % (verdict, self.mode, self.shift, *self.window))
        return "\n".join(lines)

    def tsv(self) -> str:
        """Machine-readable report: a header line then one line per degree."""
        lines = ["# mode=%s\tshift=%d\twindow=%d..%d\tresult=%s"
                 % (self.mode, self.shift, self.window[0], self.window[1],
                    "pass" if self.passed else "fail")]
        for row in self.rows:
            lines.append("%d\t%s\t%s\t%s"
                         % (row.degree, row.abutment.describe(),
                            row.dual.describe(), row.verdict))
        return "\n".join(lines) + "\n"


_DUAL_BUILDERS = {
    "anderson": anderson_dual,
    "bc": brown_comenetz_dual,
}


def verify_duality(abutment, source, mode: str, shift_by: int,
                   window: Tuple[int, int]) -> DualityReport:
    """Compare ``abutment`` with the ``shift_by``-suspension of the chosen
    dual of ``source`` on every degree of ``window`` (inclusive).

    Both arguments only need ``.at(n)``; the abutment must actually cover
    the window (an assembled column object raises outside its own window
    rather than pretending to vanish).
    """
    if mode not in _DUAL_BUILDERS:
        raise ValueError("unknown duality mode %r (expected 'anderson' or 'bc')"
                         % (mode,))
    dual = shift(_DUAL_BUILDERS[mode](source), shift_by)
    lo, hi = window
    if lo > hi:
        raise ValueError("empty verification window [%d, %d]" % (lo, hi))
    rows: List[DualityRow] = []
    for n in range(lo, hi + 1):
        left = abutment.at(n)
        right = dual.at(n)
        verdict = "iso" if is_isomorphic(left, right) else "mismatch"
        rows.append(DualityRow(n, left, right, verdict))
    return DualityReport(mode, shift_by, window, tuple(rows))
