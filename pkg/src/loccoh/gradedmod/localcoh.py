"""Torsion, localisation and quotient functors along the polynomial operator.

Everything here works degreewise from a presentation.  The engine exploits
the stability degree T: above T the operator B acts bijectively, so for a
degree n the infinite colimit inverting B is computed by the single honest
slice at the first degree n + 8K that is >= T ("the stable slice"), and the
B-power-torsion subgroup is the kernel of the composite map into it.

Generator-level labels survive every step.  The stable slice's slots are
relabelled to their degree-n names by dividing by B^K, kernels are labelled
by the slots they are spanned by (with an anonymous fallback when a kernel
fails to be a span of slots, which never happens for the shipped data), and
cokernel summands are labelled by matching projection columns to the slots
that generate them.

The two-generator ideal (p, B) is handled by interleaving the one-generator
functors in both orders.  The middle cohomology is reported as an
:class:`ExtensionRecord` holding both short exact sequence decompositions;
it resolves degreewise whenever either end vanishes, which covers every
degree of the shipped datasets, and cross-checks the two orders against
each other wherever both resolve.
"""

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..pgroups import (
    DIVISIBLE,
    FREE,
    GroupMorphism,
    MixedGroup,
    cokernel,
    image_invariants,
    is_isomorphic,
    kernel,
    smith_normal_form,
    valuation,
)
from .graded import GradedGroup, Tail, gamma_p, mod_p_infty, shift_label
from .presentation import GradedModulePresentation

STEP = 8


class StabilityError(ValueError):
    """The window is too small to reach the stable range."""


def _iterates_to_stability(pres: GradedModulePresentation, n: int, power: int) -> int:
    """Minimal K >= 0 with n + 8*power*K at or above the stability degree."""
    step = STEP * power
    if n >= pres.stability_degree:
        return 0
    return -((n - pres.stability_degree) // step)


def composite_b_power(
    pres: GradedModulePresentation, n: int, power: int = 1, extra_iterates: int = 0
) -> Tuple[GroupMorphism, int]:
    """The map B^(power*K): M_n -> M_(n + 8*power*K) into the stable range.

    Returns the composite morphism together with K (the number of times the
    ideal generator B^power was applied).  ``extra_iterates`` pushes K past
    the minimum; results must not depend on it.
    """
    k = _iterates_to_stability(pres, n, power) + extra_iterates
    length = power * k
    top = n + STEP * length
    if top > pres.hi:
        raise StabilityError(
            "stable slice for degree %d needs degree %d, beyond the window top %d"
            % (n, top, pres.hi))
    f = GroupMorphism.identity(pres.slice_group(n))
    for i in range(length):
        f = pres.b_morphism(n + STEP * i).compose(f)
    return f, k


def _slots_subgroup(group: MixedGroup, indices: Sequence[int]) -> MixedGroup:
    return MixedGroup(group.prime, [group.summands[i] for i in indices])


def _dead_slot_indices(f: GroupMorphism) -> List[int]:
    cols = len(f.domain.summands)
    return [j for j in range(cols) if all(row[j] == 0 for row in f.matrix)]


def gamma_x(pres: GradedModulePresentation, power: int = 1,
            extra_iterates: int = 0) -> GradedGroup:
    """The subgroup of everything killed by a power of B^power, degreewise.

    The result is supported on the window (it vanishes above the stability
    degree and the module vanishes outside the window), so no tails.
    """
    values: Dict[int, MixedGroup] = {}
    for n in range(pres.lo, pres.hi + 1):
        if n >= pres.stability_degree:
            continue
        f, _ = composite_b_power(pres, n, power, extra_iterates)
        dead = _dead_slot_indices(f)
        ker_group, _incl = kernel(f)
        candidate = _slots_subgroup(pres.slice_group(n), dead)
        if candidate.invariants() == ker_group.invariants():
            values[n] = candidate.canonical()
        else:
            values[n] = ker_group  # anonymous labels; not hit by shipped data
    return GradedGroup(pres.prime, values, pres.lo, pres.hi)


def _stable_slice(pres: GradedModulePresentation, n: int, power: int,
                  extra_iterates: int = 0) -> Tuple[MixedGroup, int]:
    """The stable slice for degree n, relabelled to degree-n exponents."""
    k = _iterates_to_stability(pres, n, power) + extra_iterates
    top = n + STEP * power * k
    if top > pres.hi:
        raise StabilityError(
            "stable slice for degree %d needs degree %d, beyond the window top %d"
            % (n, top, pres.hi))
    stable = pres.slice_group(top)
    shifted = stable.relabel([shift_label(l, -power * k) for l in stable.labels()])
    return shifted, k


def localize_x(pres: GradedModulePresentation, power: int = 1) -> GradedGroup:
    """The module with B^power inverted; periodic in both directions."""
    values = {n: _stable_slice(pres, n, power)[0] for n in range(pres.lo, pres.hi + 1)}
    return GradedGroup(pres.prime, values, pres.lo, pres.hi,
                       down_tail=Tail(STEP), up_tail=Tail(STEP))


def gamma_map(pres: GradedModulePresentation, n: int, power: int = 1,
              extra_iterates: int = 0) -> GroupMorphism:
    """The canonical map from the degree-n slice to the localised value."""
    f, k = composite_b_power(pres, n, power, extra_iterates)
    target, _ = _stable_slice(pres, n, power, extra_iterates)
    return GroupMorphism(f.domain, target, f.matrix, check=False)


def _match_cokernel_labels(coker: MixedGroup, proj: GroupMorphism) -> MixedGroup:
    """Label cokernel summands by the localised slots that generate them.

    A slot whose projection column hits a single summand by a p-adic unit is
    that summand's generator.  Unmatched summands keep anonymous labels.
    """
    p = coker.prime
    source_labels = proj.domain.labels()
    matrix = proj.matrix
    claimed: Dict[int, int] = {}
    for row in range(len(coker.summands)):
        units = [j for j in range(len(source_labels))
                 if matrix[row][j] != 0 and matrix[row][j] % p != 0]
        if len(units) == 1 and units[0] not in claimed.values():
            claimed[row] = units[0]
    labels = [source_labels[claimed[i]] if i in claimed else lbl
              for i, lbl in enumerate(coker.labels())]
    return coker.relabel(labels)


def mod_x_infty(pres: GradedModulePresentation, power: int = 1) -> GradedGroup:
    """The cokernel of the localisation map, degreewise.

    Nonzero only below the stability degree; below the window it repeats the
    full localised pattern with period 8, which the explicit block
    [lo - 8*power, lo) pins down.
    """
    values: Dict[int, MixedGroup] = {}
    for n in range(pres.lo - STEP * power, pres.lo):
        values[n] = _tail_slice(pres, n, power)
    for n in range(pres.lo, pres.hi + 1):
        if n >= pres.stability_degree:
            continue
        g = gamma_map(pres, n, power)
        coker, proj = cokernel(g)
        if not coker.is_trivial:
            values[n] = _match_cokernel_labels(coker, proj)
    return GradedGroup(pres.prime, values, pres.lo - STEP * power, pres.hi,
                       down_tail=Tail(STEP))


def _tail_slice(pres: GradedModulePresentation, n: int, power: int) -> MixedGroup:
    """Localised value at a degree below the window (where the module is 0)."""
    period = STEP
    rep = pres.lo + ((n - pres.lo) % period)
    k = (rep - n) // period
    stable, _ = _stable_slice(pres, rep, power)
    return stable.relabel([shift_label(l, -k) for l in stable.labels()])


# ---- one-generator bundle ---------------------------------------------------


@dataclass
class LocalCohomologyOne:
    """H^0 and H^1 for the one-generator ideal, with the localisation."""
    prime: int
    power: int
    h0: GradedGroup
    h1: GradedGroup
    localized: GradedGroup
    checked_degrees: int = 0


def _exactness_check(pres: GradedModulePresentation, n: int, power: int) -> None:
    """Two independent routes to the image of the localisation map."""
    g = gamma_map(pres, n, power)
    via_domain = image_invariants(g)
    coker, proj = cokernel(g)
    img, _ = kernel(proj)
    if via_domain != img.invariants():
        raise ArithmeticError(
            "exactness bookkeeping failed at degree %d: image %r vs kernel-of-projection %r"
            % (n, via_domain, img.invariants()))
    rank_domain = g.domain.free_rank
    rank_ker = kernel(g)[0].free_rank
    rank_img = via_domain[0]
    if rank_domain != rank_ker + rank_img:
        raise ArithmeticError("free rank bookkeeping failed at degree %d" % n)


def local_cohomology_one(pres: GradedModulePresentation, power: int = 1,
                         check: bool = True) -> LocalCohomologyOne:
    h0 = gamma_x(pres, power)
    h1 = mod_x_infty(pres, power)
    loc = localize_x(pres, power)
    checked = 0
    if check:
        for n in range(pres.lo, min(pres.stability_degree, pres.hi) + 1):
            if n + STEP * power * _iterates_to_stability(pres, n, power) > pres.hi:
                continue
            _exactness_check(pres, n, power)
            checked += 1
    return LocalCohomologyOne(pres.prime, power, h0, h1, loc, checked)


# ---- divisible-side functors ------------------------------------------------


def _free_slot_indices(group: MixedGroup) -> List[int]:
    return [i for i, (_, code) in enumerate(group.summands) if code == FREE]


def _free_block(pres: GradedModulePresentation, n: int, power: int):
    """The composite B-power matrix restricted to free slots.

    Returns (rows, cols, matrix, K): row/col indices into the source and
    stable slices, the integer matrix between the free parts, and the number
    of B^power iterates.  This is the honest action on M/p^infinity, whose
    degree-n value is a divisible summand per free slot.
    """
    f, k = composite_b_power(pres, n, power)
    src = _free_slot_indices(f.domain)
    tgt = _free_slot_indices(f.codomain)
    mat = [[f.matrix[i][j] for j in src] for i in tgt]
    return src, tgt, mat, k


def gamma_x_divisible(pres: GradedModulePresentation, power: int = 1) -> GradedGroup:
    """B-power torsion of M/p^infinity, computed on free-slot coordinates.

    The kernel of an integer matrix F acting on (Q_p/Z_p)^cols is read off
    the Smith form: each nonzero diagonal entry d contributes a cyclic group
    of order the p-part of d, and each zero column contributes a divisible
    summand.
    """
    p = pres.prime
    values: Dict[int, MixedGroup] = {}
    for n in range(pres.lo, pres.hi + 1):
        if n >= pres.stability_degree:
            continue
        src, _tgt, mat, k = _free_block(pres, n, power)
        if not src:
            continue
        source = pres.slice_group(n)
        src_labels = [source.labels()[j] for j in src]
        if not mat or not any(any(row) for row in mat):
            # zero map: everything divisible survives
            values[n] = MixedGroup(p, [(l, DIVISIBLE) for l in src_labels])
            continue
        snf = smith_normal_form(mat)
        summands: List[Tuple[str, int]] = []
        for i in range(len(src)):
            d = snf.d[i][i] if i < len(snf.d) and i < len(snf.d[i]) else 0
            col = [snf.v[r][i] for r in range(len(src))]
            slot = _unit_column_slot(col, p)
            label = src_labels[slot] if slot is not None else "k%d" % i
            if d == 0:
                summands.append((label, DIVISIBLE))
            else:
                v = valuation(d, p)
                if v > 0:
                    if slot is not None:
                        better = _b_image_label(pres, n, power, src[slot], d)
                        if better is not None:
                            label = better
                    summands.append((label, v))
        if summands:
            values[n] = MixedGroup(p, summands).canonical()
    return GradedGroup(pres.prime, values, pres.lo, pres.hi)


def _unit_column_slot(column: List[int], p: int) -> Optional[int]:
    hits = [r for r, entry in enumerate(column) if entry % p != 0]
    nonzero = [r for r, entry in enumerate(column) if entry != 0]
    if len(hits) == 1 and len(nonzero) == 1:
        return hits[0]
    return None


def _b_image_label(pres: GradedModulePresentation, n: int, power: int,
                   col: int, d: int) -> Optional[str]:
    """Name the order-d class (1/d) * slot by its one-step image over B^power.

    When B^power carries the slot onto d times a single free slot one step
    up, the class is that image divided by one step (e.g. the order-8 kernel
    class over a slot mapping to 8 times a tower slot t is t/B).  Any other
    shape keeps the slot's own name.
    """
    if n + STEP * power > pres.hi:
        return None
    f = GroupMorphism.identity(pres.slice_group(n))
    for i in range(power):
        f = pres.b_morphism(n + STEP * i).compose(f)
    hits = [r for r in range(len(f.matrix)) if f.matrix[r][col] != 0]
    if len(hits) != 1:
        return None
    row = hits[0]
    if f.codomain.summands[row][1] != FREE:
        return None
    if valuation(f.matrix[row][col], pres.prime) != valuation(d, pres.prime):
        return None
    return shift_label(f.codomain.labels()[row], -power)


def mod_x_infty_divisible(pres: GradedModulePresentation, power: int = 1) -> GradedGroup:
    """(M/p^infinity)/B^infinity: the divisible cokernel of the free block."""
    p = pres.prime
    values: Dict[int, MixedGroup] = {}
    lo = pres.lo - STEP * power
    for n in range(lo, pres.hi + 1):
        if n >= pres.stability_degree:
            continue
        if n < pres.lo:
            stable = _tail_slice(pres, n, power)
            labels = [l for l, code in stable.summands if code == FREE]
            if labels:
                values[n] = MixedGroup(p, [(l, DIVISIBLE) for l in labels])
            continue
        src, tgt, mat, _k = _free_block(pres, n, power)
        stable, _ = _stable_slice(pres, n, power)
        tgt_labels = [stable.labels()[i] for i in tgt]
        if not tgt:
            continue
        if not src:
            rank = 0
            u = None
        else:
            snf = smith_normal_form(mat)
            rank = snf.rank
            u = snf.u
        free_left = len(tgt) - rank
        if free_left <= 0:
            continue
        summands = []
        for i in range(rank, len(tgt)):
            if u is None:
                label = tgt_labels[i]
            else:
                row = [u[i][c] for c in range(len(tgt))]
                label = _unit_row_label(row, tgt_labels, p) or "q%d" % i
            summands.append((label, DIVISIBLE))
        values[n] = MixedGroup(p, summands)
    return GradedGroup(pres.prime, values, lo, pres.hi, down_tail=Tail(STEP))


def _unit_row_label(row: List[int], labels: List[str], p: int) -> Optional[str]:
    hits = [c for c, entry in enumerate(row) if entry % p != 0]
    if len(hits) == 1:
        return labels[hits[0]]
    return None


# ---- two-generator ideal ----------------------------------------------------


class AmbiguousExtension(ArithmeticError):
    """Neither short exact sequence resolves at some degree."""


class ExtensionRecord:
    """Both SES decompositions of the middle local cohomology.

    Order (p, B):  0 -> (Gamma_B M)/p^inf -> H^1 -> Gamma_p(M/B^inf) -> 0.
    Order (B, p):  0 -> (Gamma_p M)/B^inf -> H^1 -> Gamma_B(M/p^inf) -> 0.

    A degree resolves in a given order when either end vanishes there.  When
    both orders resolve they must agree up to isomorphism; the p-first
    labels win because they track the named module generators.
    """

    def __init__(self, prime: int,
                 p_first: Tuple[GradedGroup, GradedGroup],
                 b_first: Tuple[GradedGroup, GradedGroup]):
        self.prime = prime
        self.p_first = p_first
        self.b_first = b_first

    def _candidates(self, n: int) -> List[MixedGroup]:
        out = []
        for left, right in (self.p_first, self.b_first):
            l, r = left.at(n), right.at(n)
            if l.is_trivial:
                out.append(r)
            elif r.is_trivial:
                out.append(l)
        return out

    def resolve_at(self, n: int) -> Optional[MixedGroup]:
        cands = self._candidates(n)
        if not cands:
            return None
        if len(cands) == 2 and not is_isomorphic(cands[0], cands[1]):
            raise ArithmeticError(
                "the two composition orders disagree at degree %d: %s vs %s"
                % (n, cands[0].describe(), cands[1].describe()))
        return cands[0]

    def ambiguous_degrees(self, lo: int, hi: int) -> List[int]:
        return [n for n in range(lo, hi + 1) if self._is_ambiguous(n)]

    def _is_ambiguous(self, n: int) -> bool:
        return not self._candidates(n)

    def window(self) -> Tuple[int, int]:
        ends = [self.p_first[0], self.p_first[1], self.b_first[0], self.b_first[1]]
        return min(e.lo for e in ends), max(e.hi for e in ends)

    def resolved(self) -> GradedGroup:
        lo, hi = self.window()
        values = {}
        bad = []
        for n in range(lo, hi + 1):
            g = self.resolve_at(n)
            if g is None:
                bad.append(n)
            elif not g.is_trivial:
                values[n] = g
        if bad:
            raise AmbiguousExtension(
                "extension unresolved at degrees %s" % ", ".join(map(str, bad)))
        return GradedGroup(self.prime, values, lo, hi, down_tail=Tail(STEP))


@dataclass
class LocalCohomologyTwo:
    """All three local cohomology groups for the ideal (p, B)."""
    prime: int
    h0: GradedGroup
    h1: ExtensionRecord
    h2: GradedGroup
    symmetry_mismatches: Dict[str, List[int]] = field(default_factory=dict)

    def h1_resolved(self) -> GradedGroup:
        return self.h1.resolved()


def _degreewise_mismatches(a: GradedGroup, b: GradedGroup, lo: int, hi: int) -> List[int]:
    return [n for n in range(lo, hi + 1)
            if a.at(n).invariants() != b.at(n).invariants()]


def local_cohomology_two(pres: GradedModulePresentation,
                         strict: bool = True) -> LocalCohomologyTwo:
    """Local cohomology for the two-generator ideal (p, B).

    Every corner is computed along both composition orders and the orders
    are cross-checked degreewise; with ``strict`` a mismatch raises.
    """
    torsion = pres.torsion_sub_presentation()
    gamma_b = gamma_x(pres)

    h0 = gamma_x(torsion)
    h0_other = gamma_p(gamma_b)
    h0_bad = _degreewise_mismatches(h0, h0_other, pres.lo, pres.hi)

    p_first = (mod_p_infty(gamma_b), gamma_p(mod_x_infty(pres)))
    b_first = (mod_x_infty(torsion), gamma_x_divisible(pres))
    h1 = ExtensionRecord(pres.prime, p_first, b_first)

    h2 = mod_p_infty(mod_x_infty(pres))
    h2_other = mod_x_infty_divisible(pres)
    h2_bad = _degreewise_mismatches(h2, h2_other, pres.lo - STEP, pres.hi)

    mismatches = {}
    if h0_bad:
        mismatches["h0"] = h0_bad
    if h2_bad:
        mismatches["h2"] = h2_bad
    if strict and mismatches:
        raise ArithmeticError("composition orders disagree: %r" % mismatches)
    return LocalCohomologyTwo(pres.prime, h0, h1, h2, mismatches)


# ---- duality shift ----------------------------------------------------------


def gorenstein_shift(degrees: Sequence[int], target: str = "Zp") -> int:
    """The duality shift for a polynomial ring on generators of the given degrees.

    ``target`` is "Zp" for the p-complete integral dual and "Fp" for the
    residue-field dual, which sits one degree lower.
    """
    if target not in ("Zp", "Fp"):
        raise ValueError("target must be 'Zp' or 'Fp'")
    for d in degrees:
        if d <= 0 or d % 2 != 0:
            warnings.warn("generator degree %d is not a positive even integer" % d,
                          stacklevel=2)
    shift = -sum(d + 1 for d in degrees)
    if target == "Fp":
        shift -= 1
    return shift
