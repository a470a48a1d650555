"""Exact arithmetic for p-local abelian groups and integer-matrix morphisms.

Every group handled by this engine is a finite direct sum of three kinds of
summands over a fixed prime p:

* free summands ``Z_p`` (the p-adic integers),
* finite cyclic summands ``Z/p^a``,
* divisible summands ``Q_p/Z_p`` (the Pruefer group).

A group without divisible summands is *Noetherian*; one without free summands
is *Artinian*.  Morphisms are only ever presented by integer matrices between
Noetherian groups; anything involving a divisible summand goes through the
closed-form rules at the bottom of this file.  All arithmetic is exact: plain
Python integers, no floating point, no numeric library.

Matrix convention: for ``f: A -> B`` the matrix has one row per generator of B
and one column per generator of A; entry ``(i, j)`` is the coefficient of the
i-th codomain generator in the image of the j-th domain generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

# Summand codes: 0 = free Z_p, a >= 1 = torsion Z/p^a, -1 = divisible Q_p/Z_p.
FREE = 0
DIVISIBLE = -1


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b), g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# integer matrices (lists of rows)


def mat_zero(rows: int, cols: int) -> list[list[int]]:
    return [[0] * cols for _ in range(rows)]


def mat_identity(n: int) -> list[list[int]]:
    m = mat_zero(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    rows, inner = len(a), len(b)
    cols = len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise ValueError("matrix shapes do not compose")
    out = mat_zero(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += c * bk[j]
    return out


def mat_copy(a: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(row) for row in a]


def integer_determinant(a: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    m = mat_copy(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form ``U * A * V = D`` with unimodular U, V.

    D is diagonal with non-negative entries and d_i | d_{i+1}.  ``uinv`` and
    ``vinv`` are the exact inverses of U and V, tracked during the reduction
    so no matrix inversion is ever needed downstream.
    """

    d: list[list[int]]
    u: list[list[int]]
    v: list[list[int]]
    uinv: list[list[int]]
    vinv: list[list[int]]

    @property
    def diagonal(self) -> list[int]:
        n = min(len(self.d), len(self.d[0]) if self.d else 0)
        return [self.d[i][i] for i in range(n)]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def smith_normal_form(a: Sequence[Sequence[int]]) -> SnfResult:
    """Smith normal form over Z with both unimodular transforms.

    Works for any shape including empty matrices.  Diagonal entries are
    non-negative and each divides the next.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(r) != cols for r in a):
        raise ValueError("ragged matrix")
    d = mat_copy(a)
    u, uinv = mat_identity(rows), mat_identity(rows)
    v, vinv = mat_identity(cols), mat_identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for r in uinv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def row_combine(i, j, x, y, z, w):
        # rows (i, j) <- (x*i + y*j, z*i + w*j), det(x w - y z) == 1
        for mat in (d, u):
            ri, rj = mat[i], mat[j]
            for k in range(len(ri)):
                ri[k], rj[k] = x * ri[k] + y * rj[k], z * ri[k] + w * rj[k]
        # uinv <- uinv * T^{-1}, T^{-1} = [[w, -y], [-z, x]]
        for r in uinv:
            r[i], r[j] = w * r[i] - z * r[j], -y * r[i] + x * r[j]

    def col_combine(i, j, x, y, z, w):
        # cols (i, j) <- (x*i + z*j, y*i + w*j) i.e. right-multiply by [[x,y],[z,w]]
        for mat in (d, v):
            for r in mat:
                r[i], r[j] = x * r[i] + z * r[j], y * r[i] + w * r[j]
        ri, rj = vinv[i], vinv[j]
        for k in range(len(ri)):
            ri[k], rj[k] = w * ri[k] - y * rj[k], -z * ri[k] + x * rj[k]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        for r in uinv:
            r[i] = -r[i]

    n = min(rows, cols)
    t = 0
    while t < n:
        # find a pivot with the smallest absolute value in the t.. submatrix
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = d[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                b = d[i][t]
                if b == 0:
                    continue
                a0 = d[t][t]
                if b % a0 == 0:
                    row_combine(t, i, 1, 0, -(b // a0), 1)
                else:
                    x, y, g = _xgcd(a0, b)
                    row_combine(t, i, x, y, -(b // g), a0 // g)
                dirty = True
            for j in range(t + 1, cols):
                b = d[t][j]
                if b == 0:
                    continue
                a0 = d[t][t]
                if b % a0 == 0:
                    col_combine(t, j, 1, -(b // a0), 0, 1)
                else:
                    x, y, g = _xgcd(a0, b)
                    col_combine(t, j, x, -(b // g), y, a0 // g)
                dirty = True
        if d[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            a0, b0 = d[i][i], d[i + 1][i + 1]
            if a0 and b0 % a0 != 0:
                # fold the offending entry back into the pivot position
                col_combine(i, i + 1, 1, 0, 1, 1)  # col_i += col_{i+1}
                x, y, g = _xgcd(d[i][i], d[i + 1][i])
                row_combine(i, i + 1, x, y, -(d[i + 1][i] // g), d[i][i] // g)
                # clean the fill-in
                b = d[i][i + 1]
                if b % d[i][i] == 0:
                    col_combine(i, i + 1, 1, -(b // d[i][i]), 0, 1)
                else:  # pragma: no cover - xgcd pivot already divides
                    x, y, g = _xgcd(d[i][i], b)
                    col_combine(i, i + 1, x, -(b // g), y, d[i][i] // g)
                if d[i][i] < 0:
                    negate_row(i)
                if d[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return SnfResult(d=d, u=u, v=v, uinv=uinv, vinv=vinv)


# ---------------------------------------------------------------------------
# groups


class MixedGroup:
    """A p-local abelian group: sum of Z_p, Z/p^a and Q_p/Z_p summands.

    Stored as an ordered tuple of labelled summands so that graded slices can
    keep their generator names; the isomorphism type ignores the order.
    """

    __slots__ = ("prime", "summands")

    def __init__(self, prime: int, summands: Iterable[tuple[str, int]] = ()):
        summands = tuple((str(lbl), int(code)) for lbl, code in summands)
        for lbl, code in summands:
            if code < DIVISIBLE:
                raise ValueError(f"bad summand code {code} for {lbl!r}")
        self.prime = int(prime)
        self.summands = summands

    @classmethod
    def build(cls, prime: int, free: int = 0, torsion: Sequence[int] = (),
              divisible: int = 0, labels: Sequence[str] | None = None) -> "MixedGroup":
        codes = [FREE] * free + [int(a) for a in torsion] + [DIVISIBLE] * divisible
        if labels is None:
            labels = [f"g{i}" for i in range(len(codes))]
        if len(labels) != len(codes):
            raise ValueError("label count mismatch")
        return cls(prime, zip(labels, codes))

    @classmethod
    def zero(cls, prime: int) -> "MixedGroup":
        return cls(prime, ())

    # -- structure ---------------------------------------------------------

    @property
    def free_rank(self) -> int:
        return sum(1 for _, c in self.summands if c == FREE)

    @property
    def divisible_rank(self) -> int:
        return sum(1 for _, c in self.summands if c == DIVISIBLE)

    @property
    def torsion_exponents(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.summands if c >= 1)

    def invariants(self) -> tuple[int, int, tuple[int, ...]]:
        """(free rank, divisible rank, torsion exponents sorted non-increasing)."""
        return (self.free_rank, self.divisible_rank,
                tuple(sorted(self.torsion_exponents, reverse=True)))

    def canonical(self) -> "MixedGroup":
        """Copy with summands ordered free, torsion (non-increasing), divisible."""
        def key(item):
            lbl, code = item
            if code == FREE:
                return (0, 0, lbl)
            if code == DIVISIBLE:
                return (2, 0, lbl)
            return (1, -code, lbl)
        return MixedGroup(self.prime, sorted(self.summands, key=key))

    @property
    def is_noetherian(self) -> bool:
        return self.divisible_rank == 0

    @property
    def is_artinian(self) -> bool:
        return self.free_rank == 0

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0 and self.divisible_rank == 0

    @property
    def is_trivial(self) -> bool:
        return not self.summands

    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("order of an infinite group")
        return self.prime ** sum(self.torsion_exponents)

    def torsion_order(self) -> int:
        return self.prime ** sum(self.torsion_exponents)

    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.summands)

    def codes(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.summands)

    def relabel(self, labels: Sequence[str]) -> "MixedGroup":
        if len(labels) != len(self.summands):
            raise ValueError("label count mismatch")
        return MixedGroup(self.prime, zip(labels, self.codes()))

    def direct_sum(self, other: "MixedGroup") -> "MixedGroup":
        if other.prime != self.prime:
            raise ValueError("direct sum across different primes")
        return MixedGroup(self.prime, self.summands + other.summands)

    # -- presentation ------------------------------------------------------

    def describe(self) -> str:
        """Human-readable isomorphism type, e.g. ``Z_2^2 + Z/8 + Q_2/Z_2``."""
        p = self.prime
        free, div, tors = self.invariants()
        parts = []
        if free == 1:
            parts.append(f"Z_{p}")
        elif free > 1:
            parts.append(f"Z_{p}^{free}")
        i = 0
        while i < len(tors):
            j = i
            while j < len(tors) and tors[j] == tors[i]:
                j += 1
            count = j - i
            piece = f"Z/{p ** tors[i]}"
            parts.append(piece if count == 1 else f"({piece})^{count}")
            i = j
        if div == 1:
            parts.append(f"Q_{p}/Z_{p}")
        elif div > 1:
            parts.append(f"(Q_{p}/Z_{p})^{div}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"MixedGroup({self.prime}, {self.describe()})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, MixedGroup) and self.prime == other.prime
                and self.summands == other.summands)

    def __hash__(self) -> int:
        return hash((self.prime, self.summands))


def is_isomorphic(g: MixedGroup, h: MixedGroup) -> bool:
    """Isomorphism test by comparing canonical invariants."""
    if g.prime != h.prime:
        raise ValueError("cannot compare groups over different primes")
    return g.invariants() == h.invariants()


# ---------------------------------------------------------------------------
# morphisms


class GroupMorphism:
    """Integer-matrix morphism between Noetherian groups.

    Entry (i, j) is the coefficient of codomain generator i in the image of
    domain generator j; columns of domain generators of order p^a must be
    killed by p^a in the codomain for the map to be well defined.
    """

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain: MixedGroup, codomain: MixedGroup,
                 matrix: Sequence[Sequence[int]], check: bool = True):
        if not domain.is_noetherian or not codomain.is_noetherian:
            raise ValueError("matrix morphisms require Noetherian ends")
        if domain.prime != codomain.prime:
            raise ValueError("morphism across different primes")
        m = [list(map(int, row)) for row in matrix]
        if len(m) != len(codomain.summands):
            raise ValueError(f"expected {len(codomain.summands)} rows, got {len(m)}")
        for row in m:
            if len(row) != len(domain.summands):
                raise ValueError("row length does not match domain")
        self.domain = domain
        self.codomain = codomain
        self.matrix = self._reduce(domain, codomain, m)
        if check:
            self._check_well_defined()

    @staticmethod
    def _reduce(dom: MixedGroup, cod: MixedGroup, m: list[list[int]]) -> list[list[int]]:
        p = cod.prime
        for i, (_, code) in enumerate(cod.summands):
            if code >= 1:
                q = p ** code
                m[i] = [x % q for x in m[i]]
        return m

    def _check_well_defined(self):
        p = self.domain.prime
        for j, (lbl, code) in enumerate(self.domain.summands):
            if code < 1:
                continue
            q = p ** code
            for i, (clbl, ccode) in enumerate(self.codomain.summands):
                x = self.matrix[i][j] * q
                if ccode == FREE:
                    ok = x == 0
                else:
                    ok = x % (p ** ccode) == 0
                if not ok:
                    raise ValueError(
                        f"not well defined: p^{code} * image of {lbl!r} "
                        f"survives on {clbl!r}")

    @classmethod
    def zero(cls, domain: MixedGroup, codomain: MixedGroup) -> "GroupMorphism":
        return cls(domain, codomain,
                   mat_zero(len(codomain.summands), len(domain.summands)),
                   check=False)

    @classmethod
    def identity(cls, group: MixedGroup) -> "GroupMorphism":
        return cls(group, group, mat_identity(len(group.summands)), check=False)

    def compose(self, first: "GroupMorphism") -> "GroupMorphism":
        """self o first (apply ``first``, then ``self``)."""
        if first.codomain.summands != self.domain.summands:
            raise ValueError("composition mismatch")
        if not self.domain.summands:
            # zero inner dimension: the shape cannot be recovered from the
            # bare matrices, so build the zero map directly
            product = mat_zero(len(self.codomain.summands),
                               len(first.domain.summands))
        else:
            product = mat_mul(self.matrix, first.matrix)
        return GroupMorphism(first.domain, self.codomain, product, check=False)

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in row) for row in self.matrix)

    def __repr__(self) -> str:
        return (f"GroupMorphism({self.domain.describe()} -> "
                f"{self.codomain.describe()})")


def _relation_columns(group: MixedGroup) -> list[list[int]]:
    """Columns (as a matrix) presenting the torsion relations p^a * e_i."""
    n = len(group.summands)
    cols = []
    p = group.prime
    for i, (_, code) in enumerate(group.summands):
        if code >= 1:
            col = [0] * n
            col[i] = p ** code
            cols.append(col)
    # convert list of columns into an n x k matrix
    k = len(cols)
    return [[cols[j][i] for j in range(k)] for i in range(n)]


def _hstack(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if not a:
        return mat_copy(b)
    if not b:
        return mat_copy(a)
    return [list(ra) + list(rb) for ra, rb in zip(a, b)]


def _summands_from_diagonal(prime: int, diag: list[int],
                            ngens: int) -> tuple[list[int], list[int]]:
    """Summand codes of Z^ngens modulo diagonal relations, localized at p.

    Entry i of ``diag`` (0 where absent) is the relation on generator i; a
    relation with p-valuation 0 is a unit at p and kills its generator.
    Returns (codes, kept generator indices) in parallel.
    """
    codes = []
    keep = []
    for i in range(ngens):
        dval = diag[i] if i < len(diag) else 0
        if dval == 0:
            codes.append(FREE)
            keep.append(i)
        else:
            v = valuation(dval, prime)
            if v > 0:
                codes.append(v)
                keep.append(i)
    return codes, keep


def _integer_kernel_basis(mat: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis (list of columns) of the integer kernel lattice of ``mat``."""
    if not mat:
        # zero rows: everything is in the kernel
        ident = mat_identity(ncols)
        return [[ident[i][j] for i in range(ncols)] for j in range(ncols)]
    snf = smith_normal_form(mat)
    r = snf.rank
    cols = len(mat[0])
    return [[snf.v[i][j] for i in range(cols)] for j in range(r, cols)]


def kernel(f: GroupMorphism) -> tuple[MixedGroup, GroupMorphism]:
    """Kernel of a morphism, with its inclusion into the domain.

    The kernel group comes back in canonical order (free summands first,
    then torsion with non-increasing exponents) with fresh labels ``k0, k1,
    ...``; callers that want named generators relabel afterwards.
    """
    p = f.domain.prime
    m = len(f.domain.summands)
    if m == 0:
        z = MixedGroup.zero(p)
        return z, GroupMorphism(z, f.domain, [[] for _ in f.domain.summands],
                                check=False)
    # lattice L = preimage of the codomain relation lattice
    stacked = _hstack(f.matrix, _relation_columns(f.codomain))
    full_basis = _integer_kernel_basis(stacked, m + sum(
        1 for _, c in f.codomain.summands if c >= 1))
    # project kernel vectors onto the domain coordinates
    raw = [[col[i] for col in full_basis] for i in range(m)] if full_basis \
        else mat_zero(m, 0)
    if not full_basis:
        z = MixedGroup.zero(p)
        return z, GroupMorphism(z, f.domain, [[] for _ in f.domain.summands],
                                check=False)
    lat = smith_normal_form(raw)
    r = lat.rank
    if r == 0:
        z = MixedGroup.zero(p)
        return z, GroupMorphism(z, f.domain, [[] for _ in f.domain.summands],
                                check=False)
    diag = lat.diagonal
    # basis of L: columns bl_i = lat.uinv[:, i] * d_i  (i < r)
    bl = [[lat.uinv[row][i] * diag[i] for i in range(r)] for row in range(m)]
    # express the domain relations in that basis: solve BL * X = R_dom
    rdom = _relation_columns(f.domain)
    k = len(rdom[0]) if rdom else 0
    urd = mat_mul(lat.u, rdom) if k else [[] for _ in range(m)]
    x = mat_zero(r, k)
    for i in range(r):
        for j in range(k):
            num = urd[i][j]
            if num % diag[i] != 0:
                raise ArithmeticError("domain relations escape the kernel lattice")
            x[i][j] = num // diag[i]
    for i in range(r, m):
        for j in range(k):
            if urd[i][j] != 0:
                raise ArithmeticError("domain relations escape the kernel lattice")
    # kernel = Z^r / X Z^k
    q = smith_normal_form(x)
    codes, keep = _summands_from_diagonal(p, q.diagonal, r)
    # generator columns in domain coordinates: BL * Uinv(X) e_i
    gen_cols = mat_mul(bl, q.uinv)
    order = sorted(range(len(keep)),
                   key=lambda t: (0, 0) if codes[t] == FREE else (1, -codes[t]))
    out_codes = [codes[t] for t in order]
    out_cols = [keep[t] for t in order]
    group = MixedGroup(p, [(f"k{i}", c) for i, c in enumerate(out_codes)])
    incl = [[gen_cols[row][out_cols[t]] for t in range(len(out_cols))]
            for row in range(m)]
    # normalize generator signs: first nonzero entry positive
    for t in range(len(out_cols)):
        for row in range(m):
            if incl[row][t]:
                if incl[row][t] < 0:
                    for rr in range(m):
                        incl[rr][t] = -incl[rr][t]
                break
    return group, GroupMorphism(group, f.domain, incl, check=True)


def cokernel(f: GroupMorphism) -> tuple[MixedGroup, GroupMorphism]:
    """Cokernel of a morphism, with the projection from the codomain.

    Canonically ordered like :func:`kernel`, labels ``c0, c1, ...``.
    """
    p = f.codomain.prime
    n = len(f.codomain.summands)
    if n == 0:
        z = MixedGroup.zero(p)
        return z, GroupMorphism(f.codomain, z, [], check=False)
    rel = _hstack(f.matrix, _relation_columns(f.codomain))
    if not rel or not rel[0]:
        snf = smith_normal_form(mat_zero(n, 1))
    else:
        snf = smith_normal_form(rel)
    codes, keep = _summands_from_diagonal(p, snf.diagonal, n)
    order = sorted(range(len(keep)),
                   key=lambda t: (0, 0) if codes[t] == FREE else (1, -codes[t]))
    out_codes = [codes[t] for t in order]
    rows = [keep[t] for t in order]
    group = MixedGroup(p, [(f"c{i}", c) for i, c in enumerate(out_codes)])
    proj = [list(snf.u[rw]) for rw in rows]
    return group, GroupMorphism(f.codomain, group, proj, check=False)


def image_invariants(f: GroupMorphism) -> tuple[int, int, tuple[int, ...]]:
    """Invariants of im(f) computed as domain/kernel (independent route)."""
    ker, incl = kernel(f)
    # image = domain / ker: present domain modulo (kernel generators + domain
    # relations) ... careful: that is the cokernel of the inclusion, which is
    # dom/ker as a quotient group.
    qgroup, _ = cokernel(incl)
    return qgroup.invariants()


def is_bijective(f: GroupMorphism) -> bool:
    ker, _ = kernel(f)
    cok, _ = cokernel(f)
    return ker.is_trivial and cok.is_trivial


# ---------------------------------------------------------------------------
# closed-form functors (the only route touching divisible summands)


def hom_to_zp(g: MixedGroup) -> MixedGroup:
    """Hom(G, Z_p): keeps free summands, kills torsion and divisible parts."""
    return MixedGroup(g.prime,
                      [(lbl, FREE) for lbl, c in g.summands if c == FREE])


def ext_to_zp(g: MixedGroup) -> MixedGroup:
    """Ext(G, Z_p) for Noetherian G: keeps the torsion, same exponents."""
    if not g.is_noetherian:
        raise ValueError("ext_to_zp expects a Noetherian group")
    return MixedGroup(g.prime,
                      [(lbl, c) for lbl, c in g.summands if c >= 1])


def pontryagin_dual(g: MixedGroup) -> MixedGroup:
    """Hom(G, Q_p/Z_p): swaps free and divisible, fixes torsion exponents."""
    out = []
    for lbl, c in g.summands:
        if c == FREE:
            out.append((lbl, DIVISIBLE))
        elif c == DIVISIBLE:
            out.append((lbl, FREE))
        else:
            out.append((lbl, c))
    return MixedGroup(g.prime, out)


def gamma_p_group(g: MixedGroup) -> MixedGroup:
    """p-power-torsion subgroup: drops the free part."""
    return MixedGroup(g.prime, [(lbl, c) for lbl, c in g.summands if c != FREE])


def mod_p_infty_group(g: MixedGroup) -> MixedGroup:
    """G/p^infty: each free summand becomes divisible, the rest dies."""
    return MixedGroup(g.prime,
                      [(lbl, DIVISIBLE) for lbl, c in g.summands if c == FREE])
