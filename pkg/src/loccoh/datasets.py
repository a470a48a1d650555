"""Built-in graded-module datasets: pi_*(ko) and the tmf basic blocks N_*.

The shipped ``.pres`` files under ``data/`` are the ground truth the library
loads at run time; the builder functions in this module are the code that
generated them, kept so the test suite can verify file and builder never
drift apart.  Generator labels are ASCII transliterations of the usual Greek
class names (eta, nu, eps, kappa, kappabar, beta); a table mapping them back
lives in the README.

Stated operator values carry explicit ``action`` blocks in the files.  A
``single`` generator with no stated block and a nonempty target slice gets an
``assumed B <label>`` marker: its column was defaulted to zero without a
stated source, and audits can grep for exactly these.  Singles whose target
slice is empty need no marker (the zero action is forced, not assumed).
"""

from __future__ import annotations

import os
import pathlib
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .gradedmod import (
    GradedModulePresentation,
    Generator,
    parse_presentation,
    serialize_presentation,
    validate_presentation,
)
from .gradedmod.presentation import OPERATOR_SHIFTS

__all__ = [
    "BUILTIN_NAMES",
    "Dataset",
    "GoldenRow",
    "build_ko_p2",
    "build_tmf_n_p2",
    "build_tmf_n_p3",
    "builder_for",
    "data_root",
    "ideal_rule_key",
    "load_builtin",
    "render_golden_table",
    "rule_file_text",
    "write_data_files",
]

BUILTIN_NAMES = ("ko-p2", "tmf-N-p2", "tmf-N-p3")


# ---------------------------------------------------------------------------
# ko at p=2: pi_*(ko) = Z_2[eta, A, B] / (2 eta, eta^3, eta*A, A^2 - 4B),
# as an abelian group four B-towers (1, eta, eta^2, A with 2 eta = 0).
# ---------------------------------------------------------------------------

def build_ko_p2() -> GradedModulePresentation:
    """Connective real K-theory homotopy at p=2 as a B-tower presentation."""
    gens = (
        Generator("1", 0, None, True),
        Generator("eta", 1, 1, True),
        Generator("eta^2", 2, 1, True),
        Generator("A", 4, None, True),
    )
    return GradedModulePresentation(
        prime=2,
        window=(0, 28),
        stability_degree=12,
        generators=gens,
        overrides={},
        period_hint=("B", 8),
        name="ko-p2",
    )


# ---------------------------------------------------------------------------
# tmf basic block at p=2.
#
# Free-over-Z_2[B] part: eight summands ko[k].  ko[0] has towers 1 (degree 0)
# and C (12); ko[k] for k = 1..7 has a single free generator D_k (24k), towers
# B_k (24k+8) and C_k (24k+12), and B.D_k = d_k B_k with d_k = 8/gcd(k,8).
# Each block also carries two order-2 eta-family towers (residues 1, 2 mod 8).
#
# B-power torsion part: 72 single generators (_TABLE2_P2 below).
# ---------------------------------------------------------------------------

# (label, degree, order exponent or None, tower?)
_KO_BLOCKS_P2: Tuple[Tuple[str, int, Optional[int], bool], ...] = (
    # block 0
    ("1", 0, None, True),
    ("eta", 1, 1, True),
    ("eta^2", 2, 1, True),
    ("C", 12, None, True),
    # block 1
    ("D_1", 24, None, False),
    ("eta_1", 25, 1, True),
    ("eta*eta_1", 26, 1, True),
    ("B_1", 32, None, True),
    ("C_1", 36, None, True),
    # block 2
    ("D_2", 48, None, False),
    ("eta_1^2", 50, 1, True),
    ("B_2", 56, None, True),
    ("eta*B_2", 57, 1, True),
    ("C_2", 60, None, True),
    # block 3
    ("D_3", 72, None, False),
    ("B_3", 80, None, True),
    ("eta*B_3", 81, 1, True),
    ("eta^2*B_3", 82, 1, True),
    ("C_3", 84, None, True),
    # block 4
    ("D_4", 96, None, False),
    ("eta_4", 97, 1, True),
    ("eta*eta_4", 98, 1, True),
    ("B_4", 104, None, True),
    ("C_4", 108, None, True),
    # block 5
    ("D_5", 120, None, False),
    ("eta_1*eta_4", 122, 1, True),
    ("B_5", 128, None, True),
    ("eta*B_5", 129, 1, True),
    ("C_5", 132, None, True),
    # block 6
    ("D_6", 144, None, False),
    ("B_6", 152, None, True),
    ("eta*B_6", 153, 1, True),
    ("eta^2*B_6", 154, 1, True),
    ("C_6", 156, None, True),
    # block 7
    ("D_7", 168, None, False),
    ("B_7", 176, None, True),
    ("eta*B_7", 177, 1, True),
    ("eta^2*B_7", 178, 1, True),
    ("C_7", 180, None, True),
)

# B-power torsion table at p=2: (degree, cyclic order, label).
_TABLE2_P2: Tuple[Tuple[int, int, str], ...] = (
    (3, 8, "nu"),
    (6, 2, "nu^2"),
    (8, 2, "eps"),
    (9, 2, "eta*eps"),
    (14, 2, "kappa"),
    (15, 2, "eta*kappa"),
    (17, 2, "nu*kappa"),
    (20, 8, "kappabar"),
    (21, 2, "eta*kappabar"),
    (22, 2, "eta^2*kappabar"),
    (27, 4, "nu_1"),
    (28, 2, "eta*nu_1"),
    (32, 2, "eps_1"),
    (33, 2, "eta*eps_1"),
    (34, 2, "kappa*kappabar"),
    (35, 2, "eta*kappa*kappabar"),
    (39, 2, "eta_1*kappa"),
    (40, 4, "kappabar^2"),
    (41, 2, "eta*kappabar^2"),
    (42, 2, "eta^2*kappabar^2"),
    (45, 2, "eta_1*kappabar"),
    (46, 2, "eta*eta_1*kappabar"),
    (51, 8, "nu_2"),
    (52, 2, "eta*nu_2"),
    (53, 2, "eta^2*nu_2"),
    (54, 4, "nu*nu_2"),
    (57, 2, "nu^2*nu_2"),
    (59, 2, "B*nu_2"),
    (60, 4, "kappabar^3"),
    (65, 2, "eta_1*kappabar^2"),
    (65, 2, "nu_2*kappa"),
    (66, 2, "eta*nu_2*kappa"),
    (68, 2, "nu*nu_2*kappa"),
    (70, 2, "eta_1^2*kappabar"),
    (75, 2, "eta_1^3"),
    (80, 2, "kappabar^4"),
    (85, 2, "eta_1*kappabar^3"),
    (90, 2, "eta_1^2*kappabar^2"),
    (99, 8, "nu_4"),
    (100, 2, "eta*nu_4"),
    (102, 2, "nu*nu_4"),
    (104, 2, "eps_4"),
    (105, 2, "eta*eps_4"),
    (105, 2, "eta_1*kappabar^4"),
    (110, 4, "kappa_4"),
    (111, 2, "eta*kappa_4"),
    (113, 2, "nu*kappa_4"),
    (116, 4, "kappabar*D_4"),
    (117, 2, "eta_4*kappabar"),
    (118, 2, "eta*eta_4*kappabar"),
    (123, 4, "nu_5"),
    (124, 2, "eta*nu_5"),
    (125, 2, "eta^2*nu_5"),
    (128, 2, "eps_5"),
    (129, 2, "eta*eps_5"),
    (130, 4, "kappa_4*kappabar"),
    (131, 2, "eta*kappa_4*kappabar"),
    (135, 2, "eta_1*kappa_4"),
    (136, 2, "eta*eta_1*kappa_4"),
    (137, 2, "nu_5*kappa"),
    (138, 2, "eta*nu_5*kappa"),
    (142, 2, "eps_5*kappa"),
    (147, 8, "nu_6"),
    (148, 2, "eta*nu_6"),
    (149, 2, "eta^2*nu_6"),
    (150, 8, "nu*nu_6"),
    (153, 2, "nu^2*nu_6"),
    (155, 2, "B*nu_6"),
    (156, 2, "B*eta*nu_6"),
    (161, 2, "nu_6*kappa"),
    (162, 2, "eta*nu_6*kappa"),
    (164, 2, "nu*nu_6*kappa"),
)

# Stated nonzero B-columns at p=2: source label -> (target label, coefficient).
# The seven D_k columns realise B.D_k = d_k B_k; the rest are the inline
# "= B.x" annotations of the torsion table plus the three extra stated
# products B.eps_1 = 2 kappabar^2, B.(eta*nu_2) = 2 kappabar^3 and
# B.(eps_5*kappa) = 4 nu*nu_6.
_STATED_B_P2: Mapping[str, Tuple[str, int]] = {
    "kappa": ("eta^2*kappabar", 1),
    "kappabar": ("eta*nu_1", 1),
    "D_1": ("B_1", 8),
    "nu_1": ("eta*kappa*kappabar", 1),
    "eps_1": ("kappabar^2", 2),
    "kappa*kappabar": ("eta^2*kappabar^2", 1),
    "eta_1*kappabar": ("eta^2*nu_2", 1),
    "D_2": ("B_2", 4),
    "nu_2": ("B*nu_2", 1),
    "eta*nu_2": ("kappabar^3", 2),
    "D_3": ("B_3", 8),
    "D_4": ("B_4", 2),
    "kappa_4": ("eta*eta_4*kappabar", 1),
    "eta_4*kappabar": ("eta^2*nu_5", 1),
    "D_5": ("B_5", 8),
    "nu_5": ("eta*kappa_4*kappabar", 1),
    "eps_5": ("eta*eta_1*kappa_4", 1),
    "kappa_4*kappabar": ("eta*nu_5*kappa", 1),
    "eps_5*kappa": ("nu*nu_6", 4),
    "D_6": ("B_6", 4),
    "nu_6": ("B*nu_6", 1),
    "eta*nu_6": ("B*eta*nu_6", 1),
    "D_7": ("B_7", 8),
}


def _exponent(prime: int, order: int) -> int:
    exp = 0
    value = order
    while value > 1:
        if value % prime:
            raise ValueError("order %d is not a power of %d" % (order, prime))
        value //= prime
        exp += 1
    return exp


def _column_override(
    pres: GradedModulePresentation,
    op: str,
    degree: int,
    column_label: str,
    targets: Sequence[Tuple[str, int]],
) -> Tuple[Tuple[int, ...], ...]:
    """The default matrix at ``degree`` with one source column replaced."""
    rows = [list(r) for r in pres.operator_rows(op, degree)]
    sources = pres.slot_labels(degree)
    target_slots = pres.slot_labels(degree + OPERATOR_SHIFTS[op])
    col = sources.index(column_label)
    for row in rows:
        row[col] = 0
    for target_label, coeff in targets:
        rows[target_slots.index(target_label)][col] = coeff
    return tuple(tuple(r) for r in rows)


def _mark_assumed(
    skeleton: GradedModulePresentation,
    gens: Sequence[Generator],
    stated: Iterable[str],
) -> Tuple[Generator, ...]:
    """Flag unstated single generators whose zero column is a real assumption."""
    stated_set = set(stated)
    out: List[Generator] = []
    for g in gens:
        needs_marker = (
            not g.tower
            and g.label not in stated_set
            and g.degree + 8 <= skeleton.hi
            and bool(skeleton.slice_basis(g.degree + 8))
        )
        out.append(Generator(g.label, g.degree, g.exponent, g.tower, assumed=needs_marker))
    return tuple(out)


def build_tmf_n_p2() -> GradedModulePresentation:
    """The 192-periodic basic block of pi_*(tmf) at p=2."""
    gens: List[Generator] = [
        Generator(label, degree, exponent, tower)
        for label, degree, exponent, tower in _KO_BLOCKS_P2
    ]
    gens.extend(
        Generator(label, degree, _exponent(2, order), False)
        for degree, order, label in _TABLE2_P2
    )
    skeleton = GradedModulePresentation(
        prime=2,
        window=(0, 200),
        stability_degree=181,
        generators=tuple(gens),
        overrides={},
        period_hint=("M", 192),
        name="tmf-N-p2",
    )
    degree_of = {g.label: g.degree for g in skeleton.generators}
    b_blocks: Dict[int, Tuple[Tuple[int, ...], ...]] = {}
    for source, (target, coeff) in _STATED_B_P2.items():
        b_blocks[degree_of[source]] = _column_override(
            skeleton, "B", degree_of[source], source, ((target, coeff),)
        )
    # Recorded relation: nu . (nu*nu_4) = eta*eps_4 + eta_1*kappabar^4 in
    # degree 105, which no label-matching rule can see.
    nu_blocks = {
        102: _column_override(
            skeleton, "nu", 102, "nu*nu_4",
            (("eta*eps_4", 1), ("eta_1*kappabar^4", 1)),
        )
    }
    return GradedModulePresentation(
        prime=2,
        window=(0, 200),
        stability_degree=181,
        generators=_mark_assumed(skeleton, skeleton.generators, _STATED_B_P2),
        overrides={"B": b_blocks, "nu": nu_blocks},
        period_hint=("M", 192),
        name="tmf-N-p2",
    )


# ---------------------------------------------------------------------------
# tmf basic block at p=3: three free blocks (1, C; D_1, B_1, C_1; D_2, B_2,
# C_2 with B.D_k = 3 B_k) and eight order-3 singles, all killed by (3, B).
# ---------------------------------------------------------------------------

_KO_BLOCKS_P3: Tuple[Tuple[str, int, Optional[int], bool], ...] = (
    ("1", 0, None, True),
    ("C", 12, None, True),
    ("D_1", 24, None, False),
    ("B_1", 32, None, True),
    ("C_1", 36, None, True),
    ("D_2", 48, None, False),
    ("B_2", 56, None, True),
    ("C_2", 60, None, True),
)

_TABLE3_P3: Tuple[Tuple[int, int, str], ...] = (
    (3, 3, "nu"),
    (10, 3, "beta"),
    (13, 3, "nu*beta"),
    (20, 3, "beta^2"),
    (27, 3, "nu_1"),
    (30, 3, "beta^3"),
    (37, 3, "nu_1*beta"),
    (40, 3, "beta^4"),
)


def build_tmf_n_p3() -> GradedModulePresentation:
    """The 72-periodic basic block of pi_*(tmf) at p=3."""
    gens: List[Generator] = [
        Generator(label, degree, exponent, tower)
        for label, degree, exponent, tower in _KO_BLOCKS_P3
    ]
    gens.extend(
        Generator(label, degree, _exponent(3, order), False)
        for degree, order, label in _TABLE3_P3
    )
    skeleton = GradedModulePresentation(
        prime=3,
        window=(0, 80),
        stability_degree=61,
        generators=tuple(gens),
        overrides={},
        period_hint=("H", 72),
        name="tmf-N-p3",
    )
    b_blocks = {
        24: _column_override(skeleton, "B", 24, "D_1", (("B_1", 3),)),
        48: _column_override(skeleton, "B", 48, "D_2", (("B_2", 3),)),
        # The torsion singles are all annihilated by B (stated, not assumed).
        # Only these two have a nonempty target slice, so only they need an
        # explicit zero column; the other six vanish for degree reasons.
        20: _column_override(skeleton, "B", 20, "beta^2", ()),
        40: _column_override(skeleton, "B", 40, "beta^4", ()),
    }
    # Recorded relation: nu . nu_1 = beta^3 in degree 30.
    nu_blocks = {27: _column_override(skeleton, "nu", 27, "nu_1", (("beta^3", 1),))}
    return GradedModulePresentation(
        prime=3,
        window=(0, 80),
        stability_degree=61,
        generators=skeleton.generators,  # nothing assumed at p=3
        overrides={"B": b_blocks, "nu": nu_blocks},
        period_hint=("H", 72),
        name="tmf-N-p3",
    )


_BUILDERS = {
    "ko-p2": build_ko_p2,
    "tmf-N-p2": build_tmf_n_p2,
    "tmf-N-p3": build_tmf_n_p3,
}


def builder_for(name: str):
    """The construction function behind a built-in dataset."""
    return _BUILDERS[name]


# ---------------------------------------------------------------------------
# Differential / extension rule file texts, one per (dataset, ideal shape).
# ---------------------------------------------------------------------------

_D_ORDERS_P2 = {0: 8, 1: 4, 2: 8, 3: 2, 4: 8, 5: 4, 6: 8}  # d_{7-k} for k=0..6
_NU_LABELS_P2 = {0: "nu", 1: "nu_1", 2: "nu_2", 3: "eta_1^3",
                 4: "nu_4", 5: "nu_5", 6: "nu_6"}


def _p2_b_rules() -> str:
    lines = [
        "# Both rows are occupied, but no differential of any length fits: the",
        "# page has no extra rows to land in.  It carries hidden additive",
        "# extensions d * nu_k = C_k/B instead, one per block k = 0..6.",
    ]
    for k in range(7):
        tgt = "C/B" if k == 0 else "C_%d/B" % k
        lines.append("ext %s %s %d" % (_NU_LABELS_P2[k], tgt, _D_ORDERS_P2[k]))
    return "\n".join(lines) + "\n"


def _p2_pb_rules() -> str:
    lines = [
        "# d_2 sends nu_k isomorphically onto the order-d subgroup of the",
        "# divisible tower under C_k/B, for k = 0..6.  No additive extensions.",
    ]
    for k in range(7):
        tgt = "C/B" if k == 0 else "C_%d/B" % k
        lines.append("d 2 %s %s %d" % (_NU_LABELS_P2[k], tgt, _D_ORDERS_P2[k]))
    return "\n".join(lines) + "\n"


_RULE_TEXTS: Mapping[Tuple[str, str], str] = {
    ("ko-p2", "B"): (
        "# Only one occupied row (the B-power-torsion row is empty):\n"
        "# no differentials, no extensions.\n"
    ),
    ("ko-p2", "2B"): (
        "# No differentials and no additive extensions (every column is a\n"
        "# single cell); the eta-multiplications crossing filtration are\n"
        "# chart decorations only.\n"
        "etaext eta^2/B A/B\n"
    ),
    ("tmf-N-p2", "B"): _p2_b_rules(),
    ("tmf-N-p2", "2B"): _p2_pb_rules(),
    ("tmf-N-p3", "B"): (
        "# Hidden additive 3-extensions onto the two C_k/B slots, plus a\n"
        "# nu-multiplication decoration crossing filtration.\n"
        "ext nu C/B 3\n"
        "ext nu_1 C_1/B 3\n"
        "nuext beta^2 B_1/B\n"
    ),
    ("tmf-N-p3", "3B"): (
        "# d_2 kills both nu_k slots; no additive extensions survive.\n"
        "# Both nu-multiplication decorations cross filtration.\n"
        "d 2 nu C/B 3\n"
        "d 2 nu_1 C_1/B 3\n"
        "nuext beta^2 B_1/B\n"
        "nuext B_2/B C_2/B\n"
    ),
}

_RULE_KEYS = {
    "ko-p2": ("B", "2B"),
    "tmf-N-p2": ("B", "2B"),
    "tmf-N-p3": ("B", "3B"),
}


def ideal_rule_key(prime: int, ideal: Sequence[str]) -> str:
    """Map an ideal shape to its rule-file key; the periodic wrapper reuses
    the unwrapped rules (every statement is 'multiplied by all negative
    powers' of the period generator)."""
    names = [x for x in ideal if x not in ("M", "H")]
    if names == ["B"]:
        return "B"
    if names == [str(prime), "B"]:
        return "%dB" % prime
    raise ValueError("unsupported ideal %r" % (tuple(ideal),))


# ---------------------------------------------------------------------------
# Golden tables (expected gamma_x output), shipped as TSV for auditability.
# ---------------------------------------------------------------------------

GoldenRow = Tuple[int, Tuple[int, ...], Tuple[str, ...]]  # degree, orders, labels


def _golden_rows(table: Sequence[Tuple[int, int, str]]) -> Tuple[GoldenRow, ...]:
    by_degree: Dict[int, Tuple[List[int], List[str]]] = {}
    for degree, order, label in table:
        orders, labels = by_degree.setdefault(degree, ([], []))
        orders.append(order)
        labels.append(label)
    return tuple(
        (degree, tuple(orders), tuple(labels))
        for degree, (orders, labels) in sorted(by_degree.items())
    )


_GOLDEN_TABLES = {
    "tmf-N-p2": {"torsion-table": _golden_rows(_TABLE2_P2)},
    "tmf-N-p3": {"torsion-table": _golden_rows(_TABLE3_P3)},
    "ko-p2": {},
}

_GOLDEN_FILES = {
    "tmf-N-p2": {"torsion-table": "table2-p2.tsv"},
    "tmf-N-p3": {"torsion-table": "table3-p3.tsv"},
    "ko-p2": {},
}


def render_golden_table(rows: Sequence[GoldenRow]) -> str:
    out = ["# degree\torders\tlabels"]
    for degree, orders, labels in rows:
        out.append(
            "%d\t%s\t%s" % (degree, ",".join(map(str, orders)), ",".join(labels))
        )
    return "\n".join(out) + "\n"


def parse_golden_table(text: str) -> Tuple[GoldenRow, ...]:
    rows: List[GoldenRow] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        degree_s, orders_s, labels_s = line.split("\t")
        rows.append(
            (
                int(degree_s),
                tuple(int(o) for o in orders_s.split(",")),
                tuple(labels_s.split(",")),
            )
        )
    return tuple(rows)


# ---------------------------------------------------------------------------
# Loading.
# ---------------------------------------------------------------------------

def data_root():
    """Directory holding the shipped data files; LOCCOH_DATA_DIR overrides."""
    override = os.environ.get("LOCCOH_DATA_DIR")
    if override:
        return pathlib.Path(override)
    return resources.files("loccoh") / "data"


@dataclass(frozen=True)
class Dataset:
    name: str
    presentation: GradedModulePresentation
    rules: Mapping[str, str]  # rule-file key ("B", "2B", "3B") -> file text
    golden: Mapping[str, Tuple[GoldenRow, ...]]

    def rule_text(self, ideal: Sequence[str]) -> str:
        return self.rules[ideal_rule_key(self.presentation.prime, ideal)]


def rule_file_text(name: str, key: str) -> str:
    """Canonical rule text (what the shipped file must contain)."""
    return _RULE_TEXTS[(name, key)]


def load_builtin(name: str) -> Dataset:
    if name not in BUILTIN_NAMES:
        raise KeyError("unknown dataset %r; have %s" % (name, ", ".join(BUILTIN_NAMES)))
    root = data_root()
    pres = parse_presentation((root / ("%s.pres" % name)).read_text("utf-8"))
    report = validate_presentation(pres)
    if not report.ok:
        raise ValueError(
            "dataset %s failed validation: %s"
            % (name, "; ".join(msg for _, msg in report.problems))
        )
    rules = {
        key: (root / "rules" / ("%s-%s.rules" % (name, key))).read_text("utf-8")
        for key in _RULE_KEYS[name]
    }
    golden = {
        table: parse_golden_table(
            (root / "golden" / filename).read_text("utf-8")
        )
        for table, filename in _GOLDEN_FILES[name].items()
    }
    return Dataset(name=name, presentation=pres, rules=rules, golden=golden)


def write_data_files(target: pathlib.Path) -> List[pathlib.Path]:
    """Regenerate every shipped data file under ``target`` (used by the
    maintenance entry point and the lockstep tests)."""
    target = pathlib.Path(target)
    (target / "rules").mkdir(parents=True, exist_ok=True)
    (target / "golden").mkdir(parents=True, exist_ok=True)
    written = []
    for name, builder in _BUILDERS.items():
        path = target / ("%s.pres" % name)
        path.write_text(serialize_presentation(builder()), "utf-8")
        written.append(path)
        for key in _RULE_KEYS[name]:
            path = target / "rules" / ("%s-%s.rules" % (name, key))
            path.write_text(_RULE_TEXTS[(name, key)], "utf-8")
            written.append(path)
        for table, filename in _GOLDEN_FILES[name].items():
            path = target / "golden" / filename
            path.write_text(render_golden_table(_GOLDEN_TABLES[name][table]), "utf-8")
            written.append(path)
    return written
