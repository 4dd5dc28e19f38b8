"""CHSH expressions and bound checks for 2x2 binary systems.

A 2x2 binary system has two "row" contents and two "column" contents,
one context per row-column pair, all alphabets of size two.  Encoding
each alphabet as +1/-1 by declared order gives the four product
expectations E_ij; the CHSH quantities are the four signed combinations
with an odd number of minus signs.  Their maximum is at most 2 for
systems admitting an identity coupling (the classical bound), at most
2*sqrt(2) for quantum-generated tables (checked exactly as max^2 <= 8),
and at most 4 outright.

:func:`fine_equivalence_check` cross-checks the CHSH verdict against the
coupling engine.  For systems with uniform marginals the two must agree;
with non-uniform marginals the linear program is authoritative and the
CHSH-only verdict is reported alongside.
"""

from dataclasses import dataclass
from fractions import Fraction

from .coupling import DEFAULT_VAR_CAP, identity_coupling_feasible
from .rationals import decimal_str, format_rational
from .system import System, VariableId

__all__ = [
    "ShapeError",
    "CorrelationTable",
    "ChshReport",
    "FineEquivalenceReport",
    "correlation_table",
    "chsh",
    "fine_equivalence_check",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# Sign patterns over (E11, E12, E21, E22) with an odd number of minuses.
CHSH_SIGNS = (
    (-1, 1, 1, 1),
    (1, -1, 1, 1),
    (1, 1, -1, 1),
    (1, 1, 1, -1),
)


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class CorrelationTable:
    """Exact +/-1 expectations of a 2x2 binary system.

    ``expectations[i][j]`` is E[row_i * col_j] in the context pairing
    ``row_contents[i]`` with ``col_contents[j]``; the per-cell single
    variable expectations come along for bound checks on non-uniform
    marginals.
    """

    row_contents: tuple[str, str]
    col_contents: tuple[str, str]
    context_grid: tuple[tuple[str, str], tuple[str, str]]
    expectations: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    row_marginal_expectations: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    col_marginal_expectations: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class ChshReport:
    """The four odd-sign CHSH values and the exact bound checks.

    ``tsirelson_ok`` compares squares (max^2 <= 8) so the irrational
    2*sqrt(2) never enters the arithmetic.
    """

    values: tuple[Fraction, Fraction, Fraction, Fraction]
    max_value: Fraction
    classical_ok: bool
    tsirelson_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "values": [format_rational(v) for v in self.values],
            "values_decimal": [decimal_str(v) for v in self.values],
            "max_value": format_rational(self.max_value),
            "max_value_decimal": decimal_str(self.max_value),
            "classical_ok": self.classical_ok,
            "tsirelson_ok": self.tsirelson_ok,
        }


@dataclass(frozen=True)
class FineEquivalenceReport:
    """LP verdict versus CHSH verdict for one 2x2 binary system.

    ``mismatch`` flags disagreement between the two.  With uniform
    marginals the CHSH inequalities characterize identity-coupling
    existence, so a mismatch there is a defect; with non-uniform
    marginals the LP is authoritative and CHSH is advisory only.
    A set ``skipped_reason`` means the check did not run.
    """

    skipped_reason: str | None = None
    chsh: ChshReport | None = None
    lp_feasible: bool | None = None
    chsh_classical_ok: bool | None = None
    uniform_marginals: bool | None = None
    mismatch: bool | None = None


def _sign(system: System, variable: VariableId, label: str) -> int:
    alphabet = system.contents[variable.content]
    return 1 if label == alphabet[0] else -1


def correlation_table(system: System) -> CorrelationTable:
    """Build the 2x2 table; raises :class:`ShapeError` if the system is
    not two contents per side, four pair contexts, binary alphabets."""
    if len(system.contexts) != 4 or len(system.contents) != 4:
        raise ShapeError("need exactly 4 contexts over 4 contents")
    if any(len(a) != 2 for a in system.contents.values()):
        raise ShapeError("need binary alphabets for every content")
    if any(len(b.variables) != 2 for b in system.blocks):
        raise ShapeError("need exactly 2 variables per context")

    pairs = {b.context: (b.variables[0].content, b.variables[1].content) for b in system.blocks}
    # 2-color the co-measurement graph: contents in one context sit on
    # opposite sides.
    side: dict[str, int] = {}
    start = min(system.contents)
    side[start] = 0
    for _ in range(4):
        for a, b in pairs.values():
            if a in side and b not in side:
                side[b] = 1 - side[a]
            if b in side and a not in side:
                side[a] = 1 - side[b]
    if len(side) != 4 or any(side[a] == side[b] for a, b in pairs.values()):
        raise ShapeError("contexts do not pair two fixed sides")
    rows = tuple(sorted(c for c in side if side[c] == side[start]))
    cols = tuple(sorted(c for c in side if side[c] != side[start]))
    if len(rows) != 2 or len(cols) != 2:
        raise ShapeError("each side needs exactly 2 contents")
    wanted = {frozenset((r, c)) for r in rows for c in cols}
    if {frozenset(p) for p in pairs.values()} != wanted:
        raise ShapeError("contexts do not cover the four side pairings")

    grid = [["", ""], ["", ""]]
    expectations = [[ZERO, ZERO], [ZERO, ZERO]]
    row_marg = [[ZERO, ZERO], [ZERO, ZERO]]
    col_marg = [[ZERO, ZERO], [ZERO, ZERO]]
    for ctx, (a, b) in pairs.items():
        r = rows.index(a) if a in rows else rows.index(b)
        c = cols.index(b) if b in cols else cols.index(a)
        grid[r][c] = ctx
        block = system.block(ctx)
        row_var = next(v for v in block.variables if v.content == rows[r])
        col_var = next(v for v in block.variables if v.content == cols[c])
        ri = block.variable_position(row_var)
        ci = block.variable_position(col_var)
        e = ea = eb = ZERO
        for outcome, p in block.pmf.items():
            sa = _sign(system, row_var, outcome[ri])
            sb = _sign(system, col_var, outcome[ci])
            e += sa * sb * p
            ea += sa * p
            eb += sb * p
        expectations[r][c] = e
        row_marg[r][c] = ea
        col_marg[r][c] = eb

    def freeze(cells: list[list]) -> tuple[tuple, tuple]:
        return tuple(cells[0]), tuple(cells[1])

    return CorrelationTable(
        row_contents=rows,
        col_contents=cols,
        context_grid=freeze(grid),
        expectations=freeze(expectations),
        row_marginal_expectations=freeze(row_marg),
        col_marginal_expectations=freeze(col_marg),
    )


def chsh(table: CorrelationTable) -> ChshReport:
    """Evaluate all four odd-sign combinations exactly."""
    (e11, e12), (e21, e22) = table.expectations
    flat = (e11, e12, e21, e22)
    values = tuple(
        abs(sum((s * e for s, e in zip(signs, flat)), ZERO)) for signs in CHSH_SIGNS
    )
    max_value = max(values)
    return ChshReport(
        values=values,
        max_value=max_value,
        classical_ok=max_value <= 2,
        tsirelson_ok=max_value * max_value <= 8,
    )


def _uniform_marginals(system: System) -> bool:
    for variable in system.variables():
        marginal = system.marginal(variable)
        size = len(marginal)
        if any(p != Fraction(1, size) for p in marginal.values()):
            return False
    return True


def fine_equivalence_check(
    system: System, var_cap: int = DEFAULT_VAR_CAP
) -> FineEquivalenceReport:
    """Cross-check identity-coupling feasibility against the CHSH verdict.

    Requires a consistently connected 2x2 binary system; inconsistent
    systems come back with ``skipped_reason`` set and no verdicts.
    """
    table = correlation_table(system)
    report = system.consistency_report()
    if not report.consistent:
        names = ", ".join(f.content for f in report.failures)
        return FineEquivalenceReport(
            skipped_reason=f"system is not consistently connected ({names})"
        )
    chsh_report = chsh(table)
    lp_feasible = identity_coupling_feasible(system, var_cap).feasible
    return FineEquivalenceReport(
        chsh=chsh_report,
        lp_feasible=lp_feasible,
        chsh_classical_ok=chsh_report.classical_ok,
        uniform_marginals=_uniform_marginals(system),
        mismatch=lp_feasible != chsh_report.classical_ok,
    )
