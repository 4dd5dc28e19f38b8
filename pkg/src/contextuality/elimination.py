"""Exact feasibility of ``A x = b, x >= 0`` by elimination.

Deliberately independent of the simplex module: this is the oracle the
pivoting solver is cross-checked against, so it shares no code with it.
Gauss-Jordan reduction turns the equalities into a parametric solution
over free variables; Fourier-Motzkin elimination then decides whether the
nonnegativity constraints admit a point, and back-substitution recovers
one when they do.

Fourier-Motzkin can square the number of inequalities at each step, so
this is only suitable for the small reduced systems it is used on; a row
cap aborts with a diagnostic rather than thrashing.
"""

from fractions import Fraction
from typing import Sequence

__all__ = ["EliminationLimitError", "feasible_nonnegative"]

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_ROW_CAP = 200_000


class EliminationLimitError(RuntimeError):
    def __init__(self, rows: int):
        super().__init__(
            f"elimination produced {rows} inequalities, past the safety cap; "
            "the instance is too large for this oracle"
        )
        self.rows = rows


def _gauss_jordan(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> tuple[list[list[Fraction]], list[int], bool]:
    """Reduce ``[A | b]`` to reduced row echelon form.

    Returns (reduced augmented matrix, pivot column per reduced row,
    consistent flag).
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        k = next((i for i in range(r, len(aug)) if aug[i][c] != 0), -1)
        if k < 0:
            continue
        aug[r], aug[k] = aug[k], aug[r]
        inv = ONE / aug[r][c]
        if inv != 1:
            aug[r] = [a * inv for a in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][n] != 0:
            return aug, pivot_cols, False
    return aug[:r], pivot_cols, True


def _canonical(row: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Scale by the first nonzero magnitude so duplicates collapse."""
    for a in row:
        if a != 0:
            scale = abs(a)
            if scale != 1:
                return tuple(x / scale for x in row)
            return row
    return row


def feasible_nonnegative(
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    max_rows: int = DEFAULT_ROW_CAP,
) -> tuple[bool, list[Fraction] | None]:
    """Decide ``A x = b, x >= 0`` exactly; return (feasible, witness).

    The witness, present iff feasible, satisfies the system exactly (this
    is asserted before returning).
    """
    n = len(rows[0]) if rows else 0
    if not rows:
        return True, []
    aug, pivot_cols, consistent = _gauss_jordan(rows, rhs)
    if not consistent:
        return False, None

    free_cols = [c for c in range(n) if c not in set(pivot_cols)]
    col_to_free = {c: k for k, c in enumerate(free_cols)}
    m = len(free_cols)

    # One inequality per variable x_v >= 0, expressed over the free
    # parameters t as  const + sum(coeff_k * t_k) >= 0.
    ineqs: set[tuple[Fraction, ...]] = set()
    for v in range(n):
        if v in col_to_free:
            row = [ZERO] * m + [ZERO]
            row[col_to_free[v]] = ONE
        else:
            i = pivot_cols.index(v)
            row = [ZERO] * m + [aug[i][n]]
            for c in free_cols:
                if aug[i][c] != 0:
                    row[col_to_free[c]] = -aug[i][c]
        ineqs.add(_canonical(tuple(row)))

    def constants_hold(system: set[tuple[Fraction, ...]]) -> bool:
        return all(
            row[-1] >= 0 for row in system if all(a == 0 for a in row[:-1])
        )

    if not constants_hold(ineqs):
        return False, None

    # Fourier-Motzkin, eliminating the variable with the cheapest
    # pos x neg pairing first; snapshots feed back-substitution.
    remaining = list(range(m))
    snapshots: list[tuple[int, list[tuple[Fraction, ...]]]] = []
    current = ineqs
    while remaining:
        counts = []
        for k in remaining:
            pos = sum(1 for row in current if row[k] > 0)
            neg = sum(1 for row in current if row[k] < 0)
            counts.append((pos * neg, k))
        _, k = min(counts)
        remaining.remove(k)
        snapshots.append((k, sorted(current)))
        pos_rows = [row for row in current if row[k] > 0]
        neg_rows = [row for row in current if row[k] < 0]
        nxt = {row for row in current if row[k] == 0}
        for p in pos_rows:
            for q in neg_rows:
                combined = tuple(
                    (-q[k]) * a + p[k] * b for a, b in zip(p, q)
                )
                if any(a != 0 for a in combined[:-1]):
                    nxt.add(_canonical(combined))
                elif combined[-1] < 0:
                    return False, None
        if len(nxt) > max_rows:
            raise EliminationLimitError(len(nxt))
        current = nxt
        if not constants_hold(current):
            return False, None

    # Feasible; choose parameter values by walking the snapshots backward.
    t: dict[int, Fraction] = {}
    for k, system in reversed(snapshots):
        lower: Fraction | None = None
        upper: Fraction | None = None
        for row in system:
            c = row[k]
            if c == 0:
                continue
            rest = row[-1] + sum(
                row[j] * t[j] for j in t if row[j] != 0
            )
            bound = -rest / c
            if c > 0:
                lower = bound if lower is None else max(lower, bound)
            else:
                upper = bound if upper is None else min(upper, bound)
        if lower is None and upper is None:
            t[k] = ZERO
        elif lower is None:
            t[k] = min(ZERO, upper)
        elif upper is None:
            t[k] = max(ZERO, lower)
        elif lower <= 0 <= upper:
            t[k] = ZERO
        else:
            t[k] = (lower + upper) / 2

    x = [ZERO] * n
    for c in free_cols:
        x[c] = t[col_to_free[c]]
    for i, c in enumerate(pivot_cols):
        x[c] = aug[i][n] - sum(
            aug[i][f] * x[f] for f in free_cols if aug[i][f] != 0
        )

    for v in range(n):
        if x[v] < 0:
            raise AssertionError("internal error: elimination witness is negative")
    for row, b in zip(rows, rhs):
        if sum((a * xv for a, xv in zip(row, x)), ZERO) != b:
            raise AssertionError("internal error: elimination witness mismatch")
    return True, x
