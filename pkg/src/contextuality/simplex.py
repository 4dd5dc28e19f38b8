"""Exact rational simplex for coupling polytopes.

Solves ``max c.x  s.t.  E x = f,  G x >= h,  x >= 0`` exactly.  Pivoting
uses Bland's rule (smallest reduced-cost index enters; among minimum-
ratio rows the one whose basic variable has the smallest index leaves),
which guarantees termination and makes the returned vertex
deterministic.

Arithmetic is exact throughout: each tableau row is kept as integer
numerators over one positive denominator, reduced after every pivot, so
the hot loop is integer multiply-subtract instead of rational
normalization; ``fractions.Fraction`` appears only at the interface.

Phase 1 introduces one artificial variable per row and minimizes their
sum.  A positive phase-1 optimum certifies infeasibility; the simplex
multipliers of the final phase-1 basis form a Farkas certificate, which
is re-verified against the original constraint data by independent
arithmetic before being returned.  Feasible witnesses are re-verified
the same way.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping

__all__ = [
    "LinearConstraint",
    "LinearProgram",
    "LpResult",
    "LpError",
    "LpIterationLimitError",
    "LpUnboundedError",
    "solve_lp",
    "verify_feasible_point",
    "verify_infeasibility_certificate",
]

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_ITERATION_CAP = 200_000


class LpError(RuntimeError):
    pass


class LpIterationLimitError(LpError):
    def __init__(self, iterations: int):
        super().__init__(
            f"simplex exceeded the iteration cap after {iterations} pivots; "
            "raise max_iterations if the instance is genuinely this large"
        )
        self.iterations = iterations


class LpUnboundedError(LpError):
    def __init__(self) -> None:
        super().__init__("objective is unbounded over the feasible region")


@dataclass(frozen=True)
class LinearConstraint:
    """One row: ``sum(coeffs[j] * x[j]) (= or >=) rhs``, coeffs sparse."""

    coeffs: Mapping[int, Fraction]
    rhs: Fraction
    label: str = ""


@dataclass(frozen=True)
class LinearProgram:
    """Decision variables are nonnegative; ``objective`` is maximized.

    ``equalities`` hold with equality, ``inequalities`` in the ``>=``
    sense.  The coupling polytopes built elsewhere in this package only
    use 0/1 coefficients, but nothing here relies on that.
    """

    num_vars: int
    equalities: tuple[LinearConstraint, ...]
    inequalities: tuple[LinearConstraint, ...] = ()
    objective: Mapping[int, Fraction] | None = None

    @property
    def rows(self) -> tuple[LinearConstraint, ...]:
        return self.equalities + self.inequalities

    def row_labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.rows)


@dataclass(frozen=True)
class LpResult:
    """Outcome of :func:`solve_lp`.

    ``witness`` holds the nonzero coordinates of a feasible point (the
    optimal vertex when an objective was given, whose value is
    ``optimum``).  ``certificate`` is a Farkas dual vector aligned with
    ``lp.rows`` proving infeasibility.
    """

    feasible: bool
    witness: dict[int, Fraction] | None = None
    optimum: Fraction | None = None
    certificate: tuple[Fraction, ...] | None = None
    iterations: int = 0


def verify_feasible_point(lp: LinearProgram, x: Mapping[int, Fraction]) -> bool:
    """Check a point against all constraints by direct exact arithmetic."""
    if any(v < 0 for v in x.values()):
        return False
    for row in lp.equalities:
        if sum((row.coeffs[j] * x[j] for j in row.coeffs.keys() & x.keys()), ZERO) != row.rhs:
            return False
    for row in lp.inequalities:
        if sum((row.coeffs[j] * x[j] for j in row.coeffs.keys() & x.keys()), ZERO) < row.rhs:
            return False
    return True


def verify_infeasibility_certificate(
    lp: LinearProgram, dual: tuple[Fraction, ...]
) -> bool:
    """Check a Farkas certificate against the original constraint data.

    With ``u`` split over equality rows (free sign) and ``>=`` rows
    (nonnegative), infeasibility of the system is certified by
    ``u.A <= 0`` columnwise together with ``u.rhs > 0``.
    """
    rows = lp.rows
    if len(dual) != len(rows):
        return False
    n_eq = len(lp.equalities)
    if any(u < 0 for u in dual[n_eq:]):
        return False
    column_sums: dict[int, Fraction] = {}
    for u, row in zip(dual, rows):
        if u == 0:
            continue
        for j, a in row.coeffs.items():
            column_sums[j] = column_sums.get(j, ZERO) + u * a
    if any(s > 0 for s in column_sums.values()):
        return False
    return sum((u * r.rhs for u, r in zip(dual, rows)), ZERO) > 0


def _reduce_row(nums: list[int], den: int) -> int:
    """Divide a row's numerators and denominator by their common factor."""
    g = den
    for x in nums:
        if x:
            g = gcd(g, x)
            if g == 1:
                return den
    if g > 1:
        for j in range(len(nums)):
            nums[j] //= g
        den //= g
    return den


def solve_lp(lp: LinearProgram, max_iterations: int = DEFAULT_ITERATION_CAP) -> LpResult:
    """Exact two-phase simplex; see the module docstring for guarantees."""
    rows = lp.rows
    m = len(rows)
    n = lp.num_vars
    n_surplus = len(lp.inequalities)
    n_eq = len(lp.equalities)
    art0 = n + n_surplus  # first artificial column
    width = art0 + m + 1  # + rhs column

    # Integer tableau in standard form: row i holds value num[i][j]/den[i].
    # Inequality row k gets surplus column n+k with coefficient -1; rows
    # are sign-flipped to rhs >= 0 before the artificial identity goes in.
    num: list[list[int]] = []
    den: list[int] = []
    flips: list[int] = []
    for i, row in enumerate(rows):
        rhs = Fraction(row.rhs)
        scale = rhs.denominator
        coeffs = {}
        for j, a in row.coeffs.items():
            if not 0 <= j < n:
                raise ValueError(f"constraint {row.label!r} references column {j}")
            coeffs[j] = Fraction(a)
            scale = lcm(scale, coeffs[j].denominator)
        dense = [0] * width
        for j, a in coeffs.items():
            dense[j] = a.numerator * (scale // a.denominator)
        if i >= n_eq:
            dense[n + (i - n_eq)] = -scale
        dense[-1] = rhs.numerator * (scale // rhs.denominator)
        if dense[-1] < 0:
            dense = [-x for x in dense]
            flips.append(-1)
        else:
            flips.append(1)
        dense[art0 + i] = scale  # artificial coefficient 1
        num.append(dense)
        den.append(_reduce_row(dense, scale))

    basis = [art0 + i for i in range(m)]
    active = [True] * m
    iterations = 0

    obj_num = [0] * width
    obj_den = 1

    def pivot(r: int, c: int) -> None:
        nonlocal obj_den
        prow = num[r]
        if prow[c] < 0:
            for j in range(width):
                prow[j] = -prow[j]
        # the old denominator cancels: (prow/den)/(prow[c]/den) = prow/prow[c]
        den[r] = _reduce_row(prow, prow[c])
        d = den[r]
        for i in range(m):
            if i == r or not active[i]:
                continue
            other = num[i]
            f = other[c]
            if f:
                for j in range(width):
                    other[j] = other[j] * d - f * prow[j]
                den[i] = _reduce_row(other, den[i] * d)
        f = obj_num[c]
        if f:
            for j in range(width):
                obj_num[j] = obj_num[j] * d - f * prow[j]
            obj_den = _reduce_row(obj_num, obj_den * d)
        basis[r] = c

    def run_phase(allowed_end: int) -> None:
        """Bland's-rule minimization of the current reduced-cost row."""
        nonlocal iterations
        while True:
            col = -1
            for j in range(allowed_end):
                if obj_num[j] < 0:
                    col = j
                    break
            if col < 0:
                return
            # Ratios share a row's denominator: b_i/a_i = num[i][-1]/num[i][col].
            leave = -1
            best_rhs = best_piv = 0
            for i in range(m):
                if not active[i]:
                    continue
                a = num[i][col]
                if a > 0:
                    b = num[i][-1]
                    if (
                        leave < 0
                        or b * best_piv < best_rhs * a
                        or (b * best_piv == best_rhs * a and basis[i] < basis[leave])
                    ):
                        leave, best_rhs, best_piv = i, b, a
            if leave < 0:
                raise LpUnboundedError()
            pivot(leave, col)
            iterations += 1
            if iterations > max_iterations:
                raise LpIterationLimitError(iterations)

    # Phase 1: minimize the artificial sum.  Reduced costs of the
    # structural and surplus columns start at -(column sums over rows);
    # the artificial columns are basic, so their reduced costs start at 0.
    obj_den = 1
    for d in den:
        obj_den = lcm(obj_den, d)
    for i in range(m):
        factor = obj_den // den[i]
        row = num[i]
        for j in range(art0):
            obj_num[j] -= row[j] * factor
        obj_num[-1] -= row[-1] * factor
    obj_den = _reduce_row(obj_num, obj_den)
    run_phase(art0)
    if obj_num[-1] < 0:  # -z < 0, so the artificial sum z is positive
        # Simplex multipliers: the reduced cost of artificial i is
        # 1 - y_i, so y_i = 1 - obj[art0+i]; undo the row sign flips.
        certificate = tuple(
            (ONE - Fraction(obj_num[art0 + i], obj_den)) * flips[i] for i in range(m)
        )
        if not verify_infeasibility_certificate(lp, certificate):
            raise LpError("internal error: infeasibility certificate failed verification")
        return LpResult(False, certificate=certificate, iterations=iterations)

    # Drive remaining artificials out of the basis; an all-zero row is a
    # redundant constraint and is deactivated.
    for i in range(m):
        if active[i] and basis[i] >= art0:
            row = num[i]
            col = next((j for j in range(art0) if row[j] != 0), -1)
            if col < 0:
                active[i] = False
            else:
                pivot(i, col)

    optimum: Fraction | None = None
    if lp.objective is not None:
        # Phase 2: minimize -c.x over structural and surplus columns.
        cost = [ZERO] * art0
        for j, c in lp.objective.items():
            if not 0 <= j < n:
                raise ValueError(f"objective references column {j}")
            cost[j] = -Fraction(c)
        reduced = list(cost) + [ZERO] * (m + 1)
        for i in range(m):
            if not active[i]:
                continue
            f = cost[basis[i]] if basis[i] < art0 else ZERO
            if f != 0:
                row, d = num[i], den[i]
                for j in range(width):
                    if row[j]:
                        reduced[j] -= f * Fraction(row[j], d)
        obj_den = 1
        for value in reduced:
            obj_den = lcm(obj_den, value.denominator)
        for j in range(width):
            obj_num[j] = reduced[j].numerator * (obj_den // reduced[j].denominator)
        for j in range(art0, width - 1):
            obj_num[j] = 0  # artificials are barred from phase 2
        run_phase(art0)

    witness: dict[int, Fraction] = {}
    for i in range(m):
        if active[i] and basis[i] < n and num[i][-1]:
            witness[basis[i]] = Fraction(num[i][-1], den[i])
    if not verify_feasible_point(lp, witness):
        raise LpError("internal error: witness failed constraint verification")
    if lp.objective is not None:
        optimum = sum(
            (c * witness.get(j, ZERO) for j, c in lp.objective.items()), ZERO
        )
    return LpResult(True, witness=witness, optimum=optimum, iterations=iterations)
