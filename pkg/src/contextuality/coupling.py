"""Coupling existence and optimization over context-indexed systems.

A coupling of a system is a single joint pmf over every variable in the
roster whose projection onto each context block reproduces that block
exactly.  No coupling is privileged: the set of all of them is a polytope
with one coordinate per global outcome assignment, and the questions this
module answers are feasibility and linear optimization over it:

* :func:`any_coupling` / :func:`product_coupling` -- unconditional
  existence, with the independent-blocks coupling as constructive witness;
* :func:`identity_coupling_feasible` -- is there a coupling making every
  connection's members equal with probability 1?  Decided on the reduced
  polytope with one coordinate per assignment of outcomes to contents;
* :func:`max_connection_equality` -- the largest Pr[X = Y] for one
  pairwise connection in isolation (closed form, 1 minus total variation);
* :func:`max_total_connection_equality` -- the largest jointly achievable
  sum of connection equality probabilities; a strict shortfall against
  the per-connection maxima is the contextuality criterion used here;
* :func:`constrained_coupling_feasible` -- existence under lower bounds
  on chosen connection equality probabilities;
* :func:`brute_force_identity` -- independent oracle for the identity
  query, enumerating deterministic content assignments and deciding the
  mixture system by exact elimination instead of the simplex.

Everything is exact; sizes are guarded rather than degraded.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Sequence

from .elimination import feasible_nonnegative
from .rationals import format_rational
from .simplex import LinearConstraint, LinearProgram, solve_lp
from .system import Connection, System

__all__ = [
    "DEFAULT_VAR_CAP",
    "DEFAULT_BRUTE_FORCE_CAP",
    "GuardExceededError",
    "ConnectionArityError",
    "Coupling",
    "FeasibilityResult",
    "TotalEqualityResult",
    "build_polytope",
    "build_identity_polytope",
    "enumerate_content_assignments",
    "any_coupling",
    "product_coupling",
    "identity_coupling_feasible",
    "max_connection_equality",
    "max_total_connection_equality",
    "constrained_coupling_feasible",
    "brute_force_identity",
]

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_VAR_CAP = 10_000_000
DEFAULT_BRUTE_FORCE_CAP = 100_000


class GuardExceededError(RuntimeError):
    """The requested construction is larger than the configured cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what} needs {count} variables, above the cap of {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class ConnectionArityError(ValueError):
    def __init__(self, connection: Connection):
        super().__init__(
            f"connection {connection.content!r} spans {connection.arity()} contexts; "
            "equality-probability operations support exactly 2"
        )
        self.connection = connection


@dataclass(frozen=True)
class Coupling:
    """A joint pmf over the whole roster, sparse over nonzero atoms.

    Atom keys are outcome tuples aligned with ``system.variables()``.
    """

    system: System
    pmf: Mapping[tuple[str, ...], Fraction]

    def total(self) -> Fraction:
        return sum(self.pmf.values(), ZERO)

    def block_projection(self, context: str) -> dict[tuple[str, ...], Fraction]:
        roster = self.system.variables()
        block = self.system.block(context)
        positions = tuple(roster.index(v) for v in block.variables)
        out: dict[tuple[str, ...], Fraction] = {}
        for atom, p in self.pmf.items():
            key = tuple(atom[i] for i in positions)
            out[key] = out.get(key, ZERO) + p
        return {k: v for k, v in out.items() if v != 0}

    def matches_system(self) -> bool:
        """Exact marginal soundness: every block pmf is reproduced."""
        if any(p < 0 for p in self.pmf.values()) or self.total() != 1:
            return False
        for block in self.system.blocks:
            projected = self.block_projection(block.context)
            keys = projected.keys() | block.pmf.keys()
            if any(projected.get(k, ZERO) != block.probability(k) for k in keys):
                return False
        return True

    def connection_equality(self, connection: Connection) -> Fraction:
        """Pr[all members of the connection are equal] under this coupling."""
        roster = self.system.variables()
        positions = [roster.index(v) for v in connection.variables]
        return sum(
            (
                p
                for atom, p in self.pmf.items()
                if len({atom[i] for i in positions}) == 1
            ),
            ZERO,
        )

    def to_json_dict(self) -> dict:
        return {
            "atoms": {
                ",".join(atom): format_rational(p)
                for atom, p in sorted(self.pmf.items())
            }
        }


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a coupling existence query.

    Feasible results carry a witness coupling satisfying all constraints
    exactly.  Infeasible results from the simplex route carry a Farkas
    dual vector aligned with the rows of the underlying program (the
    elimination oracle proves infeasibility without producing one).
    """

    status: Literal["feasible", "infeasible"]
    witness: Coupling | None = None
    certificate: tuple[Fraction, ...] | None = None
    detail: str | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


@dataclass(frozen=True)
class TotalEqualityResult:
    optimum: Fraction
    witness: Coupling


def _roster_alphabets(system: System) -> list[tuple[str, ...]]:
    return [system.contents[v.content] for v in system.variables()]


def _count(alphabets: Iterable[tuple[str, ...]]) -> int:
    n = 1
    for a in alphabets:
        n *= len(a)
    return n


def _block_positions(system: System) -> list[tuple[int, ...]]:
    roster = system.variables()
    index = {v: i for i, v in enumerate(roster)}
    return [tuple(index[v] for v in b.variables) for b in system.blocks]


def _block_outcome_order(system: System, block_index: int) -> list[tuple[str, ...]]:
    block = system.blocks[block_index]
    alphabets = [system.contents[v.content] for v in block.variables]
    return list(itertools.product(*alphabets))


def _marginal_rows(
    system: System,
    num_vars: int,
    restriction_of: Sequence[Sequence[tuple[str, ...]]],
) -> tuple[LinearConstraint, ...]:
    """Shared row builder for the full and reduced polytopes.

    ``restriction_of[b][j]`` is column j's joint outcome in block b.  Rows
    come out as one normalization row plus, per block, every joint outcome
    but the last; the dropped rows are implied by the rest, so the matrix
    carries no redundancy from the per-block totals.
    """
    rows = [
        LinearConstraint({j: ONE for j in range(num_vars)}, ONE, "normalization")
    ]
    for b, block in enumerate(system.blocks):
        order = _block_outcome_order(system, b)
        members: dict[tuple[str, ...], dict[int, Fraction]] = {
            outcome: {} for outcome in order
        }
        for j in range(num_vars):
            members[restriction_of[b][j]][j] = ONE
        for outcome in order[:-1]:
            rows.append(
                LinearConstraint(
                    members[outcome],
                    block.probability(outcome),
                    f"block {block.context} outcome {','.join(outcome)}",
                )
            )
    return tuple(rows)


def build_polytope(system: System, var_cap: int = DEFAULT_VAR_CAP) -> LinearProgram:
    """The coupling polytope: one nonnegative variable per global assignment.

    Feasible points are exactly the couplings of the system.  Refuses when
    the assignment count exceeds ``var_cap``.
    """
    alphabets = _roster_alphabets(system)
    count = _count(alphabets)
    if count > var_cap:
        raise GuardExceededError("coupling polytope", count, var_cap)
    positions = _block_positions(system)
    restriction: list[list[tuple[str, ...]]] = [[] for _ in system.blocks]
    for assignment in itertools.product(*alphabets):
        for b, pos in enumerate(positions):
            restriction[b].append(tuple(assignment[i] for i in pos))
    return LinearProgram(count, _marginal_rows(system, count, restriction))


def enumerate_content_assignments(system: System) -> list[tuple[str, ...]]:
    """All deterministic assignments of one outcome per content, in
    declared content order.  These are the vertices of the identity
    coupling polytope."""
    return list(itertools.product(*system.contents.values()))


def build_identity_polytope(
    system: System, var_cap: int = DEFAULT_VAR_CAP
) -> LinearProgram:
    """The reduced polytope for identity-coupling queries.

    One variable per assignment of a single outcome to every content;
    forcing same-content variables equal collapses the roster to the
    content set, which keeps this program exponentially smaller than a
    diagonal restriction of the full polytope.
    """
    content_order = list(system.contents)
    count = _count(system.contents.values())
    if count > var_cap:
        raise GuardExceededError("identity coupling polytope", count, var_cap)
    content_pos = {c: i for i, c in enumerate(content_order)}
    block_content_positions = [
        tuple(content_pos[v.content] for v in b.variables) for b in system.blocks
    ]
    restriction: list[list[tuple[str, ...]]] = [[] for _ in system.blocks]
    for assignment in itertools.product(*system.contents.values()):
        for b, pos in enumerate(block_content_positions):
            restriction[b].append(tuple(assignment[i] for i in pos))
    return LinearProgram(count, _marginal_rows(system, count, restriction))


def product_coupling(system: System, var_cap: int = DEFAULT_VAR_CAP) -> Coupling:
    """The coupling making distinct context blocks independent."""
    count = _count(_roster_alphabets(system))
    if count > var_cap:
        raise GuardExceededError("coupling polytope", count, var_cap)
    positions = _block_positions(system)
    roster_len = len(system.variables())
    supports = [sorted(b.pmf.items()) for b in system.blocks]
    pmf: dict[tuple[str, ...], Fraction] = {}
    for combo in itertools.product(*supports):
        atom = [""] * roster_len
        p = ONE
        for (outcome, prob), pos in zip(combo, positions):
            p *= prob
            for i, label in zip(pos, outcome):
                atom[i] = label
        pmf[tuple(atom)] = p
    return Coupling(system, pmf)


def any_coupling(system: System, var_cap: int = DEFAULT_VAR_CAP) -> FeasibilityResult:
    """Couplings always exist; returns the product coupling as witness."""
    witness = product_coupling(system, var_cap)
    if not witness.matches_system():
        raise AssertionError("internal error: product coupling failed projection")
    return FeasibilityResult("feasible", witness=witness)


def _inflate_content_assignment(
    system: System, weights: Mapping[tuple[str, ...], Fraction]
) -> Coupling:
    """Lift a pmf over content assignments to the diagonal of the full
    polytope: every variable takes its content's assigned outcome."""
    content_pos = {c: i for i, c in enumerate(system.contents)}
    roster = system.variables()
    pmf = {
        tuple(assignment[content_pos[v.content]] for v in roster): w
        for assignment, w in weights.items()
        if w != 0
    }
    return Coupling(system, pmf)


def _inconsistency_note(system: System) -> str | None:
    report = system.consistency_report()
    if report.consistent:
        return None
    names = ", ".join(f.content for f in report.failures)
    return (
        f"members of connection(s) {names} have unequal marginals, "
        "so no coupling can make them equal almost surely"
    )


def identity_coupling_feasible(
    system: System, var_cap: int = DEFAULT_VAR_CAP
) -> FeasibilityResult:
    """Decide existence of a coupling with every connection equal a.s.

    Consistent connectedness is not required: inconsistent systems come
    back infeasible immediately, with the offending connections named in
    ``detail``.  Feasible results carry the witness inflated back to a
    full coupling supported on the diagonal.
    """
    lp = build_identity_polytope(system, var_cap)
    result = solve_lp(lp)
    if not result.feasible:
        return FeasibilityResult(
            "infeasible",
            certificate=result.certificate,
            detail=_inconsistency_note(system),
        )
    assignments = enumerate_content_assignments(system)
    weights = {assignments[j]: w for j, w in result.witness.items()}
    witness = _inflate_content_assignment(system, weights)
    if not witness.matches_system():
        raise AssertionError("internal error: identity witness failed projection")
    return FeasibilityResult("feasible", witness=witness)


def max_connection_equality(system: System, connection: Connection) -> Fraction:
    """Largest Pr[X = Y] over couplings of one pairwise connection.

    Considered in isolation this is a two-marginal transportation problem
    whose optimum has the closed form 1 - TV(p, q) = sum_v min(p(v), q(v));
    computed exactly.
    """
    if connection.arity() != 2:
        raise ConnectionArityError(connection)
    first, second = connection.variables
    p = system.marginal(first)
    q = system.marginal(second)
    return sum((min(p[v], q[v]) for v in p), ZERO)


def _equality_positions(
    system: System, connections: Sequence[Connection]
) -> list[tuple[int, ...]]:
    roster = system.variables()
    index = {v: i for i, v in enumerate(roster)}
    return [tuple(index[v] for v in c.variables) for c in connections]


def max_total_connection_equality(
    system: System, var_cap: int = DEFAULT_VAR_CAP
) -> TotalEqualityResult:
    """Maximize the summed connection equality probabilities jointly.

    The optimum never exceeds the sum of the per-connection maxima; the
    system is contextual in the sense used here exactly when it falls
    strictly short of that sum.
    """
    connections = system.connections()
    for c in connections:
        if c.arity() != 2:
            raise ConnectionArityError(c)
    lp = build_polytope(system, var_cap)
    alphabets = _roster_alphabets(system)
    positions = _equality_positions(system, connections)
    objective: dict[int, Fraction] = {}
    for j, assignment in enumerate(itertools.product(*alphabets)):
        score = sum(
            1 for pos in positions if assignment[pos[0]] == assignment[pos[1]]
        )
        if score:
            objective[j] = Fraction(score)
    lp = LinearProgram(lp.num_vars, lp.equalities, objective=objective)
    result = solve_lp(lp)
    if not result.feasible:
        raise AssertionError("internal error: coupling polytope came back empty")
    assignments = list(itertools.product(*alphabets))
    pmf = {assignments[j]: w for j, w in result.witness.items()}
    witness = Coupling(system, pmf)
    if not witness.matches_system():
        raise AssertionError("internal error: optimal witness failed projection")
    return TotalEqualityResult(result.optimum, witness)


def constrained_coupling_feasible(
    system: System,
    demands: Sequence[tuple[Connection, Fraction]],
    var_cap: int = DEFAULT_VAR_CAP,
) -> FeasibilityResult:
    """Decide existence of a coupling meeting equality lower bounds.

    Each demand constrains one pairwise connection: Pr[members equal]
    must be at least the given bound in [0, 1].
    """
    for connection, bound in demands:
        if connection.arity() != 2:
            raise ConnectionArityError(connection)
        if not 0 <= bound <= 1:
            raise ValueError(
                f"malformed bound {format_rational(Fraction(bound))} for "
                f"connection {connection.content!r}: must lie in [0, 1]"
            )
    lp = build_polytope(system, var_cap)
    alphabets = _roster_alphabets(system)
    positions = _equality_positions(system, [c for c, _ in demands])
    coeff_lists: list[dict[int, Fraction]] = [{} for _ in demands]
    for j, assignment in enumerate(itertools.product(*alphabets)):
        for k, pos in enumerate(positions):
            if assignment[pos[0]] == assignment[pos[1]]:
                coeff_lists[k][j] = ONE
    inequalities = tuple(
        LinearConstraint(
            coeff_lists[k],
            Fraction(bound),
            f"Pr[equal on {connection.content}] >= {format_rational(Fraction(bound))}",
        )
        for k, (connection, bound) in enumerate(demands)
    )
    lp = LinearProgram(lp.num_vars, lp.equalities, inequalities)
    result = solve_lp(lp)
    if not result.feasible:
        return FeasibilityResult("infeasible", certificate=result.certificate)
    assignments = list(itertools.product(*alphabets))
    pmf = {assignments[j]: w for j, w in result.witness.items()}
    witness = Coupling(system, pmf)
    if not witness.matches_system():
        raise AssertionError("internal error: constrained witness failed projection")
    return FeasibilityResult("feasible", witness=witness)


def brute_force_identity(
    system: System, assignment_cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> FeasibilityResult:
    """Independent oracle for :func:`identity_coupling_feasible`.

    Enumerates every deterministic content assignment (the vertices of
    the identity polytope) and decides by exact elimination whether some
    mixture of them reproduces all blocks.  Must agree with the simplex
    route on every system within its guard; shares no solver code with it.
    """
    count = _count(system.contents.values())
    if count > assignment_cap:
        raise GuardExceededError("identity vertex enumeration", count, assignment_cap)
    vertices = enumerate_content_assignments(system)
    content_pos = {c: i for i, c in enumerate(system.contents)}

    # All block rows (no deduplication here) with normalization appended
    # last: built differently from the LP route on purpose.
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for b, block in enumerate(system.blocks):
        positions = [content_pos[v.content] for v in block.variables]
        for outcome in _block_outcome_order(system, b):
            row = [
                ONE if tuple(vertex[i] for i in positions) == outcome else ZERO
                for vertex in vertices
            ]
            rows.append(row)
            rhs.append(block.probability(outcome))
    rows.append([ONE] * len(vertices))
    rhs.append(ONE)

    feasible, weights = feasible_nonnegative(rows, rhs)
    if not feasible:
        return FeasibilityResult(
            "infeasible",
            detail="decided by elimination over deterministic content assignments",
        )
    witness = _inflate_content_assignment(
        system, {v: w for v, w in zip(vertices, weights) if w != 0}
    )
    if not witness.matches_system():
        raise AssertionError("internal error: elimination witness failed projection")
    return FeasibilityResult(
        "feasible",
        witness=witness,
        detail="decided by elimination over deterministic content assignments",
    )
