"""Systems of random variables indexed by (content, context).

A *content* names a measured quantity; a *context* is the complete
condition under which recordings are made.  Each (content, context) pair
is a random variable of its own.  Variables that share a context are
jointly distributed inside a :class:`ContextBlock`; variables in
different contexts carry no joint distribution, so a :class:`System`
stores per-context blocks and nothing across them.  Same-content
variables from different contexts form a :class:`Connection`, the locus
of equality queries handled by the coupling engine.

All probabilities are exact rationals.  Systems are immutable after
construction and safe to share across threads.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, NamedTuple

from .rationals import format_rational, parse_rational

__all__ = [
    "VariableId",
    "ContextBlock",
    "System",
    "Connection",
    "ConnectionMismatch",
    "ConsistencyReport",
    "Violation",
    "InvalidSystemError",
    "validate_system",
    "loads_system",
    "load_system",
    "save_system",
]

OUTCOME_SEPARATOR = ","


class VariableId(NamedTuple):
    """A random variable, identified by what it measures and where."""

    content: str
    context: str

    def __str__(self) -> str:
        return f"{self.content}@{self.context}"


@dataclass(frozen=True)
class Violation:
    """One broken invariant, located within the offending input."""

    location: str
    message: str


class InvalidSystemError(ValueError):
    """Raised by :func:`validate_system`; carries every violation found."""

    def __init__(self, violations: Iterable[Violation]):
        self.violations = tuple(violations)
        detail = "; ".join(f"{v.location}: {v.message}" for v in self.violations)
        super().__init__(f"invalid system: {detail}")


@dataclass(frozen=True)
class ContextBlock:
    """The jointly distributed variables of one context, with exact pmf.

    ``pmf`` maps joint-outcome tuples (aligned with ``variables``) to
    probabilities; zero-probability outcomes are omitted.
    """

    context: str
    variables: tuple[VariableId, ...]
    pmf: Mapping[tuple[str, ...], Fraction]

    def probability(self, outcome: tuple[str, ...]) -> Fraction:
        return self.pmf.get(outcome, Fraction(0))

    def variable_position(self, variable: VariableId) -> int:
        return self.variables.index(variable)

    def project(self, positions: tuple[int, ...]) -> dict[tuple[str, ...], Fraction]:
        """Marginal pmf onto the given coordinate positions, zeros omitted."""
        out: dict[tuple[str, ...], Fraction] = {}
        for outcome, p in self.pmf.items():
            key = tuple(outcome[i] for i in positions)
            out[key] = out.get(key, Fraction(0)) + p
        return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class Connection:
    """All variables sharing one content, one per context it appears in."""

    content: str
    variables: tuple[VariableId, ...]

    @property
    def contexts(self) -> tuple[str, ...]:
        return tuple(v.context for v in self.variables)

    def arity(self) -> int:
        return len(self.variables)


@dataclass(frozen=True)
class ConnectionMismatch:
    """A connection whose member marginals differ, with the marginals."""

    content: str
    marginals: tuple[tuple[str, tuple[tuple[str, Fraction], ...]], ...]


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    failures: tuple[ConnectionMismatch, ...]


@dataclass(frozen=True)
class System:
    """A full collection of context blocks over shared contents.

    ``contents`` maps each content id to its outcome alphabet (shared by
    every context the content appears in, so cross-context equality is
    meaningful).  ``blocks`` is aligned with ``contexts``.  ``provenance``
    is generator metadata; it is carried through serialization but does
    not participate in equality.
    """

    contents: Mapping[str, tuple[str, ...]]
    contexts: tuple[str, ...]
    blocks: tuple[ContextBlock, ...]
    provenance: Mapping[str, Any] | None = field(default=None, compare=False)

    def block(self, context: str) -> ContextBlock:
        for b in self.blocks:
            if b.context == context:
                return b
        raise KeyError(f"unknown context: {context!r}")

    def alphabet(self, content: str) -> tuple[str, ...]:
        try:
            return self.contents[content]
        except KeyError:
            raise KeyError(f"unknown content: {content!r}") from None

    def variables(self) -> tuple[VariableId, ...]:
        """The roster: block variables in declared context and block order."""
        return tuple(v for b in self.blocks for v in b.variables)

    def assignment_count(self) -> int:
        """Number of joint outcome assignments across the whole roster."""
        n = 1
        for v in self.variables():
            n *= len(self.contents[v.content])
        return n

    def marginal(self, variable: VariableId) -> dict[str, Fraction]:
        """Exact within-block marginal of one variable, over its alphabet."""
        variable = VariableId(*variable)
        b = self.block(variable.context)
        if variable not in b.variables:
            raise KeyError(f"unknown variable: {variable}")
        pos = b.variable_position(variable)
        out = {label: Fraction(0) for label in self.contents[variable.content]}
        for outcome, p in b.pmf.items():
            out[outcome[pos]] += p
        return out

    def connections(self) -> tuple[Connection, ...]:
        """One connection per content in >= 2 contexts; deterministic order.

        Connections are sorted by content id, members by context id.
        Contents appearing in a single context are degenerate and skipped.
        """
        by_content: dict[str, list[VariableId]] = {}
        for v in self.variables():
            by_content.setdefault(v.content, []).append(v)
        out = []
        for content in sorted(by_content):
            members = sorted(by_content[content], key=lambda v: v.context)
            if len(members) >= 2:
                out.append(Connection(content, tuple(members)))
        return tuple(out)

    def connection(self, content: str) -> Connection:
        for c in self.connections():
            if c.content == content:
                return c
        raise KeyError(f"no connection for content {content!r}")

    def consistency_report(self) -> ConsistencyReport:
        """Check that every connection's members share one marginal.

        Marginal equality is exact rational equality.  Inconsistent
        systems are legitimate (the content is directly influenced by its
        context), so this is a query, not a validity condition.
        """
        failures = []
        for conn in self.connections():
            margs = [(v.context, self.marginal(v)) for v in conn.variables]
            first = margs[0][1]
            if any(m != first for _, m in margs[1:]):
                failures.append(
                    ConnectionMismatch(
                        conn.content,
                        tuple((ctx, tuple(sorted(m.items()))) for ctx, m in margs),
                    )
                )
        return ConsistencyReport(not failures, tuple(failures))

    def is_consistently_connected(self) -> bool:
        return self.consistency_report().consistent

    def to_json_dict(self) -> dict[str, Any]:
        """Canonical serialization; probabilities in lowest terms."""
        blocks = []
        for b in self.blocks:
            order = [
                {label: i for i, label in enumerate(self.contents[v.content])}
                for v in b.variables
            ]
            keys = sorted(
                b.pmf, key=lambda k: tuple(order[i][s] for i, s in enumerate(k))
            )
            blocks.append(
                {
                    "context": b.context,
                    "variables": [{"content": v.content} for v in b.variables],
                    "pmf": {
                        OUTCOME_SEPARATOR.join(k): format_rational(b.pmf[k])
                        for k in keys
                    },
                }
            )
        out: dict[str, Any] = {
            "contents": {c: list(a) for c, a in self.contents.items()},
            "contexts": list(self.contexts),
            "blocks": blocks,
        }
        if self.provenance is not None:
            out["provenance"] = dict(self.provenance)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)


def validate_system(raw: Mapping[str, Any]) -> System:
    """Build a :class:`System` from an untrusted description.

    Checks every type invariant and raises :class:`InvalidSystemError`
    listing all violations with their locations; a valid description
    returns the immutable ``System``.  Accepts the JSON file schema:
    ``contents`` (id -> alphabet list), ``contexts`` (id list), and
    ``blocks`` (context, variables, pmf).  Probabilities may be "p/q"
    or decimal strings.
    """
    violations: list[Violation] = []

    def bad(location: str, message: str) -> None:
        violations.append(Violation(location, message))

    if not isinstance(raw, Mapping):
        raise InvalidSystemError([Violation("$", "system description must be an object")])

    contents: dict[str, tuple[str, ...]] = {}
    raw_contents = raw.get("contents")
    if not isinstance(raw_contents, Mapping) or not raw_contents:
        bad("contents", "missing or empty 'contents' object")
        raw_contents = {}
    for cid, alphabet in raw_contents.items():
        loc = f"contents[{cid!r}]"
        if not isinstance(cid, str) or not cid:
            bad(loc, "content id must be a non-empty string")
            continue
        if not isinstance(alphabet, (list, tuple)) or not alphabet:
            bad(loc, "alphabet must be a non-empty list of outcome labels")
            continue
        labels = []
        ok = True
        for label in alphabet:
            if not isinstance(label, str) or not label:
                bad(loc, f"outcome label {label!r} must be a non-empty string")
                ok = False
            elif OUTCOME_SEPARATOR in label:
                bad(loc, f"outcome label {label!r} may not contain {OUTCOME_SEPARATOR!r}")
                ok = False
            else:
                labels.append(label)
        if ok and len(set(labels)) != len(labels):
            bad(loc, "outcome labels must be distinct")
            ok = False
        if ok:
            contents[cid] = tuple(labels)

    contexts: list[str] = []
    raw_contexts = raw.get("contexts")
    if not isinstance(raw_contexts, (list, tuple)) or not raw_contexts:
        bad("contexts", "missing or empty 'contexts' list")
        raw_contexts = []
    for ctx in raw_contexts:
        if not isinstance(ctx, str) or not ctx:
            bad("contexts", f"context id {ctx!r} must be a non-empty string")
        elif ctx in contexts:
            bad("contexts", f"duplicate context id {ctx!r}")
        else:
            contexts.append(ctx)

    raw_blocks = raw.get("blocks")
    if not isinstance(raw_blocks, (list, tuple)):
        bad("blocks", "missing 'blocks' list")
        raw_blocks = []

    blocks_by_context: dict[str, ContextBlock] = {}
    for i, raw_block in enumerate(raw_blocks):
        loc = f"blocks[{i}]"
        if not isinstance(raw_block, Mapping):
            bad(loc, "block must be an object")
            continue
        ctx = raw_block.get("context")
        if not isinstance(ctx, str) or ctx not in contexts:
            bad(loc, f"unknown context reference {ctx!r}")
            continue
        loc = f"blocks[{ctx!r}]"
        if ctx in blocks_by_context:
            bad(loc, "more than one block for this context")
            continue

        raw_vars = raw_block.get("variables")
        if not isinstance(raw_vars, (list, tuple)) or not raw_vars:
            bad(loc, "block must declare a non-empty 'variables' list")
            continue
        variables: list[VariableId] = []
        vars_ok = True
        for rv in raw_vars:
            cid = rv.get("content") if isinstance(rv, Mapping) else None
            if not isinstance(cid, str) or cid not in contents:
                bad(loc, f"variable references unknown content {cid!r}")
                vars_ok = False
            elif any(v.content == cid for v in variables):
                bad(loc, f"duplicate variable: content {cid!r} appears twice in one context")
                vars_ok = False
            else:
                variables.append(VariableId(cid, ctx))
        if not vars_ok:
            continue

        raw_pmf = raw_block.get("pmf")
        if not isinstance(raw_pmf, Mapping):
            bad(loc, "block must declare a 'pmf' object")
            continue
        alphabets = [contents[v.content] for v in variables]
        pmf: dict[tuple[str, ...], Fraction] = {}
        seen: set[tuple[str, ...]] = set()
        total = Fraction(0)
        pmf_ok = True
        for key, value in raw_pmf.items():
            outcome = tuple(str(key).split(OUTCOME_SEPARATOR))
            if len(outcome) != len(variables):
                bad(loc, f"pmf key {key!r} has arity {len(outcome)}, expected {len(variables)}")
                pmf_ok = False
                continue
            label_ok = True
            for pos, label in enumerate(outcome):
                if label not in alphabets[pos]:
                    bad(
                        loc,
                        f"pmf key {key!r}: label {label!r} not in alphabet of "
                        f"content {variables[pos].content!r}",
                    )
                    label_ok = False
            if not label_ok:
                pmf_ok = False
                continue
            try:
                p = parse_rational(value)
            except ValueError as exc:
                bad(loc, f"pmf[{key!r}]: {exc}")
                pmf_ok = False
                continue
            if p < 0:
                bad(loc, f"pmf[{key!r}] is negative: {format_rational(p)}")
                pmf_ok = False
                continue
            if outcome in seen:
                bad(loc, f"duplicate pmf key {key!r}")
                pmf_ok = False
                continue
            seen.add(outcome)
            total += p
            if p != 0:
                pmf[outcome] = p
        if pmf_ok and total != 1:
            bad(loc, f"pmf not normalized: sums to {format_rational(total)}")
            pmf_ok = False
        if pmf_ok:
            blocks_by_context[ctx] = ContextBlock(ctx, tuple(variables), pmf)

    for ctx in contexts:
        if ctx not in blocks_by_context and not any(
            v.location.startswith(f"blocks[{ctx!r}]") for v in violations
        ):
            bad(f"contexts[{ctx!r}]", "context has no block")

    used = {v.content for b in blocks_by_context.values() for v in b.variables}
    for cid in contents:
        if cid not in used and len(blocks_by_context) == len(contexts):
            bad(f"contents[{cid!r}]", "content appears in no context")

    if violations:
        raise InvalidSystemError(violations)

    provenance = raw.get("provenance")
    if provenance is not None and not isinstance(provenance, Mapping):
        provenance = None
    return System(
        contents=contents,
        contexts=tuple(contexts),
        blocks=tuple(blocks_by_context[c] for c in contexts),
        provenance=dict(provenance) if provenance is not None else None,
    )


def loads_system(text: str) -> System:
    """Parse a JSON string; JSON errors propagate as ``json.JSONDecodeError``."""
    return validate_system(json.loads(text))


def load_system(path: str) -> System:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_system(handle.read())


def save_system(system: System, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(system.to_json())
        handle.write("\n")
