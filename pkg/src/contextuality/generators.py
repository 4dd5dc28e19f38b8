"""Canonical system generators: singlet statistics, the PR box,
deterministic systems, and seeded random consistent systems.

Irrational correlations are quarantined at generation time: cosines are
rounded to the nearest rational with a caller-chosen denominator bound
(default 10**6) and everything downstream stays exact.  For angles that
are multiples of pi/12 the cosine is evaluated from its radical closed
form at 50 decimal digits before rounding, so the rounding bound is the
only error; other angles go through float cosine, whose 1e-16 relative
error is far below any useful bound.

Every generator returns a validated :class:`~contextuality.system.System`
with generation metadata under ``provenance``.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from random import Random
from typing import Mapping, Sequence

from .rationals import format_rational, parse_rational
from .system import System, validate_system

__all__ = [
    "Angle",
    "parse_angle",
    "cos_as_fraction",
    "Design",
    "two_by_two_design",
    "cyclic_design",
    "two_context_design",
    "singlet_system",
    "pr_box",
    "deterministic_system",
    "random_consistent_system",
]

PLUS = "+1"
MINUS = "-1"
BINARY = (PLUS, MINUS)

DEFAULT_PRECISION = 10**6


@dataclass(frozen=True)
class Angle:
    """An angle, exact when given as a rational multiple of pi.

    Differences of two exact angles stay exact; anything involving a
    float collapses to float radians.
    """

    pi_multiple: Fraction | None = None
    radians: float | None = None

    @classmethod
    def pi_times(cls, multiple: Fraction | int | str) -> "Angle":
        return cls(pi_multiple=parse_rational(multiple))

    @classmethod
    def from_radians(cls, value: float) -> "Angle":
        if value == 0:  # zero is exact in any representation
            return cls(pi_multiple=Fraction(0))
        return cls(radians=float(value))

    def minus(self, other: "Angle") -> "Angle":
        if self.pi_multiple is not None and other.pi_multiple is not None:
            return Angle(pi_multiple=self.pi_multiple - other.pi_multiple)
        return Angle(radians=self.to_radians() - other.to_radians())

    def to_radians(self) -> float:
        if self.pi_multiple is not None:
            return float(self.pi_multiple) * math.pi
        return self.radians

    def token(self) -> str:
        if self.pi_multiple is not None:
            return f"{format_rational(self.pi_multiple)} pi"
        return repr(self.radians)


def parse_angle(value: "Angle | int | float | str") -> Angle:
    """Accept "p/q pi" tokens, decimal-radian strings, or plain numbers."""
    if isinstance(value, Angle):
        return value
    if isinstance(value, (int, float)):
        return Angle.from_radians(float(value))
    if not isinstance(value, str):
        raise ValueError(f"cannot parse an angle from {type(value).__name__}")
    text = value.strip()
    if text.endswith("pi"):
        coefficient = text[:-2].strip().rstrip("*").strip()
        if coefficient in ("", "+"):
            return Angle.pi_times(1)
        if coefficient == "-":
            return Angle.pi_times(-1)
        return Angle.pi_times(parse_rational(coefficient))
    try:
        return Angle.from_radians(float(text))
    except ValueError:
        raise ValueError(f"not an angle token: {value!r}") from None


def _special_cosines() -> dict[int, Decimal]:
    """cos(k*pi/12) for k = 0..12, from radical closed forms."""
    with localcontext() as ctx:
        ctx.prec = 50
        sqrt2 = Decimal(2).sqrt()
        sqrt6 = Decimal(6).sqrt()
        half = Decimal(1) / 2
        table = {
            0: Decimal(1),
            1: (sqrt6 + sqrt2) / 4,
            2: Decimal(3).sqrt() / 2,
            3: sqrt2 / 2,
            4: half,
            5: (sqrt6 - sqrt2) / 4,
            6: Decimal(0),
        }
        for k in range(7, 13):
            table[k] = -table[12 - k]
        return table


_SPECIAL_COS = _special_cosines()


def cos_as_fraction(angle: Angle, precision: int = DEFAULT_PRECISION) -> Fraction:
    """Nearest rational with denominator <= ``precision`` to cos(angle)."""
    if precision < 1:
        raise ValueError(f"precision bound must be >= 1, got {precision}")
    if angle.pi_multiple is not None:
        t = angle.pi_multiple % 2
        if t > 1:
            t = 2 - t
        twelfths = t * 12
        if twelfths.denominator == 1:
            exact = _SPECIAL_COS[int(twelfths)]
            return Fraction(exact).limit_denominator(precision)
    return Fraction(math.cos(angle.to_radians())).limit_denominator(precision)


@dataclass(frozen=True)
class Design:
    """Which contents exist, their alphabets, and how contexts bundle them."""

    alphabets: Mapping[str, tuple[str, ...]]
    contexts: tuple[tuple[str, ...], ...]
    context_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.context_ids) != len(self.contexts):
            raise ValueError("one context id per context required")
        if len(set(self.context_ids)) != len(self.context_ids):
            raise ValueError("context ids must be distinct")
        for members in self.contexts:
            unknown = [c for c in members if c not in self.alphabets]
            if unknown:
                raise ValueError(f"context references unknown contents {unknown}")


def two_by_two_design(alphabet: tuple[str, str] = BINARY) -> Design:
    """Two settings per side, one context per cross-side pairing."""
    rows = ("A1", "A2")
    cols = ("B1", "B2")
    contexts = tuple((r, c) for r in rows for c in cols)
    return Design(
        alphabets={c: tuple(alphabet) for c in rows + cols},
        contexts=contexts,
        context_ids=tuple(f"{r}|{c}" for r, c in contexts),
    )


def cyclic_design(n: int, alphabet: tuple[str, ...] = BINARY) -> Design:
    """n contents in a ring; context i bundles content i with i+1 (mod n)."""
    if n < 2:
        raise ValueError("a cycle needs at least 2 contents")
    names = tuple(f"q{i + 1}" for i in range(n))
    contexts = tuple((names[i], names[(i + 1) % n]) for i in range(n))
    return Design(
        alphabets={c: tuple(alphabet) for c in names},
        contexts=contexts,
        context_ids=tuple(f"{a}|{b}" for a, b in contexts),
    )


def two_context_design(
    content: str = "X",
    context_ids: tuple[str, str] = ("c1", "c2"),
    alphabet: tuple[str, ...] = BINARY,
) -> Design:
    """A single content recorded under two conditions."""
    return Design(
        alphabets={content: tuple(alphabet)},
        contexts=((content,), (content,)),
        context_ids=tuple(context_ids),
    )


def _assemble(
    design: Design,
    pmfs: Sequence[Mapping[tuple[str, ...], Fraction]],
    provenance: Mapping,
) -> System:
    raw = {
        "contents": {c: list(a) for c, a in design.alphabets.items()},
        "contexts": list(design.context_ids),
        "blocks": [
            {
                "context": ctx_id,
                "variables": [{"content": c} for c in members],
                "pmf": {
                    ",".join(outcome): format_rational(p)
                    for outcome, p in pmf.items()
                    if p != 0
                },
            }
            for ctx_id, members, pmf in zip(design.context_ids, design.contexts, pmfs)
        ],
        "provenance": dict(provenance),
    }
    return validate_system(raw)


def singlet_system(
    alice: tuple["Angle | str | float", "Angle | str | float"],
    bob: tuple["Angle | str | float", "Angle | str | float"],
    visibility: "Fraction | int | str" = 1,
    precision: int = DEFAULT_PRECISION,
) -> System:
    """Two-particle singlet statistics at the given measurement angles.

    Block (i, j) carries Pr[a, b] = (1 + a*b*E_ij)/4 under the +1/-1
    encoding, with E_ij = -visibility * cos(alpha_i - beta_j).  The cosine
    is rounded to denominator <= ``precision`` and then scaled by the
    exact visibility, so scaling identities (for instance, the CHSH value
    at visibility v being exactly v times the value at 1) hold on the
    emitted rationals.  Marginals are uniform, so the output is always
    consistently connected.
    """
    v = parse_rational(visibility)
    if not 0 <= v <= 1:
        raise ValueError(f"visibility must lie in [0, 1], got {format_rational(v)}")
    alice_angles = tuple(parse_angle(a) for a in alice)
    bob_angles = tuple(parse_angle(b) for b in bob)
    design = two_by_two_design()
    pmfs = []
    expectations = []
    for r, c in design.contexts:
        a = alice_angles[int(r[1]) - 1]
        b = bob_angles[int(c[1]) - 1]
        e = -v * cos_as_fraction(a.minus(b), precision)
        expectations.append(e)
        pmfs.append(
            {
                (la, lb): (1 + sa * sb * e) / 4
                for la, sa in zip(BINARY, (1, -1))
                for lb, sb in zip(BINARY, (1, -1))
            }
        )
    provenance = {
        "generator": "singlet",
        "alice": [a.token() for a in alice_angles],
        "bob": [b.token() for b in bob_angles],
        "visibility": format_rational(v),
        "precision": precision,
        "rule": "Pr[a,b] = (1 + a*b*E)/4 with E = -visibility*cos(alpha - beta); "
        "cosine rounded to the nearest rational with denominator <= precision",
        "expectations": [format_rational(e) for e in expectations],
    }
    return _assemble(design, pmfs, provenance)


def pr_box() -> System:
    """The no-signaling box saturating the algebraic CHSH maximum of 4.

    Outcomes agree almost surely in three contexts and disagree almost
    surely in the fourth; all marginals are uniform.
    """
    design = two_by_two_design()
    half = Fraction(1, 2)
    pmfs = []
    for r, c in design.contexts:
        if (r, c) == ("A2", "B2"):
            pmfs.append({(PLUS, MINUS): half, (MINUS, PLUS): half})
        else:
            pmfs.append({(PLUS, PLUS): half, (MINUS, MINUS): half})
    return _assemble(design, pmfs, {"generator": "prbox"})


def deterministic_system(assignment: Mapping[str, str], design: Design) -> System:
    """Point-mass blocks consistent with one global outcome assignment."""
    for content, alphabet in design.alphabets.items():
        if content not in assignment:
            raise ValueError(f"assignment is missing content {content!r}")
        if assignment[content] not in alphabet:
            raise ValueError(
                f"assignment maps {content!r} to {assignment[content]!r}, "
                f"not in its alphabet"
            )
    pmfs = [
        {tuple(assignment[c] for c in members): Fraction(1)}
        for members in design.contexts
    ]
    provenance = {
        "generator": "deterministic",
        "assignment": {c: assignment[c] for c in design.alphabets},
    }
    return _assemble(design, pmfs, provenance)


def _shuffled(items: list, rng: Random) -> list:
    """Fisher-Yates on a copy; pinned here so outputs never depend on
    stdlib shuffle internals."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def random_consistent_system(
    seed: int,
    design: Design | None = None,
    denominator: int = 24,
    uniform_marginals: bool = False,
) -> System:
    """Seeded random system with exactly consistent connections.

    Marginals are drawn first, one per content, with all probabilities
    multiples of 1/``denominator``; each block then couples its members
    by pairing outcome slots, which reproduces every marginal exactly.
    Half the blocks pair independently shuffled slots (weak dependence);
    the rest sort each member's slots under a random ranking of its
    alphabet before pairing (a monotone coupling, strong dependence), so
    the sample spans the classical boundary instead of hugging
    independence.  Identical seeds give identical systems, byte for byte.
    """
    if design is None:
        design = two_by_two_design()
    if denominator < 1:
        raise ValueError("denominator must be a positive integer")
    rng = Random(seed)

    slot_pools: dict[str, list[str]] = {}
    marginals: dict[str, list[int]] = {}
    for content, alphabet in design.alphabets.items():
        size = len(alphabet)
        if uniform_marginals:
            if denominator % size:
                raise ValueError(
                    f"uniform marginals over {size} outcomes need a denominator "
                    f"divisible by {size}"
                )
            counts = [denominator // size] * size
        else:
            cuts = sorted(rng.randint(0, denominator) for _ in range(size - 1))
            counts = [
                b - a for a, b in zip([0] + cuts, cuts + [denominator])
            ]
        marginals[content] = counts
        slot_pools[content] = [
            label for label, n in zip(alphabet, counts) for _ in range(n)
        ]

    pmfs = []
    for members in design.contexts:
        aligned = rng.random() < 0.5
        columns = []
        for content in members:
            column = _shuffled(slot_pools[content], rng)
            if aligned:
                rank = {
                    label: r
                    for label, r in zip(
                        design.alphabets[content],
                        _shuffled(list(range(len(design.alphabets[content]))), rng),
                    )
                }
                column.sort(key=rank.__getitem__)
            columns.append(column)
        atoms: dict[tuple[str, ...], Fraction] = {}
        for joint in zip(*columns):
            atoms[joint] = atoms.get(joint, Fraction(0)) + Fraction(1, denominator)
        pmfs.append(atoms)

    provenance = {
        "generator": "random",
        "seed": seed,
        "denominator": denominator,
        "uniform_marginals": uniform_marginals,
        "marginal_counts": marginals,
    }
    return _assemble(design, pmfs, provenance)
