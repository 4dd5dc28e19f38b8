from fractions import Fraction

import pytest
from hypothesis import settings

from contextuality import System, validate_system

settings.register_profile("suite", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("suite")


def make_raw_2x2(block_pmfs: dict[str, dict[str, str]]) -> dict:
    """Raw 2x2 binary description; block_pmfs keyed by 'Ai|Bj'."""
    contexts = ["A1|B1", "A1|B2", "A2|B1", "A2|B2"]
    return {
        "contents": {c: ["+1", "-1"] for c in ("A1", "A2", "B1", "B2")},
        "contexts": contexts,
        "blocks": [
            {
                "context": ctx,
                "variables": [{"content": ctx.split("|")[0]}, {"content": ctx.split("|")[1]}],
                "pmf": block_pmfs[ctx],
            }
            for ctx in contexts
        ],
    }


@pytest.fixture
def alice_bob_system() -> System:
    """Uniform, perfectly correlated in every context; identity-feasible."""
    pmf = {"+1,+1": "1/2", "-1,-1": "1/2"}
    return validate_system(make_raw_2x2({ctx: dict(pmf) for ctx in ("A1|B1", "A1|B2", "A2|B1", "A2|B2")}))


@pytest.fixture
def two_coin_system() -> System:
    """Two disjoint single-variable contexts, both fair coins."""
    return validate_system(
        {
            "contents": {"X": ["H", "T"], "Y": ["H", "T"]},
            "contexts": ["left", "right"],
            "blocks": [
                {"context": "left", "variables": [{"content": "X"}], "pmf": {"H": "1/2", "T": "1/2"}},
                {"context": "right", "variables": [{"content": "Y"}], "pmf": {"H": "1/2", "T": "1/2"}},
            ],
        }
    )


def make_two_context_raw(p_low: dict[str, str], p_high: dict[str, str]) -> dict:
    """One content X recorded under two conditions."""
    return {
        "contents": {"X": sorted(set(p_low) | set(p_high))},
        "contexts": ["low", "high"],
        "blocks": [
            {"context": "low", "variables": [{"content": "X"}], "pmf": p_low},
            {"context": "high", "variables": [{"content": "X"}], "pmf": p_high},
        ],
    }


@pytest.fixture
def inconsistent_system() -> System:
    return validate_system(
        make_two_context_raw({"a": "1/2", "b": "1/2"}, {"a": "1/3", "b": "2/3"})
    )


def frac(text: str) -> Fraction:
    return Fraction(text)
