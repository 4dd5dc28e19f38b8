"""Same quantity, two recording conditions: context or direct influence?

A response time is recorded while some remote condition is either low or
high.  Splitting the recordings into two variables, one per condition,
costs nothing: if the condition does not matter, the two variables have
equal distributions and admit a coupling that makes them equal almost
surely, which is exactly "ignoring the condition".  If the distributions
differ, no such coupling exists and the condition directly influences
the output; the maximal equality probability says how far from ignorable
it is.

Run:  python demos/03_context_or_influence.py
"""

from contextuality import (
    identity_coupling_feasible,
    max_connection_equality,
    validate_system,
)


def two_condition_system(p_low: dict, p_high: dict):
    labels = sorted(set(p_low) | set(p_high))
    return validate_system(
        {
            "contents": {"T": labels},
            "contexts": ["low", "high"],
            "blocks": [
                {"context": "low", "variables": [{"content": "T"}], "pmf": p_low},
                {"context": "high", "variables": [{"content": "T"}], "pmf": p_high},
            ],
        }
    )


def inspect(title: str, p_low: dict, p_high: dict) -> None:
    system = two_condition_system(p_low, p_high)
    (conn,) = system.connections()
    print(title)
    print(f"  low : {p_low}")
    print(f"  high: {p_high}")
    print(f"  consistently connected: {system.is_consistently_connected()}")
    result = identity_coupling_feasible(system)
    print(f"  coupling with T_low = T_high a.s.: {result.status}")
    if result.detail:
        print(f"    ({result.detail})")
    print(f"  max Pr[T_low = T_high] over all couplings: {max_connection_equality(system, conn)}")
    print()


def main() -> None:
    inspect(
        "Case 1: the condition does not affect the distribution",
        {"fast": "1/3", "slow": "2/3"},
        {"fast": "1/3", "slow": "2/3"},
    )
    inspect(
        "Case 2: the condition shifts the distribution",
        {"fast": "1/3", "slow": "2/3"},
        {"fast": "1/2", "slow": "1/2"},
    )
    print(
        "In case 1 the equality coupling exists, so labeling by the\n"
        "condition and then coupling the labels away recovers the single\n"
        "variable picture.  In case 2 it cannot exist; 1 minus the total\n"
        "variation distance (5/6 here) is the best any coupling can do."
    )


if __name__ == "__main__":
    main()
