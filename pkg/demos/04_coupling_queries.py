"""A tour of coupling queries on one random system.

No coupling is privileged: the same system admits the independent
product coupling, couplings maximizing connection equalities, and
anything in between compatible with the per-context blocks.  This script
generates a seeded random consistent system and interrogates the full
menu, ending with the JSON artifacts the command line emits.

Run:  python demos/04_coupling_queries.py
"""

import json
from fractions import Fraction

from contextuality import (
    any_coupling,
    brute_force_identity,
    constrained_coupling_feasible,
    identity_coupling_feasible,
    max_connection_equality,
    max_total_connection_equality,
    product_coupling,
    random_consistent_system,
)


def main() -> None:
    system = random_consistent_system(seed=11, denominator=8)
    print("Seeded random consistent 2x2 system (denominator 8):")
    for block in system.blocks:
        atoms = {" ".join(k): str(v) for k, v in sorted(block.pmf.items())}
        print(f"  {block.context}: {atoms}")

    print(f"\nA coupling always exists: {any_coupling(system).status}")
    product = product_coupling(system)
    print(f"  product coupling atoms: {len(product.pmf)} (blocks independent)")

    print("\nIdentity coupling (all same-content variables equal a.s.):")
    lp_route = identity_coupling_feasible(system)
    oracle = brute_force_identity(system)
    print(f"  simplex route:      {lp_route.status}")
    print(f"  elimination oracle: {oracle.status}")

    connections = system.connections()
    print("\nConnection equality, per coupling:")
    total = max_total_connection_equality(system)
    for conn in connections:
        alone = max_connection_equality(system, conn)
        under_product = product.connection_equality(conn)
        under_best = total.witness.connection_equality(conn)
        print(
            f"  {conn.content}: product {str(under_product):>6}   "
            f"jointly-optimal {str(under_best):>6}   max alone {alone}"
        )
    individual = sum((max_connection_equality(system, c) for c in connections), Fraction(0))
    print(f"  joint optimum {total.optimum} vs individual sum {individual}"
          f"  ->  {'contextual' if total.optimum < individual else 'not contextual'}")

    print("\nConstrained existence (floors on two connections):")
    demands = [(connections[0], Fraction(9, 10)), (connections[1], Fraction(9, 10))]
    result = constrained_coupling_feasible(system, demands)
    print(f"  Pr[equal] >= 9/10 on {connections[0].content} and {connections[1].content}: {result.status}")

    print("\nWitness JSON (as written by the command line), truncated:")
    payload = json.dumps(total.witness.to_json_dict(), indent=2)
    print("\n".join(payload.splitlines()[:8]))
    print("  ...")


if __name__ == "__main__":
    main()
