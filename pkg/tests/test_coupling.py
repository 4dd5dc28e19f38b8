import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from contextuality import (
    ConnectionArityError,
    GuardExceededError,
    any_coupling,
    brute_force_identity,
    build_identity_polytope,
    build_polytope,
    constrained_coupling_feasible,
    cyclic_design,
    deterministic_system,
    enumerate_content_assignments,
    identity_coupling_feasible,
    max_connection_equality,
    max_total_connection_equality,
    pr_box,
    product_coupling,
    random_consistent_system,
    singlet_system,
    solve_lp,
    two_by_two_design,
    validate_system,
    verify_infeasibility_certificate,
)

from conftest import make_two_context_raw

F = Fraction


# ---------------------------------------------------------------- polytope


def test_polytope_shape_2x2(alice_bob_system):
    lp = build_polytope(alice_bob_system)
    assert lp.num_vars == 256
    # 4 blocks x 4 joint outcomes = 16 marginal rows; one per block is
    # implied by the others plus normalization, leaving 12 + 1.
    assert len(lp.rows) == 13
    labels = lp.row_labels()
    assert labels[0] == "normalization"
    assert sum(1 for l in labels if l.startswith("block")) == 12


def test_single_block_polytope_has_unique_point():
    raw = {
        "contents": {"A": ["a1", "a2"], "B": ["b1", "b2"]},
        "contexts": ["c"],
        "blocks": [
            {
                "context": "c",
                "variables": [{"content": "A"}, {"content": "B"}],
                "pmf": {"a1,b1": "1/3", "a1,b2": "1/6", "a2,b1": "1/2"},
            }
        ],
    }
    system = validate_system(raw)
    result = solve_lp(build_polytope(system))
    assert result.feasible
    assignments = list(itertools.product(("a1", "a2"), ("b1", "b2")))
    witness = {assignments[j]: w for j, w in result.witness.items()}
    assert witness == {
        ("a1", "b1"): F(1, 3),
        ("a1", "b2"): F(1, 6),
        ("a2", "b1"): F(1, 2),
    }


def test_disjoint_blocks_polytope_is_transportation(two_coin_system):
    lp = build_polytope(two_coin_system)
    assert lp.num_vars == 4
    # normalization + (2-1) outcomes per block
    assert len(lp.rows) == 3


def test_var_cap_guard_reports_count(alice_bob_system):
    with pytest.raises(GuardExceededError) as err:
        build_polytope(alice_bob_system, var_cap=100)
    assert err.value.count == 256
    assert err.value.cap == 100


# ------------------------------------------------------- product / any


def test_product_of_two_fair_coins(two_coin_system):
    coupling = product_coupling(two_coin_system)
    assert coupling.pmf == {
        ("H", "H"): F(1, 4),
        ("H", "T"): F(1, 4),
        ("T", "H"): F(1, 4),
        ("T", "T"): F(1, 4),
    }


@pytest.mark.parametrize("seed", range(6))
def test_product_coupling_projects_to_blocks(seed):
    system = random_consistent_system(seed, denominator=12)
    assert product_coupling(system).matches_system()


def test_product_coupling_connection_probability_on_singlet():
    system = singlet_system(("0", "1/2 pi"), ("1/4 pi", "3/4 pi"))
    coupling = product_coupling(system)
    # Two independent uniform +/-1 variables agree with probability 1/2.
    assert coupling.connection_equality(system.connection("A1")) == F(1, 2)


@pytest.mark.parametrize("seed", range(4))
def test_any_coupling_always_feasible(seed):
    system = random_consistent_system(seed, cyclic_design(3), denominator=6)
    result = any_coupling(system)
    assert result.feasible
    assert result.witness.matches_system()


def test_any_coupling_on_deterministic_system_is_point_mass():
    design = two_by_two_design()
    system = deterministic_system(
        {"A1": "+1", "A2": "-1", "B1": "+1", "B2": "-1"}, design
    )
    result = any_coupling(system)
    assert result.feasible
    assert len(result.witness.pmf) == 1


# ------------------------------------------------------------- identity


def test_identity_feasible_for_deterministic_systems():
    design = two_by_two_design()
    for labels in itertools.product(("+1", "-1"), repeat=4):
        assignment = dict(zip(("A1", "A2", "B1", "B2"), labels))
        system = deterministic_system(assignment, design)
        result = identity_coupling_feasible(system)
        assert result.feasible
        assert result.witness.matches_system()
        assert len(result.witness.pmf) == 1


def test_identity_polytope_shape(alice_bob_system):
    lp = build_identity_polytope(alice_bob_system)
    assert lp.num_vars == 16
    assert len(lp.rows) == 13


def test_pr_box_vertices_all_violate_a_block_support():
    """Support enumeration oracle: every deterministic content assignment
    lands on a zero cell of some block, so no mixture of them can match
    the PR box and the identity coupling cannot exist."""
    prb = pr_box()
    vertices = enumerate_content_assignments(prb)
    assert len(vertices) == 16  # 2^4 content assignments
    content_pos = {c: i for i, c in enumerate(prb.contents)}
    for vertex in vertices:
        hits_zero_cell = False
        for block in prb.blocks:
            restriction = tuple(vertex[content_pos[v.content]] for v in block.variables)
            if block.probability(restriction) == 0:
                hits_zero_cell = True
                break
        assert hits_zero_cell, vertex


def test_pr_box_identity_infeasible_with_verified_certificate():
    prb = pr_box()
    result = identity_coupling_feasible(prb)
    assert not result.feasible
    lp = build_identity_polytope(prb)
    assert verify_infeasibility_certificate(lp, result.certificate)


def test_pr_box_brute_force_agrees():
    assert not brute_force_identity(pr_box()).feasible


def test_singlet_benchmark_identity_infeasible_both_routes():
    system = singlet_system(("0", "1/2 pi"), ("1/4 pi", "3/4 pi"))
    assert not identity_coupling_feasible(system).feasible
    assert not brute_force_identity(system).feasible


def test_identity_witness_lives_on_diagonal(alice_bob_system):
    result = identity_coupling_feasible(alice_bob_system)
    assert result.feasible
    assert result.witness.matches_system()
    roster = alice_bob_system.variables()
    content_of = [v.content for v in roster]
    for atom in result.witness.pmf:
        by_content = {}
        for label, content in zip(atom, content_of):
            assert by_content.setdefault(content, label) == label


def test_identity_on_inconsistent_system_reports_cause(inconsistent_system):
    result = identity_coupling_feasible(inconsistent_system)
    assert not result.feasible
    assert "unequal marginals" in result.detail
    assert brute_force_identity(inconsistent_system).status == "infeasible"


@pytest.mark.parametrize("seed", range(150))
def test_oracle_agreement_fuzz(seed):
    designs = (
        two_by_two_design(),
        cyclic_design(3),
        cyclic_design(4),
        cyclic_design(2, alphabet=("x", "y", "z")),
    )
    system = random_consistent_system(
        seed, designs[seed % len(designs)], denominator=(6, 8, 12)[seed % 3]
    )
    lp_result = identity_coupling_feasible(system)
    oracle = brute_force_identity(system)
    assert lp_result.status == oracle.status
    if oracle.feasible:
        assert oracle.witness.matches_system()


# ----------------------------------------------- connection probabilities


def brute_force_pair_max(p: dict[str, Fraction], q: dict[str, Fraction]) -> Fraction:
    """Enumerate all couplings of two pmfs on a common denominator grid."""
    labels = sorted(p)
    denom = 1
    for value in list(p.values()) + list(q.values()):
        denom = denom * value.denominator // math.gcd(denom, value.denominator)
    row = [int(p[l] * denom) for l in labels]
    col = [int(q[l] * denom) for l in labels]
    best = F(0)

    def fill(cells, rows_left, cols_left):
        nonlocal best
        if not cells:
            if all(r == 0 for r in rows_left) and all(c == 0 for c in cols_left):
                table = dict(zip(all_cells, filled))
                equal = sum(table[(i, i)] for i in range(len(labels)))
                best = max(best, F(equal, denom))
            return
        (i, j), *rest = cells
        for units in range(min(rows_left[i], cols_left[j]) + 1):
            rows_left[i] -= units
            cols_left[j] -= units
            filled.append(units)
            fill(rest, rows_left, cols_left)
            filled.pop()
            rows_left[i] += units
            cols_left[j] += units

    all_cells = [(i, j) for i in range(len(labels)) for j in range(len(labels))]
    filled: list[int] = []
    fill(all_cells, row[:], col[:])
    return best


def test_max_connection_equality_tv_example():
    """Marginals {1/2, 1/2} and {7/10, 3/10}: exhaustive enumeration of
    all couplings on the common grid gives 4/5, matching 1 - TV."""
    raw = make_two_context_raw({"1": "1/2", "0": "1/2"}, {"1": "7/10", "0": "3/10"})
    system = validate_system(raw)
    (conn,) = system.connections()
    value = max_connection_equality(system, conn)
    assert value == F(4, 5)
    oracle = brute_force_pair_max(
        {"1": F(1, 2), "0": F(1, 2)}, {"1": F(7, 10), "0": F(3, 10)}
    )
    assert oracle == value


@given(st.integers(0, 12), st.integers(0, 12))
def test_max_connection_equality_matches_enumeration_binary(i, j):
    """For binary marginals i/12 and j/12, exhaustive coupling search on
    the common grid must reproduce the closed form exactly."""
    p = {"a": F(i, 12), "b": F(12 - i, 12)}
    q = {"a": F(j, 12), "b": F(12 - j, 12)}
    raw = make_two_context_raw(
        {k: str(v) for k, v in p.items()}, {k: str(v) for k, v in q.items()}
    )
    system = validate_system(raw)
    (conn,) = system.connections()
    assert max_connection_equality(system, conn) == brute_force_pair_max(p, q)


def test_max_connection_equality_identical_marginals():
    raw = make_two_context_raw({"a": "2/7", "b": "5/7"}, {"a": "2/7", "b": "5/7"})
    system = validate_system(raw)
    assert max_connection_equality(system, system.connection("X")) == 1


def test_max_connection_equality_disjoint_supports():
    raw = make_two_context_raw({"a": "1", "b": "0"}, {"a": "0", "b": "1"})
    system = validate_system(raw)
    assert max_connection_equality(system, system.connection("X")) == 0


def test_max_connection_equality_rejects_wide_connections():
    raw = {
        "contents": {"X": ["a", "b"]},
        "contexts": ["c1", "c2", "c3"],
        "blocks": [
            {"context": c, "variables": [{"content": "X"}], "pmf": {"a": "1/2", "b": "1/2"}}
            for c in ("c1", "c2", "c3")
        ],
    }
    wide = validate_system(raw)
    (conn,) = wide.connections()
    with pytest.raises(ConnectionArityError):
        max_connection_equality(wide, conn)
    # identity queries still work on wide connections
    assert identity_coupling_feasible(wide).feasible


# --------------------------------------------------- total equality LP


def test_total_equality_attains_connection_count_when_identity_exists(alice_bob_system):
    total = max_total_connection_equality(alice_bob_system)
    assert total.optimum == 4
    assert total.witness.matches_system()


def test_pr_box_total_equality_pinched_by_enumeration():
    """Upper bound oracle: over global assignments consistent with every
    block support, at most 3 of the 4 connections can be equal (the
    fourth context anti-correlates); the LP witness attains 3."""
    prb = pr_box()
    roster = prb.variables()
    content_pos = {c: i for i, c in enumerate(prb.contents)}
    index = {v: i for i, v in enumerate(roster)}
    positions = [
        tuple(index[v] for v in conn.variables) for conn in prb.connections()
    ]
    block_positions = [
        (index[b.variables[0]], index[b.variables[1]]) for b in prb.blocks
    ]
    best = 0
    for assignment in itertools.product(("+1", "-1"), repeat=len(roster)):
        allowed = True
        for block, (i, j) in zip(prb.blocks, block_positions):
            if block.probability((assignment[i], assignment[j])) == 0:
                allowed = False
                break
        if not allowed:
            continue
        score = sum(1 for (i, j) in positions if assignment[i] == assignment[j])
        best = max(best, score)
    assert best == 3

    total = max_total_connection_equality(prb)
    assert total.optimum == 3
    assert total.witness.matches_system()
    recomputed = sum(
        (total.witness.connection_equality(c) for c in prb.connections()), F(0)
    )
    assert recomputed == 3


def test_total_equality_vacuous_without_connections(two_coin_system):
    total = max_total_connection_equality(two_coin_system)
    assert total.optimum == 0


def test_bound_consistency_against_individual_maxima():
    for seed in range(12):
        system = random_consistent_system(seed, denominator=8)
        connections = system.connections()
        individual = sum(
            (max_connection_equality(system, c) for c in connections), F(0)
        )
        total = max_total_connection_equality(system)
        assert total.optimum <= individual
        demands = [(c, max_connection_equality(system, c)) for c in connections]
        jointly_attainable = constrained_coupling_feasible(system, demands).feasible
        assert jointly_attainable == (total.optimum == individual)


# ------------------------------------------------------------ demands


def test_zero_demands_always_feasible():
    for seed in range(4):
        system = random_consistent_system(seed, denominator=8)
        demands = [(c, F(0)) for c in system.connections()]
        assert constrained_coupling_feasible(system, demands).feasible


def test_full_demands_match_identity_on_consistent_classical(alice_bob_system):
    demands = [(c, F(1)) for c in alice_bob_system.connections()]
    result = constrained_coupling_feasible(alice_bob_system, demands)
    assert result.feasible == identity_coupling_feasible(alice_bob_system).feasible


def test_pr_box_full_demands_infeasible_with_certificate():
    prb = pr_box()
    demands = [(c, F(1)) for c in prb.connections()]
    result = constrained_coupling_feasible(prb, demands)
    assert not result.feasible
    assert result.certificate is not None
    assert len(result.certificate) == 13 + 4


@pytest.mark.parametrize("seed", range(20))
def test_demand_monotonicity(seed):
    """Adding a demand can never turn infeasible into feasible."""
    rng = random.Random(seed)
    system = random_consistent_system(seed, denominator=8)
    connections = system.connections()
    demands = [
        (c, F(rng.randint(0, 8), 8)) for c in connections if rng.random() < 0.8
    ]
    for cut in range(len(demands)):
        fewer = constrained_coupling_feasible(system, demands[:cut])
        more = constrained_coupling_feasible(system, demands[: cut + 1])
        if not fewer.feasible:
            assert not more.feasible


def test_malformed_demand_bound():
    prb = pr_box()
    with pytest.raises(ValueError):
        constrained_coupling_feasible(prb, [(prb.connections()[0], F(3, 2))])


# --------------------------------------------------------- brute force


def test_brute_force_vertex_count_guard():
    system = random_consistent_system(1, cyclic_design(3), denominator=6)
    with pytest.raises(GuardExceededError):
        brute_force_identity(system, assignment_cap=4)


def test_coupling_json_schema():
    system = random_consistent_system(2, denominator=8)
    witness = product_coupling(system)
    payload = witness.to_json_dict()
    assert set(payload) == {"atoms"}
    key = next(iter(payload["atoms"]))
    assert len(key.split(",")) == len(system.variables())
