"""Independent reference implementations used to check the real ones.

Everything here works on plain tuples and sets, not on the package's graph
classes, so a bug cannot be shared between an operation and its oracle.
"""

from __future__ import annotations

import itertools
from random import Random

Edge = tuple[str, str, str]  # (source, predicate, target)


def bfs_reachable(
    edges: list[Edge],
    start: str,
    allowed_predicates: set[str] | None = None,
    max_depth: int | None = None,
) -> set[str]:
    """Plain breadth-first forward reachability with an optional predicate
    filter and depth bound."""
    admitted = [
        (s, o) for s, p, o in edges if allowed_predicates is None or p in allowed_predicates
    ]
    reached = {start}
    frontier = [start]
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        nxt = []
        for node in frontier:
            for s, o in admitted:
                if s == node and o not in reached:
                    reached.add(o)
                    nxt.append(o)
        frontier = nxt
        depth += 1
    return reached


def sbr_conditions(
    left: str,
    right: str,
    interior: set[str],
    rels: list[Edge],
    mode: str,
) -> tuple[bool, str | None]:
    """Direct truth evaluation of the three substitution-block conditions."""
    if left in interior or right in interior:
        return False, "C1"
    for a_k in interior:
        has_out = any(s == a_k and o in interior for s, _, o in rels)
        has_in = any(o == a_k and s in interior for s, _, o in rels)
        if mode == "strict" and not has_out:
            return False, "C2"
        if mode == "symmetric" and not (has_out or has_in):
            return False, "C2"
    allowed = interior | {left, right}
    for s, _, o in rels:
        if s not in allowed or o not in allowed:
            return False, "C3"
    return True, None


def nested_loop_derive(
    facts: set[Edge],
    rules: list[tuple[str, list[Edge], Edge]],
) -> set[tuple[str, str, str, str]]:
    """Fixpoint rule application by brute force: try every assignment of a
    rule's variables to terms seen in the fact base, keep the assignments
    under which all antecedents are facts. Rules are (name, antecedents,
    consequent) with `?`-prefixed variables."""
    known = set(facts)
    derived: set[tuple[str, str, str, str]] = set()
    while True:
        universe = sorted({term for fact in known for term in fact})
        new: set[tuple[str, str, str, str]] = set()
        for name, antecedents, consequent in rules:
            variables = sorted(
                {t for pattern in antecedents for t in pattern if t.startswith("?")}
            )
            for values in itertools.product(universe, repeat=len(variables)):
                binding = dict(zip(variables, values))

                def ground(pattern: Edge) -> Edge:
                    return tuple(binding.get(t, t) for t in pattern)  # type: ignore[return-value]

                if all(ground(p) in known for p in antecedents):
                    s, p, o = ground(consequent)
                    entry = (s, p, o, name)
                    if entry not in derived:
                        new.add(entry)
        if not new:
            return derived
        derived |= new
        known |= {(s, p, o) for s, p, o, _ in new}


def random_digraph(
    rng: Random, max_nodes: int = 20, max_edges: int = 60, n_predicates: int = 4
) -> tuple[list[str], list[Edge]]:
    n = rng.randint(1, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    predicates = [f"p{i}" for i in range(n_predicates)]
    m = rng.randint(0, max_edges)
    edges = [
        (rng.choice(nodes), rng.choice(predicates), rng.choice(nodes)) for _ in range(m)
    ]
    return nodes, edges
