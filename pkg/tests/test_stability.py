import math
import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, strategies as st

from genset.errors import CapacityError, EmptyDomainError, InvalidArgument, NoGoodCliqueError
from genset.kneser import (
    Graph,
    chromatic_number,
    clique_count,
    clique_density,
    cycle,
    disjointness_graph,
    kneser_graph,
    petersen_graph,
    turan_classes,
    turan_graph,
)
from genset.setfam import SetFamily, balanced_partition, canonical_generator
from genset.stability import (
    below_degree_threshold,
    bipartization_distance_exact,
    classify_cliques,
    containment_count,
    extract_k_partition,
    f_value,
    intra_class_edges,
    kpartite_edge_bound_check,
    kpartization_distance_exact,
    measured_parameters,
    min_degree_prune,
    min_degree_prune_trace,
    removal_bound_holds,
    sampled_density_bound,
    shearer_check,
    turan_density_term,
)


def random_graph(rng, n, p):
    return Graph.from_edges(n, [e for e in combinations(range(n), 2) if rng.random() < p])


def brute_partition_defect(g, k):
    """Minimum intra-class edges over every assignment of vertices to k classes."""
    best = g.edge_count
    edges = g.edges()
    for colours in product(range(k), repeat=g.order):
        best = min(best, sum(colours[u] == colours[v] for u, v in edges))
    return best


@st.composite
def graphs(draw, max_order=8):
    n = draw(st.integers(1, max_order))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


# -- pruning -------------------------------------------------------------------------


def test_prune_keeps_complete_graph():
    assert min_degree_prune(Graph.complete(6), 3, 0) == Graph.complete(6)


def test_prune_edgeless_graph_stops_at_one_vertex():
    # a lone vertex meets the threshold (1/2)(1 - 1) = 0
    trace = min_degree_prune_trace(Graph.empty(5), 2, 0)
    assert [d[0] for d in trace.deletions] == [0, 1, 2, 3]
    assert trace.graph.order == 1


def test_prune_drops_isolated_vertex():
    g = turan_graph(2, 8).disjoint_union(Graph.empty(1))
    trace = min_degree_prune_trace(g, 2, Fraction(1, 16))
    assert trace.deletions == ((8, 0, 9),)
    assert trace.graph == turan_graph(2, 8)


@given(graphs(9), st.integers(2, 4), st.sampled_from([Fraction(0), Fraction(1, 16), Fraction(1, 9), Fraction(1, 4)]))
def test_prune_audit_log_replays(g, k, delta):
    trace = min_degree_prune_trace(g, k, delta)
    alive = list(range(g.order))
    current = g
    for v, deg, order in trace.deletions:
        assert order == len(alive)
        pos = alive.index(v)
        assert current.degree(pos) == deg
        assert below_degree_threshold(deg, order, k, delta)
        # lowest-index failing vertex goes first
        for u in range(pos):
            assert not below_degree_threshold(current.degree(u), order, k, delta)
        alive.pop(pos)
        current = current.induced([i for i in range(current.order) if i != pos])
    assert list(trace.kept) == alive
    out = trace.graph
    for v in range(out.order):
        assert not below_degree_threshold(out.degree(v), out.order, k, delta)


def test_threshold_is_exact_at_irrational_boundary():
    # 1 - 1/2 - sqrt(1/4) = 0: nothing is below a zero threshold
    assert not below_degree_threshold(0, 5, 2, Fraction(1, 4))
    assert below_degree_threshold(1, 5, 2, Fraction(0))


# -- classification ----------------------------------------------------------------


def test_turan_has_only_good_cliques():
    c = classify_cliques(turan_graph(3, 9), 3)
    assert c.alpha == 0
    assert not c.dangerous and not c.treacherous and not c.bad
    assert len(c.good) == 27


def test_complete_graph_cliques_are_treacherous():
    c = classify_cliques(Graph.complete(4), 3)
    assert c.alpha == 1
    assert len(c.treacherous) == 4
    assert not c.good


def test_k4_plus_isolated_vertex():
    g = Graph.complete(4).disjoint_union(Graph.empty(1))
    c = classify_cliques(g, 3)
    assert c.alpha == Fraction(1, 5)
    # each edge of the K4 lies in 1 K4; threshold sqrt(1/5) * C(3, 2) = 1.34
    assert not c.dangerous
    # each triangle lies in 1 K4; threshold sqrt(1/5) * 2 = 0.89
    assert len(c.treacherous) == 4
    assert c.dangerous_within_bound and c.treacherous_within_bound


def test_classification_requires_a_clique():
    with pytest.raises(EmptyDomainError):
        classify_cliques(Graph.empty(5), 2)


@given(graphs(8), st.integers(2, 3))
def test_classification_matches_definitions(g, k):
    if g.order < k + 1 or clique_count(g, k) == 0:
        return
    c = classify_cliques(g, k)
    n = g.order
    alpha = c.alpha
    assert alpha == clique_density(g, k + 1)

    def at_least(count, scale):
        # count >= sqrt(alpha) * scale, with zero containments never counting
        return count > 0 and count * count >= alpha * scale * scale

    want_dangerous = {t for t in map(tuple, _cliques(g, k - 1)) if at_least(containment_count(g, t), math.comb(n - k + 1, 2))}
    want_treach = {s for s in map(tuple, _cliques(g, k)) if at_least(g.common_neighbors(s).bit_count(), n - k)}
    assert set(c.dangerous) == want_dangerous
    assert set(c.treacherous) == want_treach
    for s in _cliques(g, k):
        bad = s in want_treach or any(t in want_dangerous for t in combinations(s, k - 1))
        assert (s in c.bad) == bad and (s in c.good) == (not bad)


def _cliques(g, r):
    return [c for c in combinations(range(g.order), r) if g.is_clique(c)]


@pytest.mark.parametrize(
    "g,s,value",
    [
        (Graph.complete(4), (0, 1, 2), 6),
        (Graph.complete(3), (0, 1, 2), 3),
        (turan_graph(3, 6), (0, 1, 2), 6),
    ],
)
def test_f_value_examples(g, s, value):
    assert f_value(g, s) == value


def test_f_value_rejects_non_clique():
    with pytest.raises(InvalidArgument):
        f_value(Graph.empty(3), (0, 1, 2))


# -- extraction ----------------------------------------------------------------------


def same_partition(parts, classes):
    return sorted(map(sorted, parts)) == sorted(map(sorted, classes))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_turan_partition_recovered(k):
    for n in range(k, 21):
        rep = extract_k_partition(turan_graph(k, n), k)
        assert rep.removed_edges == 0
        assert same_partition(rep.partition, turan_classes(k, n))


def test_perturbed_bipartite_graph():
    g = turan_graph(2, 8).with_edges([(0, 2)])
    rep = extract_k_partition(g, 2)
    assert rep.removed_edges <= 1
    assert rep.bound_holds and rep.hypotheses_hold


def test_no_good_clique_reports_alpha():
    with pytest.raises(NoGoodCliqueError) as info:
        extract_k_partition(Graph.complete(4), 3)
    assert info.value.alpha == 1


def test_extraction_on_canonical_disjointness_graph():
    g = disjointness_graph(canonical_generator(balanced_partition(6, 2)))
    rep = extract_k_partition(g, 2)
    assert rep.bound_holds
    assert rep.removed_edges == intra_class_edges(g, rep.partition)


@given(graphs(9), st.integers(2, 3))
def test_extraction_invariants(g, k):
    try:
        rep = extract_k_partition(g, k)
    except (NoGoodCliqueError, EmptyDomainError, InvalidArgument):
        return
    flat = sorted(v for part in rep.partition for v in part)
    assert flat == list(range(g.order))
    assert rep.removed_edges == intra_class_edges(g, rep.partition) == len(rep.removed_edge_list)
    alpha, beta, gamma = measured_parameters(g, k)
    if gamma <= Fraction(1, 2):
        assert removal_bound_holds(rep.removed_edges, g.order, k, alpha, beta, gamma)


def test_removal_bound_arithmetic():
    # 2k/n alone: 2*2/10 * 45 = 18 edges
    assert removal_bound_holds(18, 10, 2, 0, 0, 0)
    assert not removal_bound_holds(19, 10, 2, 0, 0, 0)
    # negative beta and gamma are clamped at zero
    assert removal_bound_holds(18, 10, 2, 0, Fraction(-1), Fraction(-1))


# -- partization distances -------------------------------------------------------------


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_odd_cycles_need_one_deletion(l):
    assert bipartization_distance_exact(cycle(2 * l + 1).to_graph()) == 1


def test_bipartization_examples(backend):
    assert bipartization_distance_exact(cycle(4).to_graph()) == 0
    assert bipartization_distance_exact(petersen_graph()) == 3


def test_kpartization_examples(backend):
    assert kpartization_distance_exact(Graph.complete(4), 3) == 1
    assert kpartization_distance_exact(turan_graph(3, 7), 3) == 0
    # oracle: exhaustive search over 3^14 colourings with vertex 0 fixed
    assert kpartization_distance_exact(kneser_graph(6, 2), 3) == 3


def test_capacities():
    with pytest.raises(CapacityError):
        bipartization_distance_exact(Graph.empty(25))
    with pytest.raises(CapacityError):
        kpartization_distance_exact(Graph.empty(17), 3)


def test_partization_backends_match_brute_force(backend):
    rng = random.Random(3)
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 8), 0.5)
        k = rng.randint(2, 3)
        assert kpartization_distance_exact(g, k) == brute_partition_defect(g, k)
        assert bipartization_distance_exact(g) == brute_partition_defect(g, 2)


@given(graphs(10))
def test_bipartization_equals_two_partization(g):
    assert bipartization_distance_exact(g) == kpartization_distance_exact(g, 2)


@given(graphs(8), st.integers(1, 4))
def test_zero_distance_iff_colourable(g, k):
    assert (kpartization_distance_exact(g, k) == 0) == (chromatic_number(g) <= k)


# -- inequality checkers --------------------------------------------------------------


def test_shearer_examples():
    rep = shearer_check(0b11, [0b01, 0b10], 1, [0, 1, 2, 3])
    assert (rep.lhs, rep.rhs) == (4, 4) and rep.equality
    rep = shearer_check(0b11, [0b01, 0b10], 1, [0, 3])
    assert (rep.lhs, rep.rhs) == (2, 4) and rep.holds


def test_shearer_rejects_non_cover():
    with pytest.raises(InvalidArgument):
        shearer_check(0b111, [0b011], 1, [1])
    with pytest.raises(InvalidArgument):
        shearer_check(0b011, [0b011], 2, [1])


@given(st.integers(1, 5), st.data())
def test_shearer_never_fails(n, data):
    ground = (1 << n) - 1
    fam = data.draw(st.lists(st.integers(0, ground), min_size=1, max_size=16))
    cover = data.draw(st.lists(st.integers(1, ground), min_size=1, max_size=6))
    r = min(sum(1 for a in cover if a >> i & 1) for i in range(n))
    if r == 0:
        return
    assert shearer_check(ground, cover, r, fam).holds


def test_edge_bound_examples():
    rep = kpartite_edge_bound_check(turan_graph(3, 6), turan_classes(3, 6))
    assert (rep.lhs, rep.rhs) == (1728, 1728)
    rep = kpartite_edge_bound_check(turan_graph(2, 4), turan_classes(2, 4))
    assert rep.equality


def test_edge_bound_rejects_intra_class_edge():
    with pytest.raises(InvalidArgument):
        kpartite_edge_bound_check(Graph.complete(3), [[0, 1], [2]])


@given(st.integers(2, 4), st.integers(2, 10), st.data())
def test_edge_bound_holds_on_random_kpartite(k, n, data):
    colour = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    pairs = [(u, v) for u, v in combinations(range(n), 2) if colour[u] != colour[v]]
    keep = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = Graph.from_edges(n, [e for e, b in zip(pairs, keep) if b])
    parts = [[v for v in range(n) if colour[v] == c] for c in range(k)]
    assert kpartite_edge_bound_check(g, parts).holds


# -- sampled density bound ---------------------------------------------------------------


def test_sampled_bound_examples():
    assert sampled_density_bound(turan_graph(2, 6), 2, 2, 4) == turan_density_term(2, 2, 4)
    assert sampled_density_bound(Graph.complete(3), 2, 2, 3) == 1
    g = turan_graph(2, 6).with_edges([(0, 2)])
    assert sampled_density_bound(g, 2, 2, 4) == Fraction(4, 5)
    assert sampled_density_bound(g, 2, 2, 4) >= clique_density(g, 2)


@given(graphs(8), st.data())
def test_sampled_bound_dominates_density(g, data):
    if g.order < 3:
        return
    k = data.draw(st.integers(1, min(3, g.order - 1)))
    r = data.draw(st.integers(1, k))
    l = data.draw(st.integers(k + 1, g.order))
    assert sampled_density_bound(g, k, r, l) >= clique_density(g, r)
