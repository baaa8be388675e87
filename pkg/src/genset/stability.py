"""Constructive stability algorithms and exact checkers.

Everything here works on :class:`~genset.kneser.Graph` values and keeps
arithmetic exact: densities are fractions, and comparisons against thresholds
involving a square root of a density are done by squaring both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import kernels
from .errors import CapacityError, EmptyDomainError, InvalidArgument, NoGoodCliqueError
from .kneser import Graph, _bits, _greedy_order, all_clique_counts, clique_count, cliques
from .setfam import SubsetMask

BIPARTIZATION_CAPACITY = 24
KPARTIZATION_CAPACITY = 16
SUBSET_ENUMERATION_CAPACITY = 500_000


def _density(g: Graph, r: int) -> Fraction:
    if r > g.order:
        return Fraction(0)
    return Fraction(all_clique_counts(g)[r], math.comb(g.order, r))


def _sqrt_ge(value: Fraction | int, alpha: Fraction, scale: Fraction | int) -> bool:
    """``value >= sqrt(alpha) * scale`` for non-negative arguments."""
    return value * value >= alpha * scale * scale


def _sqrt_le(value: Fraction | int, alpha: Fraction, scale: Fraction | int) -> bool:
    return value * value <= alpha * scale * scale


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


# -- minimum-degree pruning ------------------------------------------------------


@dataclass(frozen=True)
class PruneTrace:
    """Result of min-degree pruning.

    ``deletions`` lists ``(vertex, degree, order)`` at the moment each vertex
    was removed, so the run can be replayed.
    """

    graph: Graph
    kept: tuple[int, ...]
    deletions: tuple[tuple[int, int, int], ...]


def below_degree_threshold(degree: int, order: int, k: int, delta: Fraction) -> bool:
    """``degree < (1 - 1/k - sqrt(delta)) * (order - 1)``, decided exactly."""
    slack = (1 - Fraction(1, k)) * (order - 1) - degree
    if slack <= 0:
        return False
    return delta * (order - 1) ** 2 < slack * slack


def min_degree_prune_trace(g: Graph, k: int, delta) -> PruneTrace:
    delta = Fraction(delta)
    if k < 1:
        raise InvalidArgument("k must be positive")
    if not (0 <= delta <= 1):
        raise InvalidArgument(f"delta must lie in [0, 1], got {delta}")
    alive = (1 << g.order) - 1
    deletions = []
    while alive:
        order = alive.bit_count()
        for v in _bits(alive):
            deg = (g.adj[v] & alive).bit_count()
            if below_degree_threshold(deg, order, k, delta):
                deletions.append((v, deg, order))
                alive &= ~(1 << v)
                break
        else:
            break
    kept = tuple(_bits(alive))
    return PruneTrace(g.induced(kept), kept, tuple(deletions))


def min_degree_prune(g: Graph, k: int, delta) -> Graph:
    """Repeatedly drop the lowest-index vertex whose degree is below threshold."""
    return min_degree_prune_trace(g, k, delta).graph


# -- clique classification and k-partition extraction -----------------------------


def containment_count(g: Graph, t: Sequence[int]) -> int:
    """Number of K_{|t|+2} containing the clique ``t``: edges inside N(t)."""
    nb = g.common_neighbors(t)
    return sum((g.adj[v] & nb).bit_count() for v in _bits(nb)) // 2


def f_value(g: Graph, s: Sequence[int]) -> int:
    """Sum of |N(T)| over the (|s|-1)-subsets T of the clique ``s``."""
    s = tuple(s)
    if len(set(s)) != len(s) or not g.is_clique(s):
        raise InvalidArgument(f"{s} does not induce a clique")
    return sum(g.common_neighbors(t).bit_count() for t in combinations(s, len(s) - 1))


@dataclass(frozen=True)
class CliqueClassification:
    k: int
    alpha: Fraction
    dangerous: tuple[tuple[int, ...], ...]
    treacherous: tuple[tuple[int, ...], ...]
    good: tuple[tuple[int, ...], ...]
    bad: tuple[tuple[int, ...], ...]
    dangerous_within_bound: bool
    treacherous_within_bound: bool


def classify_cliques(g: Graph, k: int) -> CliqueClassification:
    """Split the k-cliques into good and bad by their K_{k+1} containments.

    A (k-1)-clique is dangerous when it lies in at least sqrt(alpha) C(n-k+1, 2)
    copies of K_{k+1}; a k-clique is treacherous when it lies in at least
    sqrt(alpha) (n-k).  A clique with no containments at all is never flagged,
    which keeps K_{k+1}-free graphs (alpha = 0) free of bad cliques.
    """
    n = g.order
    if k < 1 or n < k:
        raise EmptyDomainError(f"graph of order {n} has no {k}-cliques")
    kcl = cliques(g, k)
    if not kcl:
        raise EmptyDomainError(f"graph has no {k}-clique")
    alpha = _density(g, k + 1)
    d_scale = math.comb(n - k + 1, 2)
    dangerous = []
    for t in cliques(g, k - 1):
        c = containment_count(g, t)
        if c and _sqrt_ge(c, alpha, d_scale):
            dangerous.append(t)
    danger_set = set(dangerous)
    treacherous, good, bad = [], [], []
    for s in kcl:
        d = g.common_neighbors(s).bit_count()
        is_treacherous = d > 0 and _sqrt_ge(d, alpha, n - k)
        if is_treacherous:
            treacherous.append(s)
        if is_treacherous or any(t in danger_set for t in combinations(s, k - 1)):
            bad.append(s)
        else:
            good.append(s)
    return CliqueClassification(
        k=k,
        alpha=alpha,
        dangerous=tuple(dangerous),
        treacherous=tuple(treacherous),
        good=tuple(good),
        bad=tuple(bad),
        dangerous_within_bound=_sqrt_le(len(dangerous), alpha, math.comb(n, k - 1)),
        treacherous_within_bound=_sqrt_le(len(treacherous), alpha, math.comb(n, k)),
    )


def removal_coefficient(k: int) -> Fraction:
    """8 k^(k+1) (k+1) / k!, the weight of sqrt(alpha) in the edge-removal bound."""
    return Fraction(8 * k ** (k + 1) * (k + 1), math.factorial(k))


@dataclass(frozen=True)
class StabilityReport:
    k: int
    n: int
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    psi: float
    removal_bound: float
    bound_holds: bool
    hypotheses_hold: bool
    removed_edges: int
    removed_edge_list: tuple[tuple[int, int], ...]
    partition: tuple[tuple[int, ...], ...]
    chosen_clique: tuple[int, ...]
    f_value_of_chosen: int
    leftover: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "alpha": _fmt(self.alpha),
            "beta": _fmt(self.beta),
            "gamma": _fmt(self.gamma),
            "psi": self.psi,
            "removal_bound": self.removal_bound,
            "bound_holds": self.bound_holds,
            "hypotheses_hold": self.hypotheses_hold,
            "removed_edges": self.removed_edges,
            "removed_edge_list": [list(e) for e in self.removed_edge_list],
            "partition": [list(c) for c in self.partition],
            "chosen_clique": list(self.chosen_clique),
            "f_value_of_chosen": self.f_value_of_chosen,
            "leftover": list(self.leftover),
        }


def measured_parameters(g: Graph, k: int) -> tuple[Fraction, Fraction, Fraction]:
    """(alpha, beta, gamma) read off the K_{k+1}, K_{k-1} and K_k densities of ``g``."""
    fk = math.factorial(k)
    alpha = _density(g, k + 1)
    beta = _density(g, k - 1) * Fraction(k ** (k - 1), fk) - 1
    gamma = 1 - _density(g, k) * Fraction(k**k, fk)
    return alpha, beta, gamma


def removal_bound_holds(removed: int, n: int, k: int, alpha, beta, gamma) -> bool:
    """removed <= (2b + 2g + c sqrt(alpha) + 2k/n) C(n,2), with b, g clamped at 0."""
    pairs = math.comb(n, 2)
    rational = 2 * max(Fraction(beta), 0) + 2 * max(Fraction(gamma), 0) + Fraction(2 * k, n)
    if pairs == 0:
        return removed == 0
    excess = Fraction(removed, pairs) - rational
    if excess <= 0:
        return True
    return excess * excess <= removal_coefficient(k) ** 2 * Fraction(alpha)


def removal_fraction(n: int, k: int, alpha, beta, gamma) -> float:
    return (
        2 * max(float(beta), 0.0)
        + 2 * max(float(gamma), 0.0)
        + float(removal_coefficient(k)) * math.sqrt(float(alpha))
        + 2 * k / n
    )


def extract_k_partition(g: Graph, k: int) -> StabilityReport:
    """Make ``g`` k-partite around the best good k-clique.

    Picks the good k-clique S with the largest f-value (lexicographically
    smallest on ties), takes W_i = N(S - v_i) minus N(S) as seed classes, hands
    every leftover vertex to the currently smallest class and deletes all
    edges left inside classes.
    """
    classification = classify_cliques(g, k)
    alpha, beta, gamma = measured_parameters(g, k)
    if not classification.good:
        raise NoGoodCliqueError(f"no good {k}-clique (alpha = {_fmt(alpha)})", alpha)
    best, best_f = None, -1
    for s in classification.good:
        fv = f_value(g, s)
        if fv > best_f:
            best, best_f = s, fv
    ns = g.common_neighbors(best)
    classes = [g.common_neighbors(best[:i] + best[i + 1:]) & ~ns for i in range(k)]
    covered = 0
    for c in classes:
        covered |= c
    leftover = tuple(_bits(((1 << g.order) - 1) & ~covered))
    for v in leftover:
        i = min(range(k), key=lambda j: (classes[j].bit_count(), j))
        classes[i] |= 1 << v
    removed = []
    for c in classes:
        for u in _bits(c):
            for v in _bits(g.adj[u] & c):
                if u < v:
                    removed.append((u, v))
    removed.sort()
    n = g.order
    psi = removal_fraction(n, k, alpha, beta, gamma)
    return StabilityReport(
        k=k,
        n=n,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        psi=psi,
        removal_bound=psi * math.comb(n, 2),
        bound_holds=removal_bound_holds(len(removed), n, k, alpha, beta, gamma),
        hypotheses_hold=gamma <= Fraction(1, 2),
        removed_edges=len(removed),
        removed_edge_list=tuple(removed),
        partition=tuple(tuple(_bits(c)) for c in classes),
        chosen_clique=best,
        f_value_of_chosen=best_f,
        leftover=leftover,
    )


def intra_class_edges(g: Graph, parts: Sequence[Sequence[int]]) -> int:
    total = 0
    for part in parts:
        mask = sum(1 << v for v in part)
        total += sum((g.adj[v] & mask).bit_count() for v in part)
    return total // 2


# -- exact partization distances ---------------------------------------------------


def bipartization_distance_exact(g: Graph) -> int:
    """Fewest edge deletions making ``g`` bipartite: e(g) minus the maximum cut."""
    if g.order > BIPARTIZATION_CAPACITY:
        raise CapacityError(f"exact bipartization is capped at {BIPARTIZATION_CAPACITY} vertices")
    return g.edge_count - kernels.max_cut(g.adj, g.order)


def kpartization_distance_exact(g: Graph, k: int) -> int:
    """Fewest edge deletions making ``g`` k-partite."""
    if k < 1:
        raise InvalidArgument("k must be positive")
    cap = BIPARTIZATION_CAPACITY if k <= 2 else KPARTIZATION_CAPACITY
    if g.order > cap:
        raise CapacityError(f"exact {k}-partization is capped at {cap} vertices")
    if k == 1:
        return g.edge_count
    if k >= g.order:
        return 0
    order = _greedy_order(range(g.order), g.adj)
    h = g.induced(order)
    # greedy seed: each vertex joins the class where it adds the fewest edges
    classes = [0] * k
    greedy = 0
    for v in range(h.order):
        i = min(range(k), key=lambda j: ((h.adj[v] & classes[j]).bit_count(), j))
        greedy += (h.adj[v] & classes[i]).bit_count()
        classes[i] |= 1 << v
    return kernels.min_kpartition_defect(h.adj, h.order, k, greedy + 1)


# -- Shearer's lemma and the k-partite edge bound ----------------------------------


@dataclass(frozen=True)
class InequalityReport:
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def equality(self) -> bool:
        return self.lhs == self.rhs


def _as_mask(x) -> int:
    return x.bits if isinstance(x, SubsetMask) else int(x)


def shearer_check(ground, cover: Iterable, r: int, fam: Iterable) -> InequalityReport:
    """|fam|^r against the product of projection sizes over an r-cover of ``ground``."""
    ground = _as_mask(ground)
    cover = [_as_mask(a) for a in cover]
    members = {_as_mask(x) for x in fam}
    if r < 1:
        raise InvalidArgument("r must be positive")
    for a in cover:
        if a & ~ground:
            raise InvalidArgument("cover sets must lie inside the ground set")
    for x in members:
        if x & ~ground:
            raise InvalidArgument("family members must lie inside the ground set")
    for e in _bits(ground):
        if sum(1 for a in cover if a >> e & 1) < r:
            raise InvalidArgument(f"element {e + 1} lies in fewer than {r} cover sets")
    rhs = 1
    for a in cover:
        rhs *= len({x & a for x in members})
    return InequalityReport(len(members) ** r, rhs)


def kpartite_edge_bound_check(g: Graph, parts: Sequence[Sequence[int]]) -> InequalityReport:
    """e(g)^k against C(k,2)^k K_k(g)^2 for a k-partite ``g`` with the given classes."""
    seen = []
    for part in parts:
        seen.extend(part)
    if sorted(seen) != list(range(g.order)):
        raise InvalidArgument("parts must partition the vertex set")
    if intra_class_edges(g, parts):
        raise InvalidArgument("an edge lies inside a class")
    k = len(parts)
    kk = clique_count(g, k)
    return InequalityReport(math.comb(k, 2) ** k * kk * kk, g.edge_count**k)


# -- sampled K_r density bound -------------------------------------------------------


def turan_density_term(k: int, r: int, l: int) -> Fraction:
    """k(k-1)...(k-r+1)/k^r * l^r/(l(l-1)...(l-r+1))."""
    return Fraction(math.perm(k, r), k**r) * Fraction(l**r, math.perm(l, r))


def sampled_density_bound(g: Graph, k: int, r: int, l: int) -> Fraction:
    """Upper bound on the K_r density from the l-subset decomposition.

    zeta is the exact fraction of l-subsets containing a K_{k+1}; those
    subsets contribute at most 1, the rest at most the Turán term.
    """
    n = g.order
    if not (1 <= r <= k < l <= n):
        raise InvalidArgument(f"need 1 <= r <= k < l <= order, got r={r}, k={k}, l={l}, order={n}")
    total = math.comb(n, l)
    if total > SUBSET_ENUMERATION_CAPACITY:
        raise CapacityError(f"{total} subsets of size {l} exceed {SUBSET_ENUMERATION_CAPACITY}")
    big = [sum(1 << v for v in c) for c in cliques(g, k + 1)]
    hit = 0
    if big:
        for u in combinations(range(n), l):
            mask = sum(1 << v for v in u)
            if any(c & mask == c for c in big):
                hit += 1
    zeta = Fraction(hit, total)
    return (1 - zeta) * turan_density_term(k, r, l) + zeta
