"""Exact search for minimum k-generators and k-bases, plus the six-block counterexample.

The branch-and-bound works on the coverage tables of :mod:`genset.setfam`.
Every singleton is forced (a singleton is only ever the union of itself).
After that each node takes the numerically smallest uncovered target ``x``;
any completion must add some new member inside ``x``, so the node branches over
those candidates, with branch ``i`` adding candidate ``i`` and forbidding the
earlier ones.  Every family is therefore reached along exactly one path.

At the root the target is ``{1..k+1}`` and the state is invariant under
permutations fixing that set, so one representative per candidate size is
explored.  When all optima are wanted, the found ones are closed under the
full symmetric group at the end.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .errors import CapacityError, InvalidArgument
from .kneser import Graph, chromatic_number, disjointness_graph, kneser_graph
from .setfam import (
    GroundPartition,
    SetFamily,
    canonical_generator,
    balanced_partition,
    canonical_size,
    counting_lower_bound,
    coverage_levels,
    extend_levels,
    format_family,
    submasks,
)
from .stability import kpartization_distance_exact

SEARCH_GROUND_CAPACITY = 10
ORBIT_GROUND_CAPACITY = 8
NAIVE_GROUND_CAPACITY = 4
MODES = ("generator", "base")


@dataclass(frozen=True)
class SearchResult:
    n: int
    k: int
    mode: str
    min_size: int
    optima: tuple[SetFamily, ...]
    nodes: int
    status: str
    lower: int
    upper: int
    optima_count: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "min_size": self.min_size,
            "status": self.status,
            "lower": self.lower,
            "upper": self.upper,
            "nodes": self.nodes,
            "optima_count": self.optima_count,
            "optima": [format_family(f) for f in self.optima],
            "elapsed_seconds": round(self.elapsed, 6),
        }


class _Stop(Exception):
    def __init__(self, status: str):
        self.status = status


def _new_capacity(size: int, extra: int, k: int) -> int:
    """Most subsets that ``extra`` new members can newly cover next to ``size`` old ones."""
    return sum(math.comb(size + extra, i) - math.comb(size, i) for i in range(1, k + 1))


def _lowest_zero(table: int) -> int:
    return (~table & (table + 1)).bit_length() - 1


def _subsets_of_size(x: int, j: int) -> int:
    out = 0
    for s in submasks(x):
        if s.bit_count() == j:
            out |= 1 << s
    return out


class _BranchAndBound:
    def __init__(self, n, k, disjoint, limit, collect, deadline, node_cap):
        self.n = n
        self.k = k
        self.disjoint = disjoint
        self.limit = limit
        self.collect = collect
        self.deadline = deadline
        self.node_cap = node_cap
        self.full = (1 << (1 << n)) - 1
        self.total = 1 << n
        self.nodes = 0
        self.best = None
        self.found: list[int] = []

    def _tick(self):
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise _Stop("capped")
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise _Stop("timeout")

    def _record(self, size, have):
        if self.collect:
            if self.best is None or size < self.best:
                self.best = size
                self.found = []
                self.limit = size
            self.found.append(have)
        else:
            self.best = size
            self.found = [have]
            self.limit = size - 1

    def _viable(self, levels, size) -> bool:
        extra = self.limit - size
        if extra <= 0:
            return False
        missing = self.total - levels[self.k].bit_count()
        return _new_capacity(size, extra, self.k) >= missing

    def _child(self, levels, have, forb, size, s):
        self.visit(extend_levels(levels, s, self.n, self.disjoint), have | 1 << s, forb, size + 1)

    def visit(self, levels, have, forb, size):
        self._tick()
        cov = levels[self.k]
        if cov == self.full:
            self._record(size, have)
            return
        if not self._viable(levels, size):
            return
        x = _lowest_zero(cov)
        cands = [s for s in submasks(x) if s and not (have | forb) >> s & 1]
        cands.sort(key=lambda s: (-s.bit_count(), s))
        for s in cands:
            if self.limit - size <= 0:
                return
            self._child(levels, have, forb, size, s)
            forb |= 1 << s

    def root(self):
        n, k = self.n, self.k
        singles = [1 << i for i in range(n)]
        levels = coverage_levels(singles, n, k, self.disjoint)
        have = sum(1 << s for s in singles)
        size = n
        self._tick()
        if levels[k] == self.full:
            self._record(size, have)
            return
        if not self._viable(levels, size):
            return
        x = _lowest_zero(levels[k])
        # singletons cover every set of size <= k, so the first gap is {1..k+1}
        assert x == (1 << (k + 1)) - 1
        forb = 0
        for j in range(k + 1, 1, -1):
            if self.limit - size <= 0:
                return
            self._child(levels, have, forb, size, (1 << j) - 1)
            forb |= _subsets_of_size(x, j)


def _family_from_bits(n: int, have: int) -> SetFamily:
    members = []
    s = 0
    while have:
        if have & 1:
            members.append(s)
        have >>= 1
        s += 1
    return SetFamily(n, tuple(members))


def orbit_closure(families, n: int) -> list[SetFamily]:
    """All images of ``families`` under relabelings of the ground set, sorted."""
    if n > ORBIT_GROUND_CAPACITY:
        raise CapacityError(f"orbit closure needs n <= {ORBIT_GROUND_CAPACITY}")
    seen = set()
    for f in families:
        for perm in permutations(range(n)):
            seen.add(f.permuted(perm))
    return sorted(seen, key=lambda f: f.members)


def _check_search_args(n, k, mode):
    if mode not in MODES:
        raise InvalidArgument(f"mode must be one of {MODES}, got {mode!r}")
    if not (1 <= k <= n):
        raise InvalidArgument(f"need 1 <= k <= n, got n={n}, k={k}")
    if n > SEARCH_GROUND_CAPACITY:
        raise CapacityError(f"exact search supports n <= {SEARCH_GROUND_CAPACITY}")


def min_generator_size(
    n: int,
    k: int,
    mode: str = "generator",
    enumerate_optima: bool = False,
    budget_seconds: float | None = 60.0,
    node_cap: int | None = 5_000_000,
    optima_cap: int = 10_000,
) -> SearchResult:
    """Smallest k-generator (or k-base) of ``[n]``.

    Without ``enumerate_optima`` the search only tries to beat the canonical
    family; with it every optimum is returned (up to ``optima_cap``).
    """
    _check_search_args(n, k, mode)
    if enumerate_optima and n > ORBIT_GROUND_CAPACITY:
        raise CapacityError(f"optimum enumeration supports n <= {ORBIT_GROUND_CAPACITY}")
    start = time.monotonic()
    deadline = None if budget_seconds is None else start + budget_seconds
    canon = canonical_generator(balanced_partition(n, k))
    upper = len(canon)
    limit = upper if enumerate_optima else upper - 1
    bb = _BranchAndBound(n, k, mode == "generator", limit, enumerate_optima, deadline, node_cap)
    status = "complete"
    try:
        bb.root()
    except _Stop as stop:
        status = stop.status

    best = bb.best if bb.best is not None else upper
    found = [_family_from_bits(n, h) for h in bb.found]
    if not enumerate_optima and bb.best is None:
        found = [canon]
    lower = best if status == "complete" else max(n, counting_lower_bound(n, k))
    if enumerate_optima and status == "complete":
        optima = orbit_closure(found, n)
    else:
        optima = sorted(set(found), key=lambda f: f.members)
    count = len(optima)
    if count > optima_cap:
        optima = optima[:optima_cap]
        if status == "complete":
            status = "capped"
    return SearchResult(
        n, k, mode, best, tuple(optima), bb.nodes, status, lower, best, count,
        time.monotonic() - start,
    )


# -- independent oracle -------------------------------------------------------------


def _brute_covers(members, n, k, disjoint) -> bool:
    covered = {0}
    for r in range(1, k + 1):
        for combo in combinations(members, r):
            acc = 0
            ok = True
            for s in combo:
                if disjoint and acc & s:
                    ok = False
                    break
                acc |= s
            if ok:
                covered.add(acc)
    return len(covered) == 1 << n


def naive_min_size(n: int, k: int, mode: str = "generator") -> tuple[int, list[SetFamily]]:
    """Try every family of nonempty subsets in order of size; return the first size that works.

    No pruning, no symmetry breaking, no coverage tables.
    """
    _check_search_args(n, k, mode)
    if n > NAIVE_GROUND_CAPACITY:
        raise CapacityError(f"naive enumeration supports n <= {NAIVE_GROUND_CAPACITY}")
    universe = range(1, 1 << n)
    for m in range(0, 1 << n):
        hits = [
            SetFamily(n, combo)
            for combo in combinations(universe, m)
            if _brute_covers(combo, n, k, mode == "generator")
        ]
        if hits:
            return m, hits
    raise AssertionError("the family of all nonempty subsets always works")


# -- canonicity -------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicityVerdict:
    is_canonical: bool
    witness_partition: GroundPartition | None = None
    reason: str = ""

    def to_json(self) -> dict:
        out = {"is_canonical": self.is_canonical, "reason": self.reason}
        if self.witness_partition is not None:
            out["witness_partition"] = [list(b) for b in self.witness_partition.block_lists()]
        return out


def is_canonical(f: SetFamily, k: int) -> CanonicityVerdict:
    members = f.members
    maximal = [m for m in members if not any(m != o and m & o == m for o in members)]
    if len(maximal) != k:
        return CanonicityVerdict(False, reason=f"{len(maximal)} maximal members, expected {k}")
    seen = 0
    for b in maximal:
        if b & seen:
            return CanonicityVerdict(False, reason="maximal members overlap")
        seen |= b
    if seen != (1 << f.ground_n) - 1:
        return CanonicityVerdict(False, reason="maximal members do not cover the ground set")
    part = GroundPartition(f.ground_n, tuple(sorted(maximal)))
    if not part.is_balanced():
        return CanonicityVerdict(False, reason=f"block sizes {part.sizes} are not balanced")
    if canonical_generator(part) != f:
        return CanonicityVerdict(False, reason="family differs from the union of block power sets")
    return CanonicityVerdict(True, part, "ok")


def balanced_partition_count(n: int, k: int) -> int:
    """Number of unordered partitions of ``[n]`` into ``k`` blocks of balanced sizes."""
    if not (1 <= k <= n):
        raise InvalidArgument(f"need 1 <= k <= n, got n={n}, k={k}")
    q, r = divmod(n, k)
    denom = (
        math.factorial(q) ** (k - r)
        * math.factorial(q + 1) ** r
        * math.factorial(k - r)
        * math.factorial(r)
    )
    return math.factorial(n) // denom


@dataclass(frozen=True)
class ConjectureReport:
    n: int
    k: int
    min_size: int
    canonical_size: int
    status: str
    size_matches: bool
    uniqueness_checked: bool
    optima_count: int
    balanced_partitions: int
    all_canonical: bool
    distinct_partitions: int
    nodes: int

    @property
    def conclusive(self) -> bool:
        return self.status == "complete"

    @property
    def holds(self) -> bool | None:
        if not self.conclusive:
            return None
        if not self.size_matches:
            return False
        if self.uniqueness_checked:
            return (
                self.all_canonical
                and self.optima_count == self.balanced_partitions
                and self.distinct_partitions == self.optima_count
            )
        return True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "min_size": self.min_size,
            "canonical_size": self.canonical_size,
            "status": self.status,
            "conclusive": self.conclusive,
            "holds": self.holds,
            "size_matches": self.size_matches,
            "uniqueness_checked": self.uniqueness_checked,
            "optima_count": self.optima_count,
            "balanced_partitions": self.balanced_partitions,
            "all_canonical": self.all_canonical,
            "distinct_partitions": self.distinct_partitions,
            "nodes": self.nodes,
        }


def verify_conjecture(n: int, k: int, budget_seconds: float | None = 600.0,
                      node_cap: int | None = 20_000_000) -> ConjectureReport:
    """Compare the exact minimum with the canonical size; for n > 2k also check uniqueness."""
    unique = n > 2 * k
    res = min_generator_size(n, k, "generator", enumerate_optima=unique,
                             budget_seconds=budget_seconds, node_cap=node_cap)
    canon = canonical_size(n, k)
    verdicts = [is_canonical(f, k) for f in res.optima] if unique else []
    parts = {v.witness_partition for v in verdicts if v.is_canonical}
    return ConjectureReport(
        n=n,
        k=k,
        min_size=res.min_size,
        canonical_size=canon,
        status=res.status,
        size_matches=res.min_size == canon,
        uniqueness_checked=unique,
        optima_count=res.optima_count,
        balanced_partitions=balanced_partition_count(n, k),
        all_canonical=all(v.is_canonical for v in verdicts),
        distinct_partitions=len(parts),
        nodes=res.nodes,
    )


# -- the six-block construction ---------------------------------------------------------

COUNTEREXAMPLE_GROUND_CAPACITY = 18
BLOWUP_CHECK_CAPACITY = 12


def six_blocks(n: int) -> list[int]:
    if n < 6 or n % 6:
        raise InvalidArgument(f"n must be a positive multiple of 6, got {n}")
    size = n // 6
    return [((1 << size) - 1) << (i * size) for i in range(6)]


def counterexample_family(n: int) -> SetFamily:
    """All subsets of ``T_i ∪ T_j`` over pairs of the six equal consecutive blocks, deduplicated (``∅`` included)."""
    if n > COUNTEREXAMPLE_GROUND_CAPACITY:
        raise CapacityError(f"counterexample family supports n <= {COUNTEREXAMPLE_GROUND_CAPACITY}")
    blocks = six_blocks(n)
    members = set()
    for a, b in combinations(blocks, 2):
        members.update(submasks(a | b))
    return SetFamily(n, tuple(sorted(members)))


def counterexample_size(n: int) -> int:
    """Closed form by inclusion-exclusion over which blocks a set meets."""
    b = n // 6
    meets_one = (2**b - 1)
    return 1 + 6 * meets_one + 15 * meets_one**2


def two_element_graph(f: SetFamily) -> Graph:
    return disjointness_graph(SetFamily(f.ground_n, tuple(m for m in f.members if m.bit_count() == 2)))


@dataclass(frozen=True)
class BlowupReport:
    n: int
    class_size: int
    required_class_size: int
    classes_in_family: bool
    pairs_checked: int
    adjacency_ok: bool
    kneser_chromatic: int
    kneser_tripartization: int

    @property
    def passes(self) -> bool:
        return (
            self.classes_in_family
            and self.adjacency_ok
            and self.class_size >= self.required_class_size
            and self.kneser_chromatic == 4
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "class_size": self.class_size,
            "required_class_size": self.required_class_size,
            "classes_in_family": self.classes_in_family,
            "pairs_checked": self.pairs_checked,
            "adjacency_ok": self.adjacency_ok,
            "kneser_chromatic": self.kneser_chromatic,
            "kneser_tripartization": self.kneser_tripartization,
            "passes": self.passes,
        }


def blowup_classes(n: int) -> dict[tuple[int, int], list[int]]:
    """Class for pair (i, j): subsets of T_i ∪ T_j meeting both blocks."""
    blocks = six_blocks(n)
    out = {}
    for i, j in combinations(range(6), 2):
        a, b = blocks[i], blocks[j]
        out[(i, j)] = [x for x in submasks(a | b) if x & a and x & b]
    return out


def verify_kneser_blowup(n: int) -> BlowupReport:
    """Check exhaustively that the disjointness graph of the family contains a blow-up of K(6,2)."""
    if n > BLOWUP_CHECK_CAPACITY:
        raise CapacityError(f"blow-up check supports n <= {BLOWUP_CHECK_CAPACITY}")
    fam = counterexample_family(n)
    classes = blowup_classes(n)
    inside = all(x in fam for cls in classes.values() for x in cls)
    pairs = 0
    ok = True
    for (p, cp), (q, cq) in combinations(classes.items(), 2):
        if set(p) & set(q):
            continue
        for x in cp:
            for y in cq:
                pairs += 1
                ok &= not x & y
    base = kneser_graph(6, 2)
    return BlowupReport(
        n=n,
        class_size=min(len(c) for c in classes.values()),
        required_class_size=2 ** (n // 3 - 2),
        classes_in_family=inside,
        pairs_checked=pairs,
        adjacency_ok=ok,
        kneser_chromatic=chromatic_number(base),
        kneser_tripartization=kpartization_distance_exact(base, 3),
    )

