"""Disjointness graphs, Turán graphs, exact clique and homomorphism counts.

A :class:`Graph` stores one neighbour bitset per vertex (0-based).  Exact
counting runs through :mod:`genset.kernels`, which uses compiled kernels for
graphs of order at most 64.  All densities are exact :class:`Fraction` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, perm
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import kernels
from .errors import CapacityError, FamilyParseError, InvalidArgument
from .setfam import SetFamily, mask_of

GRAPH_CAPACITY = 1 << 14
COUNT_CAPACITY = 64
PATTERN_CAPACITY = 12
CHROMATIC_CAPACITY = 30


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Finite simple graph on vertices ``0..order-1``."""

    order: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.order < 0 or len(self.adj) != self.order:
            raise InvalidArgument("adjacency length must equal the order")
        if self.order > GRAPH_CAPACITY:
            raise CapacityError(f"graph order {self.order} exceeds {GRAPH_CAPACITY}")
        for v, nb in enumerate(self.adj):
            if nb >> v & 1:
                raise InvalidArgument(f"self-loop at vertex {v}")
            if nb >> self.order:
                raise InvalidArgument(f"vertex {v} has a neighbour outside the graph")
            for u in _bits(nb):
                if not self.adj[u] >> v & 1:
                    raise InvalidArgument(f"asymmetric adjacency between {v} and {u}")

    @classmethod
    def from_edges(cls, order: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * order
        for u, v in edges:
            if u == v:
                raise InvalidArgument(f"self-loop at vertex {u}")
            if not (0 <= u < order and 0 <= v < order):
                raise InvalidArgument(f"edge ({u}, {v}) outside the vertex range")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(order, tuple(adj))

    @classmethod
    def empty(cls, order: int) -> "Graph":
        return cls(order, (0,) * order)

    @classmethod
    def complete(cls, order: int) -> "Graph":
        full = (1 << order) - 1
        return cls(order, tuple(full & ~(1 << v) for v in range(order)))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.order) for v in _bits(self.adj[u] >> (u + 1) << (u + 1))]

    @property
    def edge_count(self) -> int:
        return sum(nb.bit_count() for nb in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        mask = sum(1 << v for v in set(vs))
        return all((self.adj[v] | 1 << v) & mask == mask for v in vs)

    def common_neighbors(self, vertices: Iterable[int]) -> int:
        """Bitset of vertices adjacent to every vertex in ``vertices``."""
        out = (1 << self.order) - 1
        for v in vertices:
            out &= self.adj[v]
        return out

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled in the order given."""
        pos = {v: i for i, v in enumerate(vertices)}
        adj = []
        for v in vertices:
            nb = 0
            for u in _bits(self.adj[v]):
                if u in pos:
                    nb |= 1 << pos[u]
            adj.append(nb)
        return Graph(len(vertices), tuple(adj))

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "Graph":
        return Graph.from_edges(self.order, list(self.edges()) + list(extra))

    def without_edges(self, drop: Iterable[tuple[int, int]]) -> "Graph":
        gone = {(min(u, v), max(u, v)) for u, v in drop}
        return Graph.from_edges(self.order, [e for e in self.edges() if e not in gone])

    def disjoint_union(self, other: "Graph") -> "Graph":
        shift = self.order
        return Graph(self.order + other.order, self.adj + tuple(nb << shift for nb in other.adj))


@dataclass(frozen=True)
class PatternGraph:
    """Small labelled pattern graph on vertices ``0..order-1``."""

    order: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.order < 0:
            raise InvalidArgument("pattern order must be non-negative")
        if self.order > PATTERN_CAPACITY:
            raise CapacityError(f"pattern order {self.order} exceeds {PATTERN_CAPACITY}")
        norm = set()
        for u, v in self.edges:
            if u == v or not (0 <= u < self.order and 0 <= v < self.order):
                raise InvalidArgument(f"bad pattern edge ({u}, {v})")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def adjacency(self) -> tuple[int, ...]:
        adj = [0] * self.order
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.order, self.edges)

    @classmethod
    def from_graph(cls, g: Graph) -> "PatternGraph":
        return cls(g.order, tuple(g.edges()))


@dataclass(frozen=True)
class BlowupSpec:
    t: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        if any(x < 1 for x in self.t):
            raise InvalidArgument("blow-up multiplicities must be positive")


def cycle(length: int) -> PatternGraph:
    if length < 3:
        raise InvalidArgument(f"cycle length must be at least 3, got {length}")
    return PatternGraph(length, tuple((i, (i + 1) % length) for i in range(length)))


def complete(r: int) -> PatternGraph:
    if r < 1:
        raise InvalidArgument(f"complete graph needs at least one vertex, got {r}")
    return PatternGraph(r, tuple(combinations(range(r), 2)))


def path(f: int) -> PatternGraph:
    if f < 1:
        raise InvalidArgument("path needs at least one vertex")
    return PatternGraph(f, tuple((i, i + 1) for i in range(f - 1)))


def blow_up(p: PatternGraph, spec: BlowupSpec | Sequence[int]) -> PatternGraph:
    t = spec.t if isinstance(spec, BlowupSpec) else BlowupSpec(tuple(spec)).t
    if len(t) != p.order:
        raise InvalidArgument(f"need {p.order} multiplicities, got {len(t)}")
    total = sum(t)
    if total > PATTERN_CAPACITY:
        raise CapacityError(f"blow-up order {total} exceeds {PATTERN_CAPACITY}")
    starts = [0]
    for x in t:
        starts.append(starts[-1] + x)
    edges = []
    for i, j in p.edges:
        for a in range(starts[i], starts[i + 1]):
            for b in range(starts[j], starts[j + 1]):
                edges.append((a, b))
    return PatternGraph(total, tuple(edges))


def disjointness_graph(f: SetFamily) -> Graph:
    """Vertex ``i`` is the ``i``-th member; members are adjacent iff disjoint."""
    m = len(f)
    if m > GRAPH_CAPACITY:
        raise CapacityError(f"family of {m} members exceeds the graph capacity {GRAPH_CAPACITY}")
    members = f.members
    adj = []
    for i, x in enumerate(members):
        nb = 0
        for j, y in enumerate(members):
            if i != j and not x & y:
                nb |= 1 << j
        adj.append(nb)
    return Graph(m, tuple(adj))


def kneser_graph(n: int, r: int) -> Graph:
    """K(n, r): the disjointness graph on the r-subsets of [n]."""
    fam = SetFamily.of(n, (mask_of(c) for c in combinations(range(1, n + 1), r)))
    return disjointness_graph(fam)


def turan_classes(s: int, n: int) -> list[list[int]]:
    return [list(range(c, n, s)) for c in range(s)]


def turan_graph(s: int, n: int) -> Graph:
    """T_s(n) with vertex ``v`` in class ``v mod s``."""
    if not (1 <= s <= n):
        raise InvalidArgument(f"need 1 <= s <= n, got s={s}, n={n}")
    full = (1 << n) - 1
    class_mask = [sum(1 << v for v in range(c, n, s)) for c in range(s)]
    return Graph(n, tuple(full & ~class_mask[v % s] for v in range(n)))


def turan_edge_count(s: int, n: int) -> int:
    q, r = divmod(n, s)
    sizes = [q + 1] * r + [q] * (s - r)
    return (n * n - sum(x * x for x in sizes)) // 2


def petersen_graph() -> Graph:
    return kneser_graph(5, 2)


# -- cliques -----------------------------------------------------------------------


@lru_cache(maxsize=512)
def all_clique_counts(g: Graph) -> tuple[int, ...]:
    """``counts[r]`` = number of r-cliques for r = 0..order."""
    if g.order > COUNT_CAPACITY:
        raise CapacityError(f"exact clique counting is capped at {COUNT_CAPACITY} vertices")
    return tuple(kernels.clique_counts(g.adj, g.order))


def clique_count(g: Graph, r: int) -> int:
    if r < 0:
        raise InvalidArgument("clique size must be non-negative")
    if r > g.order:
        return 0
    return all_clique_counts(g)[r]


def clique_number(g: Graph) -> int:
    counts = all_clique_counts(g)
    return max(r for r, c in enumerate(counts) if c)


def clique_density(g: Graph, r: int, *, strict: bool = False) -> Fraction:
    """K_r(g) / C(order, r).  Graphs with fewer than ``r`` vertices give 0 unless ``strict``."""
    if r > g.order:
        if strict:
            raise InvalidArgument(f"graph of order {g.order} has no {r}-subsets")
        return Fraction(0)
    return Fraction(clique_count(g, r), comb(g.order, r))


def cliques(g: Graph, r: int) -> list[tuple[int, ...]]:
    """All r-cliques as sorted vertex tuples, in lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(cand: int, chosen: list[int]):
        if len(chosen) == r:
            out.append(tuple(chosen))
            return
        for v in _bits(cand):
            chosen.append(v)
            rec(cand & g.adj[v] & ~((1 << (v + 1)) - 1), chosen)
            chosen.pop()

    rec((1 << g.order) - 1, [])
    return out


# -- homomorphisms -----------------------------------------------------------------


@lru_cache(maxsize=256)
def _hom_plan(p: PatternGraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    adj = p.adjacency
    f = p.order
    # a maximum independent set goes last: its vertices only read assigned neighbours
    best = 0
    for s in range(1 << f):
        if s.bit_count() > best.bit_count() and all(not adj[v] & s for v in _bits(s)):
            best = s
    cover = [v for v in range(f) if not best >> v & 1]
    order = _greedy_order(cover, adj)
    pos = {v: i for i, v in enumerate(order)}
    prev = tuple(sum(1 << pos[u] for u in _bits(adj[v]) if u in pos and pos[u] < i)
                 for i, v in enumerate(order))
    free = tuple(sum(1 << pos[u] for u in _bits(adj[w])) for w in _bits(best))
    return prev, free


def _greedy_order(vertices: Sequence[int], adj: Sequence[int]) -> list[int]:
    """Order vertices so each has many earlier neighbours (tighter candidate sets)."""
    rest = set(vertices)
    order: list[int] = []
    placed = 0
    while rest:
        v = max(rest, key=lambda u: ((adj[u] & placed).bit_count(), adj[u].bit_count(), -u))
        order.append(v)
        placed |= 1 << v
        rest.remove(v)
    return order


@lru_cache(maxsize=256)
def _injective_plan(p: PatternGraph) -> tuple[int, ...]:
    adj = p.adjacency
    order = _greedy_order(range(p.order), adj)
    pos = {v: i for i, v in enumerate(order)}
    return tuple(sum(1 << pos[u] for u in _bits(adj[v]) if pos[u] < i) for i, v in enumerate(order))


def _check_target(g: Graph) -> None:
    if g.order > COUNT_CAPACITY:
        raise CapacityError(f"homomorphism counting is capped at {COUNT_CAPACITY} target vertices")


def hom_count(p: PatternGraph, g: Graph) -> int:
    """Number of edge-preserving maps V(p) -> V(g)."""
    _check_target(g)
    prev, free = _hom_plan(p)
    return kernels.hom_count(prev, free, g.adj, g.order)


def injective_hom_count(p: PatternGraph, g: Graph) -> int:
    _check_target(g)
    if p.order > g.order:
        return 0
    return kernels.injective_hom_count(_injective_plan(p), g.adj, g.order)


def hom_density(p: PatternGraph, g: Graph) -> Fraction:
    if g.order == 0:
        raise InvalidArgument("homomorphism density into the empty graph is undefined")
    return Fraction(hom_count(p, g), g.order ** p.order)


def injective_density(p: PatternGraph, g: Graph) -> Fraction:
    if g.order < p.order or g.order == 0:
        raise InvalidArgument(f"need at least {p.order} target vertices, got {g.order}")
    return Fraction(injective_hom_count(p, g), perm(g.order, p.order))


def noninjective_bound(p: PatternGraph, g: Graph) -> int:
    """C(f, 2) * n**(f-1): at most this many homomorphisms fail to be injective."""
    return comb(p.order, 2) * g.order ** (p.order - 1) if p.order else 0


# -- colouring ---------------------------------------------------------------------


def _greedy_dsatur(g: Graph) -> int:
    n = g.order
    color = [-1] * n
    used = 0
    for _ in range(n):
        best = None
        for v in range(n):
            if color[v] >= 0:
                continue
            sat = len({color[u] for u in _bits(g.adj[v]) if color[u] >= 0})
            key = (sat, g.degree(v), -v)
            if best is None or key > best[0]:
                best = (key, v)
        v = best[1]
        taken = {color[u] for u in _bits(g.adj[v])}
        c = next(c for c in range(n) if c not in taken)
        color[v] = c
        used = max(used, c + 1)
    return used


def is_colorable(g: Graph, c: int) -> bool:
    """Exact c-colourability by DSATUR-ordered backtracking."""
    n = g.order
    if n == 0:
        return True
    if c <= 0:
        return False
    classes = [0] * c
    colored = 0

    def pick() -> int:
        best_key = None
        best_v = -1
        for v in range(n):
            if colored >> v & 1:
                continue
            sat = sum(1 for cl in classes if cl & g.adj[v])
            key = (sat, (g.adj[v] & ~colored).bit_count(), -v)
            if best_key is None or key > best_key:
                best_key, best_v = key, v
        return best_v

    def rec(count: int, used: int) -> bool:
        nonlocal colored
        if count == n:
            return True
        v = pick()
        bit = 1 << v
        for col in range(min(used + 1, c)):
            if classes[col] & g.adj[v]:
                continue
            classes[col] |= bit
            colored |= bit
            if rec(count + 1, max(used, col + 1)):
                return True
            classes[col] &= ~bit
            colored &= ~bit
        return False

    return rec(0, 0)


def chromatic_number(g: Graph) -> int:
    if g.order > CHROMATIC_CAPACITY:
        raise CapacityError(f"exact chromatic number is capped at {CHROMATIC_CAPACITY} vertices")
    if g.order == 0:
        return 0
    lower = clique_number(g)
    upper = _greedy_dsatur(g)
    for c in range(lower, upper):
        if is_colorable(g, c):
            return c
    return upper


def is_bipartite(g: Graph) -> bool:
    side = [-1] * g.order
    for s in range(g.order):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in _bits(g.adj[v]):
                if side[u] < 0:
                    side[u] = 1 - side[v]
                    stack.append(u)
                elif side[u] == side[v]:
                    return False
    return True


# -- text format -------------------------------------------------------------------


def format_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"graph n={g.order} m={len(edges)}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    order = None
    m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if order is None:
            parts = line.split()
            try:
                if parts[0] != "graph":
                    raise ValueError
                fields = dict(p.split("=", 1) for p in parts[1:])
                order, m = int(fields["n"]), int(fields["m"])
            except (ValueError, KeyError, IndexError):
                raise FamilyParseError("expected header 'graph n=<int> m=<int>'", lineno) from None
            continue
        try:
            u, v = (int(x) for x in line.split())
        except ValueError:
            raise FamilyParseError(f"bad edge line {line!r}", lineno) from None
        if not (1 <= u <= order and 1 <= v <= order) or u == v:
            raise FamilyParseError(f"edge ({u}, {v}) invalid for n={order}", lineno)
        edges.append((u - 1, v - 1))
    if order is None:
        raise FamilyParseError("missing graph header", 1)
    g = Graph.from_edges(order, edges)
    if g.edge_count != m:
        raise FamilyParseError(f"header declares m={m} but {g.edge_count} distinct edges were read")
    return g


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


def edge_product(p: PatternGraph, t: Sequence[int]) -> int:
    """Edge count of the blow-up p ⊗ t, i.e. the sum of t_i t_j over pattern edges."""
    return sum(t[i] * t[j] for i, j in p.edges)
