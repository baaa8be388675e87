"""Seeded Monte-Carlo estimators over a set family, with exact oracles.

Members are drawn uniformly *with replacement* unless a routine says
otherwise.  Every estimator is deterministic in ``(inputs, trials, seed)``
regardless of ``threads``; see :mod:`genset.rng` for the stream layout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import rng
from .errors import EmptyDomainError, InvalidArgument
from .kneser import blow_up, complete, cycle, disjointness_graph, hom_density, is_bipartite, Graph
from .setfam import SetFamily

CHUNK = 4096


@dataclass(frozen=True)
class DensityEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int
    successes: int

    @classmethod
    def from_successes(cls, successes: int, trials: int, seed: int) -> "DensityEstimate":
        mean = successes / trials
        return cls(mean, math.sqrt(mean * (1 - mean) / trials), trials, seed, successes)

    def within(self, exact, sigmas: float = 4.0) -> bool:
        return abs(self.mean - float(exact)) <= sigmas * self.std_error

    def to_json(self, exact=None) -> dict:
        out = {
            "mean": self.mean,
            "std_error": self.std_error,
            "trials": self.trials,
            "seed": self.seed,
            "successes": self.successes,
        }
        if self.successes == 0:
            # rule of three: one-sided 95% bound when nothing was observed
            out["upper_95"] = 3 / self.trials
        if exact is not None:
            out["exact"] = str(Fraction(exact))
            out["exact_float"] = float(exact)
        return out


def _members(f: SetFamily) -> np.ndarray:
    if len(f) == 0:
        raise EmptyDomainError("cannot sample from an empty family")
    return np.asarray(f.members, dtype=np.int64)


def _check(trials: int, seed: int) -> None:
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    if not (0 <= seed < 2**64):
        raise InvalidArgument("seed must be an unsigned 64-bit integer")


def _run(trials: int, threads: int, chunk_fn) -> int:
    """Sum ``chunk_fn(start, stop)`` over fixed trial chunks."""
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(lambda b: chunk_fn(*b), bounds))
    return sum(chunk_fn(*b) for b in bounds)


def _sample_unions(members: np.ndarray, seed: int, start: int, stop: int, groups: int, t: int):
    raw = rng.draw_matrix(seed, start, stop, groups * t)
    idx = rng.bounded_array(raw, len(members)).astype(np.int64)
    picked = members[idx].reshape(stop - start, groups, t)
    return np.bitwise_or.reduce(picked, axis=2)


def estimate_blowup_density(f: SetFamily, parts: int, t: int, trials: int, seed: int = 0,
                            threads: int = 1) -> DensityEstimate:
    """Estimate the homomorphism density of K_parts ⊗ t in the disjointness graph of ``f``.

    Each trial draws ``parts * t`` members with replacement, forms the ``parts``
    unions of ``t`` members each, and succeeds iff the unions are pairwise
    disjoint.
    """
    members = _members(f)
    _check(trials, seed)
    if parts < 1 or t < 1:
        raise InvalidArgument("parts and t must be positive")

    def chunk(start, stop):
        unions = _sample_unions(members, seed, start, stop, parts, t)
        acc = np.zeros(stop - start, dtype=np.int64)
        ok = np.ones(stop - start, dtype=bool)
        for i in range(parts):
            ok &= (acc & unions[:, i]) == 0
            acc |= unions[:, i]
        return int(ok.sum())

    return DensityEstimate.from_successes(_run(trials, threads, chunk), trials, seed)


def estimate_odd_cycle_density(f: SetFamily, l: int, t: int, trials: int, seed: int = 0,
                               threads: int = 1) -> DensityEstimate:
    """Estimate the homomorphism density of C_{2l+1} ⊗ t (cyclically disjoint unions)."""
    members = _members(f)
    _check(trials, seed)
    if l < 1 or t < 1:
        raise InvalidArgument("l and t must be positive")
    length = 2 * l + 1

    def chunk(start, stop):
        unions = _sample_unions(members, seed, start, stop, length, t)
        ok = np.ones(stop - start, dtype=bool)
        for i in range(length):
            ok &= (unions[:, i] & unions[:, (i + 1) % length]) == 0
        return int(ok.sum())

    return DensityEstimate.from_successes(_run(trials, threads, chunk), trials, seed)


def _popcount(a: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a)
    out = np.zeros_like(a)
    x = a.copy()
    while x.any():
        out += x & 1
        x >>= 1
    return out


def empirical_union_tail(f: SetFamily, t: int, theta, trials: int, seed: int = 0,
                         threads: int = 1) -> DensityEstimate:
    """Estimate Pr(|union of t uniform members| <= theta * n)."""
    members = _members(f)
    _check(trials, seed)
    theta = Fraction(theta)
    if t < 1 or not (0 <= theta <= 1):
        raise InvalidArgument("need t >= 1 and 0 <= theta <= 1")
    limit = math.floor(theta * f.ground_n)

    def chunk(start, stop):
        unions = _sample_unions(members, seed, start, stop, 1, t)[:, 0]
        return int((_popcount(unions) <= limit).sum())

    return DensityEstimate.from_successes(_run(trials, threads, chunk), trials, seed)


def analytic_tail_bound(n: int, m: int, t: int, theta) -> Fraction:
    """sum_{s <= theta n} C(n, s) (2^s / m)^t, exactly."""
    theta = Fraction(theta)
    if m < 1 or t < 1 or not (0 <= theta <= 1):
        raise InvalidArgument("need m >= 1, t >= 1 and 0 <= theta <= 1")
    top = math.floor(theta * n)
    return sum((math.comb(n, s) * Fraction(2**s, m) ** t for s in range(top + 1)), Fraction(0))


def odd_cycle_subset_test(f: SetFamily, s: int, trials: int, seed: int = 0,
                          threads: int = 1) -> DensityEstimate:
    """Estimate Pr(a uniform (2s+1)-subset of ``f`` spans a non-bipartite disjointness graph)."""
    members = _members(f)
    _check(trials, seed)
    size = 2 * s + 1
    m = len(members)
    if s < 0 or size > m:
        raise InvalidArgument(f"cannot draw {size} distinct members from {m}")

    def chunk(start, stop):
        rows = stop - start
        raw = rng.draw_matrix(seed, start, stop, size)
        perm = np.tile(np.arange(m, dtype=np.int64), (rows, 1))
        ar = np.arange(rows)
        # partial Fisher-Yates: position j swaps with a uniform index in [j, m)
        for j in range(size):
            r = j + rng.bounded_array(raw[:, j], m - j).astype(np.int64)
            tmp = perm[ar, j].copy()
            perm[ar, j] = perm[ar, r]
            perm[ar, r] = tmp
        chosen = members[perm[:, :size]]
        hits = 0
        for row in chosen.tolist():
            if not is_bipartite(_disjointness_of(row)):
                hits += 1
        return hits

    return DensityEstimate.from_successes(_run(trials, threads, chunk), trials, seed)


def _disjointness_of(masks) -> Graph:
    adj = []
    for i, x in enumerate(masks):
        nb = 0
        for j, y in enumerate(masks):
            if i != j and not x & y:
                nb |= 1 << j
        adj.append(nb)
    return Graph(len(masks), tuple(adj))


# -- exact oracles ------------------------------------------------------------------


def exact_blowup_density(f: SetFamily, parts: int, t: int) -> Fraction:
    """Exact homomorphism density of K_parts ⊗ t in the disjointness graph of ``f``.

    Matches the sampled event when the empty set is not a member (the graph
    has no loops, while the empty set is disjoint from itself).
    """
    pattern = blow_up(complete(parts), [t] * parts)
    return hom_density(pattern, disjointness_graph(f))


def exact_odd_cycle_density(f: SetFamily, l: int, t: int) -> Fraction:
    pattern = blow_up(cycle(2 * l + 1), [t] * (2 * l + 1))
    return hom_density(pattern, disjointness_graph(f))


def exact_union_tail(f: SetFamily, t: int, theta) -> Fraction:
    """Exact Pr(|union of t uniform members| <= theta n), by convolving union distributions."""
    members = f.members
    if not members:
        raise EmptyDomainError("empty family")
    limit = math.floor(Fraction(theta) * f.ground_n)
    dist = {0: 1}
    for _ in range(t):
        nxt: dict[int, int] = {}
        for u, c in dist.items():
            for x in members:
                key = u | x
                nxt[key] = nxt.get(key, 0) + c
        dist = nxt
    good = sum(c for u, c in dist.items() if u.bit_count() <= limit)
    return Fraction(good, len(members) ** t)


def exact_odd_cycle_subset_probability(f: SetFamily, s: int) -> Fraction:
    members = f.members
    size = 2 * s + 1
    total = 0
    hits = 0
    for combo in combinations(members, size):
        total += 1
        if not is_bipartite(_disjointness_of(combo)):
            hits += 1
    return Fraction(hits, total)


def brute_force_blowup_density(f: SetFamily, parts: int, t: int) -> Fraction:
    """Enumerate all draw tuples; only for tiny families."""
    members = f.members
    good = 0
    for combo in product(members, repeat=parts * t):
        unions = [0] * parts
        for i in range(parts):
            for x in combo[i * t:(i + 1) * t]:
                unions[i] |= x
        if all(not unions[i] & unions[j] for i in range(parts) for j in range(i + 1, parts)):
            good += 1
    return Fraction(good, len(members) ** (parts * t))
