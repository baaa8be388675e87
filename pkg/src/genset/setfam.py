"""Set families over a small ground set, canonical k-generators and coverage.

Subsets of the ground set ``[n] = {1, ..., n}`` are encoded as integers: element
``i`` corresponds to bit ``i - 1``.  Coverage tables over all ``2**n`` subsets
are themselves stored as (big) Python integers whose bit ``x`` says whether the
subset with mask ``x`` is generated.  Extending such a table by one new member
``s`` is then a handful of whole-table shifts and masks, which keeps the
k-fold disjoint-union convolution at C speed without a compiled kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, FamilyParseError, InvalidArgument

MAX_GROUND = 30
MAX_COVERAGE_GROUND = 24

#: 2 / (2**(1/ln 2) * ln 2) = 2 / (e ln 2), the constant of the crude upper bound.
C0 = 2.0 / (2.0 ** (1.0 / math.log(2.0)) * math.log(2.0))


def _check_ground(n: int, cap: int = MAX_GROUND) -> None:
    if not isinstance(n, int) or n < 0:
        raise InvalidArgument(f"ground size must be a non-negative integer, got {n!r}")
    if n > cap:
        raise CapacityError(f"ground size {n} exceeds the cap of {cap}")


def mask_of(elements: Iterable[int]) -> int:
    """Mask of a collection of 1-based elements."""
    m = 0
    for e in elements:
        if e < 1:
            raise InvalidArgument(f"elements are 1-based, got {e}")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` in decreasing numeric order, ending with 0."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


@dataclass(frozen=True)
class SubsetMask:
    bits: int
    ground_n: int

    def __post_init__(self):
        _check_ground(self.ground_n)
        if self.bits < 0 or self.bits >> self.ground_n:
            raise InvalidArgument(f"mask {self.bits:#x} has bits outside [1, {self.ground_n}]")

    @classmethod
    def from_elements(cls, elements: Iterable[int], ground_n: int) -> "SubsetMask":
        return cls(mask_of(elements), ground_n)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def elements(self) -> tuple[int, ...]:
        return elements_of(self.bits)


@dataclass(frozen=True)
class SetFamily:
    """A deduplicated family of subsets of ``[ground_n]``, sorted by mask value."""

    ground_n: int
    members: tuple[int, ...] = ()

    def __post_init__(self):
        _check_ground(self.ground_n)
        limit = 1 << self.ground_n
        prev = -1
        for m in self.members:
            if not isinstance(m, int) or m < 0 or m >= limit:
                raise InvalidArgument(f"member {m!r} is not a subset of [{self.ground_n}]")
            if m <= prev:
                raise InvalidArgument("members must be strictly increasing; use SetFamily.of()")
            prev = m

    @classmethod
    def of(cls, ground_n: int, members: Iterable[int | SubsetMask]) -> "SetFamily":
        raw = set()
        for m in members:
            if isinstance(m, SubsetMask):
                m = m.bits
            raw.add(int(m))
        return cls(ground_n, tuple(sorted(raw)))

    @classmethod
    def from_element_lists(cls, ground_n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls.of(ground_n, (mask_of(s) for s in sets))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask: object) -> bool:
        if isinstance(mask, SubsetMask):
            mask = mask.bits
        return mask in self._member_set

    @property
    def _member_set(self) -> frozenset[int]:
        # frozen dataclass: cache lazily through object.__setattr__
        try:
            return self.__dict__["_ms"]
        except KeyError:
            ms = frozenset(self.members)
            object.__setattr__(self, "_ms", ms)
            return ms

    def masks(self) -> list[SubsetMask]:
        return [SubsetMask(m, self.ground_n) for m in self.members]

    def with_member(self, mask: int) -> "SetFamily":
        return SetFamily.of(self.ground_n, self.members + (mask,))

    def without_member(self, mask: int) -> "SetFamily":
        return SetFamily(self.ground_n, tuple(m for m in self.members if m != mask))

    def union(self, other: "SetFamily") -> "SetFamily":
        if other.ground_n != self.ground_n:
            raise InvalidArgument("families over different ground sets")
        return SetFamily.of(self.ground_n, self.members + other.members)

    def permuted(self, perm: Sequence[int]) -> "SetFamily":
        """Relabel elements: 0-based element ``i`` goes to ``perm[i]``."""
        out = []
        for m in self.members:
            img = 0
            for i in range(self.ground_n):
                if m >> i & 1:
                    img |= 1 << perm[i]
            out.append(img)
        return SetFamily.of(self.ground_n, out)

    def element_lists(self) -> list[tuple[int, ...]]:
        return [elements_of(m) for m in self.members]


@dataclass(frozen=True)
class GroundPartition:
    ground_n: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        _check_ground(self.ground_n)
        seen = 0
        for b in self.blocks:
            if b == 0:
                raise InvalidArgument("partition blocks must be nonempty")
            if b & seen:
                raise InvalidArgument("partition blocks overlap")
            seen |= b
        if seen != (1 << self.ground_n) - 1:
            raise InvalidArgument("partition blocks do not cover the ground set")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b.bit_count() for b in self.blocks)

    def is_balanced(self) -> bool:
        sizes = self.sizes
        return max(sizes) - min(sizes) <= 1

    def block_lists(self) -> list[tuple[int, ...]]:
        return [elements_of(b) for b in self.blocks]


def balanced_partition(n: int, k: int) -> GroundPartition:
    """Split ``[n]`` into ``k`` consecutive runs, the larger runs first."""
    if not (1 <= k <= n <= MAX_GROUND):
        raise InvalidArgument(f"need 1 <= k <= n <= {MAX_GROUND}, got n={n}, k={k}")
    q, r = divmod(n, k)
    blocks = []
    start = 0
    for i in range(k):
        size = q + 1 if i < r else q
        blocks.append(((1 << size) - 1) << start)
        start += size
    return GroundPartition(n, tuple(blocks))


def canonical_generator(p: GroundPartition) -> SetFamily:
    members = []
    for block in p.blocks:
        members.extend(submasks(block))
        members.pop()
    # blocks are disjoint, so nonempty submasks never collide
    members.sort()
    return SetFamily(p.ground_n, tuple(members))


def canonical_size(n: int, k: int) -> int:
    if not (1 <= k <= n):
        raise InvalidArgument(f"need 1 <= k <= n, got n={n}, k={k}")
    q, r = divmod(n, k)
    return (k + r) * 2**q - k


def counting_lower_bound(n: int, k: int) -> int:
    """Smallest m with sum_{i<=k} C(m, i) >= 2**n."""
    if not (1 <= k <= n <= MAX_GROUND):
        raise InvalidArgument(f"need 1 <= k <= n <= {MAX_GROUND}, got n={n}, k={k}")
    target = 1 << n
    m = 0
    while sum(math.comb(m, i) for i in range(k + 1)) < target:
        m += 1
    return m


def crude_upper_bound(n: int, k: int) -> float:
    if not (1 <= k <= n):
        raise InvalidArgument(f"need 1 <= k <= n, got n={n}, k={k}")
    return C0 * k * 2.0 ** (n / k)


def section(f: SetFamily, i: int, which: str) -> SetFamily:
    """Lower (members avoiding ``i``) or upper (members containing ``i``, minus ``i``) section."""
    if not (1 <= i <= f.ground_n):
        raise InvalidArgument(f"element {i} outside [1, {f.ground_n}]")
    bit = 1 << (i - 1)
    if which == "lower":
        return SetFamily(f.ground_n, tuple(m for m in f.members if not m & bit))
    if which == "upper":
        return SetFamily.of(f.ground_n, (m & ~bit for m in f.members if m & bit))
    raise InvalidArgument(f"which must be 'lower' or 'upper', got {which!r}")


# -- coverage tables ---------------------------------------------------------


@lru_cache(maxsize=None)
def _bit_planes(n: int) -> tuple[int, ...]:
    """``planes[b]`` has bit ``y`` set iff subset ``y`` of ``[n]`` contains element ``b+1``."""
    size = 1 << n
    full = (1 << size) - 1
    planes = []
    for b in range(n):
        if b >= 3:
            half = 1 << (b - 3)
            pattern = b"\x00" * half + b"\xff" * half
            plane = int.from_bytes(pattern * (size // (8 * 2 * half)), "little")
        else:
            byte = (0xAA, 0xCC, 0xF0)[b]
            plane = int.from_bytes(bytes([byte]) * max(1, size // 8), "little") & full
        planes.append(plane)
    return tuple(planes)


def _disjoint_positions(s: int, n: int) -> int:
    """Table with bit ``y`` set iff ``y & s == 0``."""
    planes = _bit_planes(n)
    hit = 0
    b = 0
    while s:
        if s & 1:
            hit |= planes[b]
        s >>= 1
        b += 1
    return hit ^ ((1 << (1 << n)) - 1)


def _project_out(table: int, s: int, n: int) -> int:
    """Move every position ``y`` to ``y & ~s`` (OR-ing collisions)."""
    planes = _bit_planes(n)
    b = 0
    while s:
        if s & 1:
            hi = table & planes[b]
            table = (table & ~planes[b]) | (hi >> (1 << b))
        s >>= 1
        b += 1
    return table


def extend_levels(levels: list[int], s: int, n: int, disjoint: bool = True) -> list[int]:
    """Add member ``s`` to cumulative level tables.

    ``levels[j]`` has bit ``x`` set iff ``x`` is a union of at most ``j`` members
    (pairwise disjoint when ``disjoint``).  Returns a new list.
    """
    free = _disjoint_positions(s, n)
    out = list(levels)
    for j in range(len(levels) - 1, 0, -1):
        prev = levels[j - 1]
        if not disjoint:
            prev = _project_out(prev, s, n)
        out[j] = levels[j] | ((prev & free) << s)
    return out


def coverage_levels(members: Iterable[int], n: int, k: int, disjoint: bool = True) -> list[int]:
    levels = [1] * (k + 1)
    for s in members:
        levels = extend_levels(levels, s, n, disjoint)
    return levels


@dataclass(frozen=True)
class CoverageMap:
    """Bit ``x`` of ``covered`` is set iff subset ``x`` is generated."""

    ground_n: int
    covered: int

    def __contains__(self, x: int) -> bool:
        return bool(self.covered >> x & 1)

    @property
    def count(self) -> int:
        return self.covered.bit_count()

    @property
    def complete(self) -> bool:
        return self.covered == (1 << (1 << self.ground_n)) - 1

    def uncovered(self) -> Iterator[int]:
        missing = ~self.covered & ((1 << (1 << self.ground_n)) - 1)
        while missing:
            low = missing & -missing
            yield low.bit_length() - 1
            missing ^= low

    def first_uncovered(self) -> int | None:
        return next(self.uncovered(), None)


def _coverage(f: SetFamily, k: int, disjoint: bool) -> CoverageMap:
    if k < 1:
        raise InvalidArgument(f"k must be positive, got {k}")
    _check_ground(f.ground_n, MAX_COVERAGE_GROUND)
    levels = coverage_levels(f.members, f.ground_n, k, disjoint)
    return CoverageMap(f.ground_n, levels[k])


def enumerate_k_unions(f: SetFamily, k: int) -> CoverageMap:
    """Subsets expressible as a disjoint union of at most ``k`` members (``∅`` included)."""
    return _coverage(f, k, disjoint=True)


def enumerate_k_base_unions(f: SetFamily, k: int) -> CoverageMap:
    return _coverage(f, k, disjoint=False)


def is_k_generator(f: SetFamily, k: int) -> bool:
    return enumerate_k_unions(f, k).complete


def is_k_base(f: SetFamily, k: int) -> bool:
    return enumerate_k_base_unions(f, k).complete


# -- text format ---------------------------------------------------------------


def format_mask(mask: int) -> str:
    return ",".join(map(str, elements_of(mask))) if mask else "-"


def format_family(f: SetFamily) -> str:
    lines = [f"n={f.ground_n}"]
    lines.extend(format_mask(m) for m in f.members)
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> SetFamily:
    n = None
    members = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise FamilyParseError("expected header 'n=<int>'", lineno)
            try:
                n = int(line[2:])
            except ValueError:
                raise FamilyParseError(f"bad ground size {line[2:]!r}", lineno) from None
            if not (0 <= n <= MAX_GROUND):
                raise FamilyParseError(f"ground size must lie in [0, {MAX_GROUND}]", lineno)
            continue
        if line == "-":
            members.append(0)
            continue
        try:
            elems = [int(tok) for tok in line.split(",")]
        except ValueError:
            raise FamilyParseError(f"bad member {line!r}", lineno) from None
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise FamilyParseError("elements must be strictly increasing", lineno)
        if elems[0] < 1 or elems[-1] > n:
            raise FamilyParseError(f"element outside [1, {n}]", lineno)
        members.append(mask_of(elems))
    if n is None:
        raise FamilyParseError("missing header 'n=<int>'", 1)
    return SetFamily.of(n, members)


def read_family(path: str | Path) -> SetFamily:
    return parse_family(Path(path).read_text(encoding="utf-8"))


def write_family(f: SetFamily, path: str | Path) -> None:
    Path(path).write_text(format_family(f), encoding="utf-8")
