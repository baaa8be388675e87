# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot graph kernels (graphs of order <= 64).

Signatures and semantics mirror ``genset._pykernels``; adjacency is copied
into ``uint64_t`` bitsets.  Callers must keep counts below 2**64.
"""

from libc.stdint cimport uint64_t

NAME = "cython"

cdef extern from *:
    int popcount "__builtin_popcountll"(unsigned long long) nogil
    int ctz "__builtin_ctzll"(unsigned long long) nogil

cdef enum:
    MAXV = 64
    MAXP = 16


cdef inline uint64_t _full(int n) nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return ((<uint64_t>1) << n) - 1


cdef int _load(adj, int n, uint64_t* out) except -1:
    cdef int i
    if n > MAXV:
        raise ValueError("compiled kernels handle at most 64 vertices")
    for i in range(n):
        out[i] = <uint64_t>adj[i]
    return 0


# -- clique counting ------------------------------------------------------------

cdef uint64_t BINOM[MAXV + 1][MAXV + 1]


cdef void _init_binom():
    cdef int i, j
    for i in range(MAXV + 1):
        BINOM[i][0] = 1
        for j in range(1, MAXV + 1):
            BINOM[i][j] = 0 if i == 0 else BINOM[i - 1][j - 1] + BINOM[i - 1][j]


_init_binom()


cdef void _sct(const uint64_t* adj, uint64_t cand, int held, int piv, uint64_t* counts) nogil:
    cdef int j, v, p, d, best
    cdef uint64_t c, rest, remaining, low
    if cand == 0:
        for j in range(piv + 1):
            counts[held + j] += BINOM[piv][j]
        return
    best = -1
    p = -1
    c = cand
    while c:
        v = ctz(c)
        d = popcount(adj[v] & cand)
        if d > best:
            best = d
            p = v
        c &= c - 1
    _sct(adj, cand & adj[p], held, piv + 1, counts)
    rest = cand & ~adj[p] & ~((<uint64_t>1) << p)
    remaining = cand
    while rest:
        v = ctz(rest)
        low = (<uint64_t>1) << v
        _sct(adj, remaining & adj[v], held + 1, piv, counts)
        remaining &= ~low
        rest &= rest - 1


def clique_counts(adj, int n):
    cdef uint64_t a[MAXV]
    cdef uint64_t counts[MAXV + 1]
    cdef int i
    _load(adj, n, a)
    for i in range(n + 1):
        counts[i] = 0
    with nogil:
        _sct(a, _full(n), 0, 0, counts)
    return [counts[i] for i in range(n + 1)]


# -- homomorphism counting -------------------------------------------------------

cdef struct HomPlan:
    int c
    int nfree
    int prev[MAXP]
    int free[MAXP]
    int img[MAXP]
    uint64_t full
    const uint64_t* g


cdef inline uint64_t _common(HomPlan* pl, int mask) nogil:
    cdef uint64_t cand = pl.full
    while mask:
        cand &= pl.g[pl.img[ctz(mask)]]
        mask &= mask - 1
    return cand


cdef uint64_t _hom(HomPlan* pl, int i) nogil:
    cdef uint64_t cand, prod, total
    cdef int f
    if i == pl.c:
        prod = 1
        for f in range(pl.nfree):
            prod *= popcount(_common(pl, pl.free[f]))
            if prod == 0:
                break
        return prod
    cand = _common(pl, pl.prev[i])
    if i == pl.c - 1 and pl.nfree == 0:
        return popcount(cand)
    total = 0
    while cand:
        pl.img[i] = ctz(cand)
        total += _hom(pl, i + 1)
        cand &= cand - 1
    return total


def hom_count(prev_masks, free_masks, gadj, int n):
    cdef uint64_t g[MAXV]
    cdef HomPlan pl
    cdef int i
    cdef uint64_t res
    if len(prev_masks) > MAXP or len(free_masks) > MAXP:
        raise ValueError("pattern too large for the compiled kernel")
    _load(gadj, n, g)
    pl.c = len(prev_masks)
    pl.nfree = len(free_masks)
    for i in range(pl.c):
        pl.prev[i] = prev_masks[i]
    for i in range(pl.nfree):
        pl.free[i] = free_masks[i]
    pl.full = _full(n)
    pl.g = g
    if pl.c == 0:
        # every pattern vertex is free and unconstrained
        return (<object>n) ** (<object>pl.nfree)
    with nogil:
        res = _hom(&pl, 0)
    return res


cdef uint64_t _inj(HomPlan* pl, int i, uint64_t used) nogil:
    cdef uint64_t cand, total, low
    cand = _common(pl, pl.prev[i]) & ~used
    if i == pl.c - 1:
        return popcount(cand)
    total = 0
    while cand:
        pl.img[i] = ctz(cand)
        low = cand & (~cand + 1)
        total += _inj(pl, i + 1, used | low)
        cand &= cand - 1
    return total


def injective_hom_count(prev_masks, gadj, int n):
    cdef uint64_t g[MAXV]
    cdef HomPlan pl
    cdef int i
    cdef uint64_t res
    if len(prev_masks) > MAXP:
        raise ValueError("pattern too large for the compiled kernel")
    if len(prev_masks) == 0:
        return 1
    _load(gadj, n, g)
    pl.c = len(prev_masks)
    pl.nfree = 0
    for i in range(pl.c):
        pl.prev[i] = prev_masks[i]
    pl.full = _full(n)
    pl.g = g
    with nogil:
        res = _inj(&pl, 0, 0)
    return res


# -- cuts and partitions ---------------------------------------------------------

def max_cut(adj, int n):
    cdef uint64_t a[MAXV]
    cdef int deg[MAXV]
    cdef uint64_t side = 0, bit, i, top
    cdef long long cut = 0, best = 0
    cdef int v, same
    if n <= 1:
        return 0
    _load(adj, n, a)
    for v in range(n):
        deg[v] = popcount(a[v])
    top = (<uint64_t>1) << (n - 1)
    with nogil:
        i = 1
        while i < top:
            v = ctz(i)
            bit = (<uint64_t>1) << v
            if side & bit:
                same = popcount(a[v] & side)
            else:
                same = popcount(a[v] & ~side)
            cut += 2 * same - deg[v]
            side ^= bit
            if cut > best:
                best = cut
            i += 1
    return best


cdef struct PartState:
    int n
    int k
    long long best
    const uint64_t* adj
    uint64_t classes[MAXV]


cdef void _part(PartState* st, int v, int used, long long cost) nogil:
    cdef int c, lim, nused
    cdef uint64_t bit
    if cost >= st.best:
        return
    if v == st.n:
        st.best = cost
        return
    lim = used + 1 if used < st.k else st.k
    bit = (<uint64_t>1) << v
    for c in range(lim):
        nused = used + 1 if c == used else used
        st.classes[c] |= bit
        _part(st, v + 1, nused, cost + popcount(st.adj[v] & (st.classes[c] & ~bit)))
        st.classes[c] &= ~bit


def min_kpartition_defect(adj, int n, int k, long long upper):
    cdef uint64_t a[MAXV]
    cdef PartState st
    cdef int i
    if n == 0:
        return 0
    if k > MAXV:
        k = MAXV
    _load(adj, n, a)
    st.n = n
    st.k = k
    st.best = upper
    st.adj = a
    for i in range(MAXV):
        st.classes[i] = 0
    with nogil:
        _part(&st, 0, 0, 0)
    return st.best
