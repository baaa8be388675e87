"""Pure-Python implementations of the hot graph kernels.

Graphs are passed as a sequence of neighbour bitsets (``adj[v]`` has bit ``u``
set iff ``uv`` is an edge).  The compiled module ``_ckernels`` exposes the same
functions with the same signatures; ``genset.kernels`` picks one at import.
"""

from math import comb

NAME = "python"


def clique_counts(adj, n):
    """Number of cliques of every size 0..n, by pivoting (SCT) recursion.

    Each leaf of the recursion holds a set of ``held`` vertices and ``piv``
    pivot vertices and stands for the cliques ``held ∪ Q`` with ``Q`` any
    subset of the pivots, so each clique is counted exactly once.
    """
    counts = [0] * (n + 1)

    def rec(cand, held, piv):
        if not cand:
            for j in range(piv + 1):
                counts[held + j] += comb(piv, j)
            return
        best = -1
        p = -1
        c = cand
        while c:
            low = c & -c
            v = low.bit_length() - 1
            d = (adj[v] & cand).bit_count()
            if d > best:
                best, p = d, v
            c ^= low
        rec(cand & adj[p], held, piv + 1)
        rest = cand & ~adj[p] & ~(1 << p)
        remaining = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rec(remaining & adj[v], held + 1, piv)
            remaining &= ~low
            rest ^= low

    rec((1 << n) - 1, 0, 0)
    return counts


def hom_count(prev_masks, free_masks, gadj, n):
    """Homomorphism count from a pattern into a graph.

    The pattern is given as an elimination plan: vertex ``i`` of the
    backtracked prefix must map into the common neighbourhood of the images of
    the prefix positions in ``prev_masks[i]``; each free vertex is independent
    of the others and its image ranges over the common neighbourhood of the
    prefix positions in its mask, so free vertices contribute a product of
    popcounts at every leaf.
    """
    c = len(prev_masks)
    full = (1 << n) - 1
    img = [0] * c

    def common(mask):
        cand = full
        while mask:
            low = mask & -mask
            cand &= gadj[img[low.bit_length() - 1]]
            mask ^= low
        return cand

    def rec(i):
        if i == c:
            prod = 1
            for fm in free_masks:
                prod *= common(fm).bit_count()
                if not prod:
                    break
            return prod
        cand = common(prev_masks[i])
        if i == c - 1 and not free_masks:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            img[i] = low.bit_length() - 1
            total += rec(i + 1)
            cand ^= low
        return total

    return rec(0)


def injective_hom_count(prev_masks, gadj, n):
    c = len(prev_masks)
    if c == 0:
        return 1
    full = (1 << n) - 1
    img = [0] * c

    def rec(i, used):
        cand = full & ~used
        mask = prev_masks[i]
        while mask:
            low = mask & -mask
            cand &= gadj[img[low.bit_length() - 1]]
            mask ^= low
        if i == c - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            img[i] = low.bit_length() - 1
            total += rec(i + 1, used | low)
            cand ^= low
        return total

    return rec(0, 0)


def max_cut(adj, n):
    """Maximum cut by Gray-code enumeration of the 2**(n-1) bipartitions."""
    if n <= 1:
        return 0
    deg = [a.bit_count() for a in adj]
    side = 0
    cut = 0
    best = 0
    for i in range(1, 1 << (n - 1)):
        v = (i & -i).bit_length() - 1
        bit = 1 << v
        if side & bit:
            same = (adj[v] & side).bit_count()
        else:
            same = (adj[v] & ~side).bit_count()
        cut += 2 * same - deg[v]
        side ^= bit
        if cut > best:
            best = cut
    return best


def min_kpartition_defect(adj, n, k, upper):
    """Fewest edges inside classes over all partitions into at most ``k`` classes.

    Branch and bound over vertices in index order; a vertex may open only the
    next unused class.  ``upper`` is a known achievable value (or larger).
    """
    if n == 0:
        return 0
    best = [upper]
    classes = [0] * k

    def rec(v, used, cost):
        if cost >= best[0]:
            return
        if v == n:
            best[0] = cost
            return
        lim = used + 1 if used < k else k
        for c in range(lim):
            add = (adj[v] & classes[c]).bit_count()
            classes[c] |= 1 << v
            rec(v + 1, used + 1 if c == used else used, cost + add)
            classes[c] &= ~(1 << v)

    rec(0, 0, 0)
    return best[0]
