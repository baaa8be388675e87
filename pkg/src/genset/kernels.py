"""Backend selection for the graph kernels.

The compiled ``_ckernels`` extension is used when it is importable and the
instance fits in 64-bit words; otherwise the pure-Python twin in
``_pykernels`` runs.  Set ``GENSET_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("GENSET_PURE_PYTHON"):
        raise ImportError("pure Python forced by GENSET_PURE_PYTHON")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = _ckernels.NAME if _ckernels is not None else _pykernels.NAME

_WORD = 64


def _fast(n: int):
    return _ckernels if _ckernels is not None and n <= _WORD else _pykernels


def clique_counts(adj, n):
    return _fast(n).clique_counts(adj, n)


def hom_count(prev_masks, free_masks, gadj, n):
    p = len(prev_masks) + len(free_masks)
    # n**p bounds every partial sum in the compiled kernel
    if n ** p < 2**63:
        return _fast(n).hom_count(prev_masks, free_masks, gadj, n)
    return _pykernels.hom_count(prev_masks, free_masks, gadj, n)


def injective_hom_count(prev_masks, gadj, n):
    if n ** len(prev_masks) < 2**63:
        return _fast(n).injective_hom_count(prev_masks, gadj, n)
    return _pykernels.injective_hom_count(prev_masks, gadj, n)


def max_cut(adj, n):
    return _fast(n).max_cut(adj, n)


def min_kpartition_defect(adj, n, k, upper):
    return _fast(n).min_kpartition_defect(adj, n, k, upper)


def backends():
    """Available kernel modules, compiled first."""
    return [m for m in (_ckernels, _pykernels) if m is not None]
