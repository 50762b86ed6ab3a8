"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it imports; set ``LFF_PURE_PYTHON=1`` to
force the fallback.
"""

import os

import numpy as np

from . import _sld, _subsume_py

BACKEND = "python"
_impl = _subsume_py
sld = _sld
if not os.environ.get("LFF_PURE_PYTHON"):
    try:
        from . import _sld_c as sld  # type: ignore[no-redef]
        from . import _subsume as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extensions not built
        _impl, sld = _subsume_py, _sld


def subsumes(c1: tuple, c2: tuple) -> bool:
    return _impl.subsumes(c1, c2)


class PackedClauses:
    """An append-only store of encoded clauses addressable by integer id."""

    def __init__(self, encoded=()):
        self.tuples: list[tuple] = []
        self._flat = None
        self._offsets = None
        for enc in encoded:
            self.append(enc)

    def append(self, enc: tuple) -> int:
        self.tuples.append(enc)
        self._flat = None
        return len(self.tuples) - 1

    def __len__(self) -> int:
        return len(self.tuples)

    def _packed(self):
        if self._flat is None:
            sizes = np.fromiter((len(t) for t in self.tuples), dtype=np.int64,
                                count=len(self.tuples))
            offsets = np.zeros(len(self.tuples) + 1, dtype=np.int64)
            np.cumsum(sizes, out=offsets[1:])
            flat = np.fromiter((x for t in self.tuples for x in t), dtype=np.intc,
                               count=int(offsets[-1]))
            if flat.size == 0:
                flat = np.zeros(1, dtype=np.intc)
            self._flat, self._offsets = flat, offsets
        return self._flat, self._offsets

    def match(self, anchor: tuple, ids, forward: bool) -> list[int]:
        """Ids whose clause is subsumed by ``anchor`` (forward) or subsumes it."""
        if BACKEND == "cython":
            flat, offsets = self._packed()
            return _impl.match_against(anchor, flat, offsets, ids, forward)
        return _subsume_py.match_against(anchor, self.tuples, ids, forward)
