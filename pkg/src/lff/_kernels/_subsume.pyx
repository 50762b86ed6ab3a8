# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled θ-subsumption matcher; mirrors ``_subsume_py`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF MAXL = 64
DEF MAXV = 64
DEF MAXC = 4096

MAX_VARS = MAXV
MAX_LITS = MAXL


cdef bint _subsumes(const int* c1, const int* c2) noexcept nogil:
    cdef int n1 = c1[0]
    cdef int nv1 = c1[1]
    cdef int n2 = c2[0]
    cdef int off1[MAXL]
    cdef int off2[MAXL]
    cdef int theta[MAXV]
    cdef int order[MAXL]
    cdef int cstart[MAXL]
    cdef int ccount[MAXL]
    cdef int cands[MAXC]
    cdef int choice[MAXL]
    cdef int mark[MAXL + 1]
    cdef int trail[MAXV]
    cdef int i, j, k, p, a, v, t, pos, depth, ntrail, g, lo, hi, tmp, arity, ncand
    cdef bint ok, placed

    if n1 > MAXL or n2 > MAXL or nv1 > MAXV:
        return False
    pos = 2
    for i in range(n1):
        off1[i] = pos
        pos += 2 + c1[pos + 1]
    pos = 2
    for i in range(n2):
        off2[i] = pos
        pos += 2 + c2[pos + 1]

    # head onto head
    if c1[off1[0]] != c2[off2[0]] or c1[off1[0] + 1] != c2[off2[0] + 1]:
        return False
    for v in range(nv1):
        theta[v] = -1
    arity = c1[off1[0] + 1]
    for k in range(arity):
        v = c1[off1[0] + 2 + k]
        t = c2[off2[0] + 2 + k]
        if theta[v] == -1:
            theta[v] = t
        elif theta[v] != t:
            return False

    # candidate lists per body literal of c1
    ncand = 0
    for i in range(1, n1):
        p = c1[off1[i]]
        a = c1[off1[i] + 1]
        cstart[i - 1] = ncand
        ccount[i - 1] = 0
        for j in range(1, n2):
            if c2[off2[j]] == p and c2[off2[j] + 1] == a:
                if ncand >= MAXC:
                    return False
                cands[ncand] = off2[j]
                ncand += 1
                ccount[i - 1] += 1
        if ccount[i - 1] == 0:
            return False
        order[i - 1] = i - 1

    g = n1 - 1
    # stable insertion sort by candidate count, same as Python's sort
    for i in range(1, g):
        tmp = order[i]
        j = i - 1
        while j >= 0 and ccount[order[j]] > ccount[tmp]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = tmp

    depth = 0
    ntrail = 0
    choice[0] = 0
    mark[0] = 0
    while True:
        if depth == g:
            return True
        i = order[depth]
        lo = cstart[i]
        hi = lo + ccount[i]
        arity = c1[off1[i + 1] + 1]
        placed = False
        while choice[depth] < ccount[i]:
            pos = cands[lo + choice[depth]]
            choice[depth] += 1
            ok = True
            for k in range(arity):
                v = c1[off1[i + 1] + 2 + k]
                t = c2[pos + 2 + k]
                if theta[v] == -1:
                    theta[v] = t
                    trail[ntrail] = v
                    ntrail += 1
                elif theta[v] != t:
                    ok = False
                    break
            if ok:
                placed = True
                break
            while ntrail > mark[depth]:
                ntrail -= 1
                theta[trail[ntrail]] = -1
        if placed:
            depth += 1
            choice[depth] = 0
            mark[depth] = ntrail
            continue
        depth -= 1
        if depth < 0:
            return False
        while ntrail > mark[depth]:
            ntrail -= 1
            theta[trail[ntrail]] = -1


def subsumes(c1, c2):
    cdef cnp.ndarray[int, ndim=1, mode="c"] a = np.ascontiguousarray(c1, dtype=np.intc)
    cdef cnp.ndarray[int, ndim=1, mode="c"] b = np.ascontiguousarray(c2, dtype=np.intc)
    return bool(_subsumes(&a[0], &b[0]))


def match_against(anchor, const int[::1] flat, const long long[::1] offsets, ids, bint forward):
    """Ids ``i`` with ``anchor`` ⪯ clause ``i`` (forward) or clause ``i`` ⪯ ``anchor``."""
    cdef cnp.ndarray[int, ndim=1, mode="c"] a = np.ascontiguousarray(anchor, dtype=np.intc)
    cdef const int* ap = &a[0]
    cdef const int* base = &flat[0]
    cdef long long cid
    out = []
    for cid in ids:
        if forward:
            if _subsumes(ap, base + offsets[cid]):
                out.append(cid)
        else:
            if _subsumes(base + offsets[cid], ap):
                out.append(cid)
    return out
