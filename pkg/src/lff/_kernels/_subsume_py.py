"""Pure-Python θ-subsumption matcher over flat integer clause encodings.

An encoded clause is a tuple ``(n_lits, n_vars, p0, k0, a.., p1, k1, a.., ...)``:
literal 0 is the head, ``p`` is an interned predicate id, ``k`` its arity and
``a..`` the variable numbers (dense, ``0 <= a < n_vars``).
"""

MAX_VARS = 64
MAX_LITS = 64


def _split(enc):
    n = enc[0]
    lits = []
    i = 2
    for _ in range(n):
        p, k = enc[i], enc[i + 1]
        lits.append((p, enc[i + 2 : i + 2 + k]))
        i += 2 + k
    return lits


def subsumes(c1, c2):
    """True iff some substitution maps ``c1`` into ``c2`` (head onto head, body into body)."""
    l1 = _split(c1)
    l2 = _split(c2)
    (hp1, ha1), (hp2, ha2) = l1[0], l2[0]
    if hp1 != hp2 or len(ha1) != len(ha2):
        return False
    theta = [-1] * c1[1]
    for v, t in zip(ha1, ha2):
        if theta[v] == -1:
            theta[v] = t
        elif theta[v] != t:
            return False

    by_pred = {}
    for p, args in l2[1:]:
        by_pred.setdefault(p, []).append(args)
    goals = []
    for p, args in l1[1:]:
        cands = by_pred.get(p)
        if not cands:
            return False
        goals.append((args, cands))
    goals.sort(key=lambda g: len(g[1]))

    n = len(goals)
    choice = [0] * (n + 1)
    trail = [[] for _ in range(n + 1)]
    depth = 0
    while True:
        if depth == n:
            return True
        args, cands = goals[depth]
        placed = False
        while choice[depth] < len(cands):
            target = cands[choice[depth]]
            choice[depth] += 1
            bound = trail[depth]
            ok = True
            for v, t in zip(args, target):
                cur = theta[v]
                if cur == -1:
                    theta[v] = t
                    bound.append(v)
                elif cur != t:
                    ok = False
                    break
            if ok:
                placed = True
                break
            for v in bound:
                theta[v] = -1
            bound.clear()
        if placed:
            depth += 1
            choice[depth] = 0
            continue
        choice[depth] = 0
        depth -= 1
        if depth < 0:
            return False
        for v in trail[depth]:
            theta[v] = -1
        trail[depth].clear()


def match_against(anchor, clauses, ids, forward):
    """Ids ``i`` with ``anchor`` ⪯ ``clauses[i]`` (forward) or ``clauses[i]`` ⪯ ``anchor``."""
    if forward:
        return [i for i in ids if subsumes(anchor, clauses[i])]
    return [i for i in ids if subsumes(clauses[i], anchor)]
