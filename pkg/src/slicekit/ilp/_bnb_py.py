"""Pure-Python branch-and-bound kernel.

Reference implementation of the search in ``_bnb_cy.pyx``; both must return
identical results for identical inputs.
"""

from __future__ import annotations


def search(demand, capacity, allowed, nbrs, order, node_limit):
    """Depth-first search for the lexicographically smallest optimal assignment.

    Parameters are plain sequences indexed by request (``demand``, ``allowed``,
    ``nbrs``) or slice (``capacity``). ``nbrs[i]`` lists the requests similar to
    i, sorted by ascending demand. ``order`` is the branching order. A
    ``node_limit`` of 0 means unlimited.

    Returns ``(objective, vector, nodes, hit_limit)`` where ``vector`` is the
    best slice index per request, or None when no complete assignment was found.
    """
    n = len(demand)
    m_count = len(capacity)
    allowed = [[bool(a) for a in row] for row in allowed]
    allowed_slices = [[m for m in range(m_count) if allowed[i][m]] for i in range(n)]
    min_allowed = [s[0] if s else m_count for s in allowed_slices]

    assign = [-1] * n
    resid = list(capacity)
    # placed similar neighbours of request i on slice m
    cnt = [[0] * m_count for _ in range(n)]
    state = {"cur": 0, "best_obj": -1, "best": None, "nodes": 0, "hit": False}

    def lex_less(vec, ref):
        for a, b in zip(vec, ref):
            if a != b:
                return a < b
        return False

    def may_beat_incumbent():
        # Can some completion of the partial assignment be lex-smaller than the incumbent?
        ref = state["best"]
        for i in range(n):
            a = assign[i]
            if a >= 0:
                if a != ref[i]:
                    return a < ref[i]
            elif min_allowed[i] < ref[i]:
                return True
        return False

    def bound(depth):
        # Upper bound on the objective of any completion, or -1 if none can exist.
        unplaced_demand = 0
        total2 = 0
        for k in range(depth, n):
            u = order[k]
            du = demand[u]
            unplaced_demand += du
            best_u = -1
            cu = cnt[u]
            for m in allowed_slices[u]:
                room = resid[m] - du
                if room < 0:
                    continue
                q = 0
                for v in nbrs[u]:
                    if assign[v] >= 0 or not allowed[v][m]:
                        continue
                    dv = demand[v]
                    if dv > room:
                        break
                    room -= dv
                    q += 1
                val = 2 * cu[m] + q
                if val > best_u:
                    best_u = val
            if best_u < 0:
                return -1
            total2 += best_u
        if unplaced_demand > sum(resid):
            return -1
        return state["cur"] + total2 // 2

    def dfs(depth):
        state["nodes"] += 1
        if node_limit and state["nodes"] > node_limit:
            state["hit"] = True
            return
        if depth == n:
            cur = state["cur"]
            if cur > state["best_obj"] or (cur == state["best_obj"] and lex_less(assign, state["best"])):
                state["best_obj"] = cur
                state["best"] = list(assign)
            return
        ub = bound(depth)
        if ub < 0 or ub < state["best_obj"]:
            return
        if ub == state["best_obj"] and not may_beat_incumbent():
            return
        i = order[depth]
        di = demand[i]
        for m in allowed_slices[i]:
            if resid[m] < di:
                continue
            assign[i] = m
            resid[m] -= di
            gain = cnt[i][m]
            state["cur"] += gain
            for v in nbrs[i]:
                cnt[v][m] += 1
            dfs(depth + 1)
            for v in nbrs[i]:
                cnt[v][m] -= 1
            state["cur"] -= gain
            resid[m] += di
            assign[i] = -1
            if state["hit"]:
                return

    dfs(0)
    best = state["best"]
    objective = state["best_obj"] if best is not None else 0
    return objective, best, state["nodes"], state["hit"]
