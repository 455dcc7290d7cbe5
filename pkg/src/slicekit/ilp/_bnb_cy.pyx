# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled branch-and-bound kernel; mirrors ``_bnb_py.search`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef class _Search:
    cdef Py_ssize_t n, m_count
    cdef i64[::1] demand, resid, order, assign, best, min_allowed
    cdef i64[::1] nbr_ptr, nbr_idx
    cdef unsigned char[:, ::1] allowed
    cdef i64[:, ::1] cnt
    cdef i64 cur, best_obj, nodes, node_limit
    cdef bint hit, have_best

    def __init__(self, demand, capacity, allowed, nbr_ptr, nbr_idx, order, long long node_limit):
        self.demand = demand
        self.resid = capacity.copy()
        self.allowed = allowed
        self.nbr_ptr = nbr_ptr
        self.nbr_idx = nbr_idx
        self.order = order
        self.n = demand.shape[0]
        self.m_count = capacity.shape[0]
        self.assign = np.full(self.n, -1, dtype=np.int64)
        self.best = np.full(self.n, -1, dtype=np.int64)
        self.cnt = np.zeros((self.n, self.m_count), dtype=np.int64)
        self.min_allowed = np.full(self.n, self.m_count, dtype=np.int64)
        cdef Py_ssize_t i, m
        for i in range(self.n):
            for m in range(self.m_count - 1, -1, -1):
                if self.allowed[i, m]:
                    self.min_allowed[i] = m
        self.cur = 0
        self.best_obj = -1
        self.nodes = 0
        self.node_limit = node_limit
        self.hit = False
        self.have_best = False

    cdef bint _lex_less_than_best(self):
        cdef Py_ssize_t i
        for i in range(self.n):
            if self.assign[i] != self.best[i]:
                return self.assign[i] < self.best[i]
        return False

    cdef bint _may_beat_incumbent(self):
        cdef Py_ssize_t i
        cdef i64 a
        for i in range(self.n):
            a = self.assign[i]
            if a >= 0:
                if a != self.best[i]:
                    return a < self.best[i]
            elif self.min_allowed[i] < self.best[i]:
                return True
        return False

    cdef i64 _bound(self, Py_ssize_t depth):
        cdef Py_ssize_t k, m, p, u, v
        cdef i64 du, dv, room, q, val, best_u, total2 = 0, unplaced = 0, free = 0
        for k in range(depth, self.n):
            u = self.order[k]
            du = self.demand[u]
            unplaced += du
            best_u = -1
            for m in range(self.m_count):
                if not self.allowed[u, m]:
                    continue
                room = self.resid[m] - du
                if room < 0:
                    continue
                q = 0
                for p in range(self.nbr_ptr[u], self.nbr_ptr[u + 1]):
                    v = self.nbr_idx[p]
                    if self.assign[v] >= 0 or not self.allowed[v, m]:
                        continue
                    dv = self.demand[v]
                    if dv > room:
                        break
                    room -= dv
                    q += 1
                val = 2 * self.cnt[u, m] + q
                if val > best_u:
                    best_u = val
            if best_u < 0:
                return -1
            total2 += best_u
        for m in range(self.m_count):
            free += self.resid[m]
        if unplaced > free:
            return -1
        return self.cur + total2 // 2

    cdef void _dfs(self, Py_ssize_t depth):
        cdef Py_ssize_t i, m, p, v
        cdef i64 di, gain, ub
        self.nodes += 1
        if self.node_limit > 0 and self.nodes > self.node_limit:
            self.hit = True
            return
        if depth == self.n:
            if self.cur > self.best_obj or (self.cur == self.best_obj and self._lex_less_than_best()):
                self.best_obj = self.cur
                self.best[:] = self.assign
                self.have_best = True
            return
        ub = self._bound(depth)
        if ub < 0 or ub < self.best_obj:
            return
        if ub == self.best_obj and not self._may_beat_incumbent():
            return
        i = self.order[depth]
        di = self.demand[i]
        for m in range(self.m_count):
            if not self.allowed[i, m] or self.resid[m] < di:
                continue
            self.assign[i] = m
            self.resid[m] -= di
            gain = self.cnt[i, m]
            self.cur += gain
            for p in range(self.nbr_ptr[i], self.nbr_ptr[i + 1]):
                v = self.nbr_idx[p]
                self.cnt[v, m] += 1
            self._dfs(depth + 1)
            for p in range(self.nbr_ptr[i], self.nbr_ptr[i + 1]):
                v = self.nbr_idx[p]
                self.cnt[v, m] -= 1
            self.cur -= gain
            self.resid[m] += di
            self.assign[i] = -1
            if self.hit:
                return

    def run(self):
        self._dfs(0)
        if not self.have_best:
            return 0, None, self.nodes, bool(self.hit)
        return int(self.best_obj), [int(x) for x in self.best], int(self.nodes), bool(self.hit)


def search(demand, capacity, allowed, nbrs, order, node_limit):
    """Same contract as ``slicekit.ilp._bnb_py.search``."""
    n = len(demand)
    ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        ptr[i + 1] = ptr[i] + len(nbrs[i])
    flat = np.fromiter((v for row in nbrs for v in row), dtype=np.int64, count=int(ptr[n]))
    s = _Search(
        np.ascontiguousarray(demand, dtype=np.int64),
        np.ascontiguousarray(capacity, dtype=np.int64),
        np.ascontiguousarray(allowed, dtype=np.uint8).reshape(n, len(capacity)),
        ptr,
        flat,
        np.ascontiguousarray(order, dtype=np.int64),
        int(node_limit or 0),
    )
    return s.run()
