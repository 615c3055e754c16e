# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pattern branch and bound; same contract as ``_pysearch.search``."""
import numpy as np

from libc.stdint cimport int64_t, uint64_t
from posix.time cimport clock_gettime, timespec, CLOCK_MONOTONIC

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil

cdef enum:
    FORM_ADDITIVE = 0
    FORM_EMPLOYEE = 1
    FORM_CONSULTANT = 2

cdef int64_t EMP_B = 10
cdef int64_t EMP_OUT = 1000000
cdef int64_t CONS_IN = 20
cdef int64_t CONS_OUT = 1000000
cdef int64_t BIG = 4611686018427387904  # 2**62
cdef int CACHE_BITS = 18


cdef inline double now() noexcept nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + ts.tv_nsec * 1e-9


cdef class _Search:
    cdef int k, n, nc, max_blocks, has_order, prune, timed_out, nb
    cdef int64_t best, lam
    cdef double deadline
    cdef int has_deadline
    cdef long long nodes, leaves, matchings

    cdef int64_t[::1] step_cons_ptr, step_cons_idx, scope_size, scope_ptr, scope_idx
    cdef int64_t[::1] bound_ptr, bound_flat, imp_inc, order, forms
    cdef uint64_t[::1] scope_mask, mask_a, mask_b
    cdef int64_t[:, ::1] addw

    cdef int64_t[::1] q, a, score, bmin
    cdef char[::1] placed
    cdef uint64_t[::1] blocks, best_blocks
    cdef int best_nb, found

    # matching workspace
    cdef int64_t[:, ::1] cost
    cdef int64_t[::1] hu, hv, minv
    cdef int64_t[::1] hmatch, way, argmins
    cdef char[::1] used

    # direct-mapped block-min cache; key 0 marks an empty slot
    cdef uint64_t[::1] ckey
    cdef int64_t[::1] cval, carg
    cdef uint64_t cmask

    def __init__(self, dict arr, int k, int n, int nc):
        self.k, self.n, self.nc = k, n, nc
        self.max_blocks = min(k, n)
        self.step_cons_ptr = arr["step_cons_ptr"]
        self.step_cons_idx = arr["step_cons_idx"]
        self.scope_size = arr["scope_size"]
        self.scope_ptr = arr["scope_ptr"]
        self.scope_idx = arr["scope_idx"]
        self.bound_ptr = arr["bound_ptr"]
        self.bound_flat = arr["bound_flat"]
        self.imp_inc = arr["imp_inc"]
        self.order = arr["order"]
        self.has_order = self.order.shape[0] > 0
        self.forms = arr["forms"]
        self.scope_mask = arr["scope_mask"]
        self.mask_a = arr["mask_a"]
        self.mask_b = arr["mask_b"]
        self.addw = arr["addw"]

        self.q = np.zeros(max(nc, 1), dtype=np.int64)
        self.a = np.zeros(max(nc, 1), dtype=np.int64)
        self.score = np.array(arr["imp_static"], dtype=np.int64)
        self.placed = np.zeros(k, dtype=np.int8)
        self.blocks = np.zeros(k + 1, dtype=np.uint64)
        self.best_blocks = np.zeros(k + 1, dtype=np.uint64)
        self.bmin = np.zeros(k + 1, dtype=np.int64)
        self.cost = np.zeros((k, n), dtype=np.int64)
        self.hu = np.zeros(k + 1, dtype=np.int64)
        self.hv = np.zeros(n + 1, dtype=np.int64)
        self.minv = np.zeros(n + 1, dtype=np.int64)
        self.hmatch = np.zeros(n + 1, dtype=np.int64)
        self.way = np.zeros(n + 1, dtype=np.int64)
        self.argmins = np.zeros(k + 1, dtype=np.int64)
        self.used = np.zeros(n + 1, dtype=np.int8)
        self.nb = 0
        self.found = 0
        self.ckey = np.zeros(1 << CACHE_BITS, dtype=np.uint64)
        self.cval = np.zeros(1 << CACHE_BITS, dtype=np.int64)
        self.carg = np.zeros(1 << CACHE_BITS, dtype=np.int64)
        self.cmask = (1 << CACHE_BITS) - 1

    cdef inline int64_t weight(self, uint64_t m, int u) noexcept nogil:
        cdef int64_t f = self.forms[u]
        cdef int64_t w
        cdef uint64_t rest
        cdef int s
        if f == FORM_EMPLOYEE:
            return (popcount64(m & self.mask_b[u]) * EMP_B
                    + popcount64(m & ~(self.mask_a[u] | self.mask_b[u])) * EMP_OUT)
        if f == FORM_CONSULTANT:
            if m == 0:
                return 0
            w = popcount64(m & ~self.mask_a[u]) * CONS_OUT
            if m & self.mask_a[u]:
                w += CONS_IN
            return w
        w = 0
        rest = m
        s = 0
        while rest:
            if rest & 1:
                w += self.addw[u, s]
            rest >>= 1
            s += 1
        return w

    cdef inline int64_t block_min(self, uint64_t m, int64_t* arg) noexcept nogil:
        cdef int64_t best = -1, w
        cdef int u
        cdef uint64_t h = (m * <uint64_t>0x9E3779B97F4A7C15) >> (64 - CACHE_BITS)
        h &= self.cmask
        if self.ckey[h] == m:
            arg[0] = self.carg[h]
            return self.cval[h]
        arg[0] = 0
        for u in range(self.n):
            w = self.weight(m, u)
            if best < 0 or w < best:
                best = w
                arg[0] = u
                if w == 0:
                    break
        self.ckey[h] = m
        self.cval[h] = best
        self.carg[h] = arg[0]
        return best

    cdef int64_t hungarian(self, int p) noexcept nogil:
        # rectangular e-maxx Hungarian over cost[0:p, 0:n]
        cdef int n = self.n
        cdef int i, j, j0, j1, i0
        cdef int64_t delta, cur, inf = BIG
        for j in range(n + 1):
            self.hv[j] = 0
            self.hmatch[j] = 0
            self.way[j] = 0
        for i in range(p + 1):
            self.hu[i] = 0
        for i in range(1, p + 1):
            self.hmatch[0] = i
            j0 = 0
            for j in range(n + 1):
                self.minv[j] = inf
                self.used[j] = 0
            while True:
                self.used[j0] = 1
                i0 = <int>self.hmatch[j0]
                delta = inf
                j1 = 0
                for j in range(1, n + 1):
                    if not self.used[j]:
                        cur = self.cost[i0 - 1, j - 1] - self.hu[i0] - self.hv[j]
                        if cur < self.minv[j]:
                            self.minv[j] = cur
                            self.way[j] = j0
                        if self.minv[j] < delta:
                            delta = self.minv[j]
                            j1 = j
                for j in range(n + 1):
                    if self.used[j]:
                        self.hu[self.hmatch[j]] += delta
                        self.hv[j] -= delta
                    else:
                        self.minv[j] -= delta
                j0 = j1
                if self.hmatch[j0] == 0:
                    break
            while j0:
                j1 = <int>self.way[j0]
                self.hmatch[j0] = self.hmatch[j1]
                j0 = j1
        cdef int64_t total = 0
        for j in range(1, n + 1):
            if self.hmatch[j]:
                total += self.cost[self.hmatch[j] - 1, j - 1]
        return total

    cdef int64_t leaf_weight(self, int64_t cons_w) noexcept nogil:
        cdef int b, c, u, p = self.nb
        cdef int64_t total = 0, arg
        cdef int distinct = 1
        self.leaves += 1
        for b in range(p):
            total += self.block_min(self.blocks[b], &arg)
            self.argmins[b] = arg
            for c in range(b):
                if self.argmins[c] == arg:
                    distinct = 0
                    break
            if not distinct:
                break
        if distinct:
            return cons_w + total
        self.matchings += 1
        for b in range(p):
            for u in range(self.n):
                self.cost[b, u] = self.weight(self.blocks[b], u)
        return cons_w + self.hungarian(p)

    cdef void explore(self, int depth, int64_t cons_lb, int64_t bmin_sum) noexcept nogil:
        cdef int t, s, i, b, nb, c, w
        cdef int64_t best_score, base, lb_c, lb, old_min, new_min, arg, wgt
        cdef uint64_t bit, old, new
        cdef int64_t c0 = 0, c1 = 0
        if depth == self.k:
            wgt = self.leaf_weight(cons_lb)
            if wgt < self.best:
                self.best = wgt
                self.found = 1
                self.best_nb = self.nb
                for b in range(self.nb):
                    self.best_blocks[b] = self.blocks[b]
            return
        self.nodes += 1
        if self.has_deadline and now() > self.deadline:
            self.timed_out = 1
            return

        if self.has_order:
            s = -1
            for t in range(self.k):
                if not self.placed[self.order[t]]:
                    s = <int>self.order[t]
                    break
        else:
            s = -1
            best_score = -1
            for t in range(self.k):
                if not self.placed[t] and self.score[t] > best_score:
                    s = t
                    best_score = self.score[t]
        bit = (<uint64_t>1) << s
        c0 = self.step_cons_ptr[s]
        c1 = self.step_cons_ptr[s + 1]
        self.placed[s] = 1
        base = cons_lb
        for i in range(c0, c1):
            c = <int>self.step_cons_idx[i]
            w = <int>self.scope_size[c] + 1
            base -= self.bound_flat[self.bound_ptr[c] + self.q[c] * w + self.a[c]]
            self.a[c] += 1
            for t in range(self.scope_ptr[c], self.scope_ptr[c + 1]):
                self.score[self.scope_idx[t]] += self.imp_inc[c]

        nb = self.nb
        for b in range(nb + 1):
            if self.timed_out or not self.best > self.lam:
                break
            if b == nb:
                if nb == self.max_blocks:
                    break
                old = 0
                old_min = 0
            else:
                old = self.blocks[b]
                old_min = self.bmin[b]
            new = old | bit
            lb_c = base
            for i in range(c0, c1):
                c = <int>self.step_cons_idx[i]
                w = <int>self.scope_size[c] + 1
                if old & self.scope_mask[c]:
                    lb_c += self.bound_flat[self.bound_ptr[c] + self.q[c] * w + self.a[c]]
                else:
                    lb_c += self.bound_flat[self.bound_ptr[c] + (self.q[c] + 1) * w + self.a[c]]
            new_min = self.block_min(new, &arg)
            lb = lb_c + bmin_sum - old_min + new_min
            if self.prune and lb >= self.best:
                continue
            for i in range(c0, c1):
                c = <int>self.step_cons_idx[i]
                if not (old & self.scope_mask[c]):
                    self.q[c] += 1
            self.blocks[b] = new
            self.bmin[b] = new_min
            if b == nb:
                self.nb = nb + 1
            self.explore(depth + 1, lb_c, bmin_sum - old_min + new_min)
            self.nb = nb
            self.blocks[b] = old
            self.bmin[b] = old_min
            for i in range(c0, c1):
                c = <int>self.step_cons_idx[i]
                if not (old & self.scope_mask[c]):
                    self.q[c] -= 1

        for i in range(c0, c1):
            c = <int>self.step_cons_idx[i]
            self.a[c] -= 1
            for t in range(self.scope_ptr[c], self.scope_ptr[c + 1]):
                self.score[self.scope_idx[t]] -= self.imp_inc[c]
        self.placed[s] = 0

    def run(self, upper, lam, prune, deadline):
        cdef int64_t start = 0
        cdef int c
        self.best = min(int(upper), BIG)
        self.lam = lam
        self.prune = 1 if prune else 0
        self.has_deadline = deadline is not None
        self.deadline = deadline if deadline is not None else 0.0
        self.timed_out = 0
        self.nodes = self.leaves = self.matchings = 0
        for c in range(self.nc):
            start += self.bound_flat[self.bound_ptr[c]]
        with nogil:
            self.explore(0, start, 0)
        blocks = None
        weight = int(upper)
        if self.found:
            blocks = [int(self.best_blocks[b]) for b in range(self.best_nb)]
            weight = int(self.best)
        return {
            "weight": weight,
            "blocks": blocks,
            "nodes": int(self.nodes),
            "leaves": int(self.leaves),
            "matchings": int(self.matchings),
            "timed_out": bool(self.timed_out),
        }


def search(ci, upper, lam, prune=True, deadline=None):
    """Compiled counterpart of ``_pysearch.search``."""
    s = _Search(ci.arrays(), ci.k, ci.n, ci.nc)
    return s.run(upper, lam, prune, deadline)
