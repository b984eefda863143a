# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tree kernels; see ``_tree_py`` for the reference semantics.

Each candidate feature keeps its rows as contiguous ``Entry`` records sorted by
that feature, so split scans and partitions walk memory sequentially.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef enum:
    VARIANCE = 0
    NEWTON = 1

cdef double MIN_REL_IMPROVEMENT = 1e-12


cdef struct Entry:
    double x
    double a
    double b
    Py_ssize_t row


cdef struct Params:
    int criterion
    int max_depth
    Py_ssize_t min_samples_split
    Py_ssize_t min_samples_leaf
    double min_child_weight
    double reg_lambda
    double gamma


cdef class _Builder:
    cdef Entry* entries      # k blocks of m entries
    cdef Entry* buf
    cdef unsigned char* mark
    cdef Py_ssize_t k, m
    cdef const Py_ssize_t[::1] features
    cdef Py_ssize_t[::1] feat
    cdef double[::1] thr
    cdef Py_ssize_t[::1] left
    cdef Py_ssize_t[::1] right
    cdef double[::1] value
    cdef Py_ssize_t n_nodes
    cdef Params p

    def __cinit__(self):
        self.entries = NULL
        self.buf = NULL
        self.mark = NULL

    def __dealloc__(self):
        free(self.entries)
        free(self.buf)
        free(self.mark)

    cdef double leaf_value(self, double A, double B) noexcept nogil:
        cdef double denom
        if self.p.criterion == VARIANCE:
            return A / B
        denom = B + self.p.reg_lambda
        if denom > 0:
            return -A / denom
        return 0.0

    cdef Py_ssize_t build(self, Py_ssize_t start, Py_ssize_t end, int depth) noexcept nogil:
        cdef Py_ssize_t node = self.n_nodes
        cdef Py_ssize_t n = end - start
        cdef Py_ssize_t m = self.m
        cdef Py_ssize_t i, j, n_left, pos_l, pos_r, best_j = -1
        cdef double A = 0.0, B = 0.0, Af, Bf, aL, bL, aR, bR, score, parent
        cdef double best_score = -INFINITY, best_thr = 0.0, t, x0, x1
        cdef double lam = self.p.reg_lambda
        cdef Params p = self.p
        cdef Entry* seg

        self.n_nodes += 1
        self.feat[node] = -1
        self.thr[node] = 0.0
        self.left[node] = -1
        self.right[node] = -1
        seg = self.entries
        for i in range(start, end):
            A += seg[i].a
            B += seg[i].b
        self.value[node] = self.leaf_value(A, B)
        if depth >= p.max_depth or n < p.min_samples_split or n < 2:
            return node

        for j in range(self.k):
            seg = self.entries + j * m
            Af = 0.0
            Bf = 0.0
            for i in range(start, end):
                Af += seg[i].a
                Bf += seg[i].b
            if p.criterion == VARIANCE:
                parent = Af * Af / Bf
            else:
                parent = Af * Af / (Bf + lam)
            aL = 0.0
            bL = 0.0
            for i in range(start, end - 1):
                aL += seg[i].a
                bL += seg[i].b
                x0 = seg[i].x
                x1 = seg[i + 1].x
                if not x0 < x1:
                    continue
                aR = Af - aL
                bR = Bf - bL
                if p.criterion == VARIANCE:
                    if i - start + 1 < p.min_samples_leaf or end - i - 1 < p.min_samples_leaf:
                        continue
                    if not (bL > 0 and bR > 0):
                        continue
                    score = aL * aL / bL + aR * aR / bR - parent
                else:
                    if not (bL >= p.min_child_weight and bR >= p.min_child_weight):
                        continue
                    if not (bL + lam > 0 and bR + lam > 0):
                        continue
                    score = 0.5 * (aL * aL / (bL + lam) + aR * aR / (bR + lam) - parent) - p.gamma
                if score > best_score:
                    best_score = score
                    best_j = j
                    t = (x0 + x1) / 2.0
                    if t >= x1:
                        t = x0
                    best_thr = t

        if best_j < 0:
            return node
        if p.criterion == VARIANCE:
            if not best_score > MIN_REL_IMPROVEMENT * fabs(A * A / B):
                return node
        elif not best_score > 0:
            return node

        seg = self.entries + best_j * m
        n_left = 0
        for i in range(start, end):
            if seg[i].x <= best_thr:
                self.mark[seg[i].row] = 1
                n_left += 1
            else:
                self.mark[seg[i].row] = 0
        for j in range(self.k):
            seg = self.entries + j * m
            pos_l = start
            pos_r = 0
            for i in range(start, end):
                if self.mark[seg[i].row]:
                    seg[pos_l] = seg[i]
                    pos_l += 1
                else:
                    self.buf[pos_r] = seg[i]
                    pos_r += 1
            for i in range(pos_r):
                seg[pos_l + i] = self.buf[i]

        self.feat[node] = self.features[best_j]
        self.thr[node] = best_thr
        self.left[node] = self.build(start, start + n_left, depth + 1)
        self.right[node] = self.build(start + n_left, end, depth + 1)
        return node


def grow_tree(X, sorted_rows, features, row_mask, a, b, int criterion, int max_depth,
              Py_ssize_t min_samples_split, Py_ssize_t min_samples_leaf,
              double min_child_weight, double reg_lambda, double gamma):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const Py_ssize_t[:, ::1] sv = np.ascontiguousarray(sorted_rows, dtype=np.intp)
    cdef const Py_ssize_t[::1] fv = np.ascontiguousarray(features, dtype=np.intp)
    cdef const unsigned char[::1] inc = np.ascontiguousarray(row_mask, dtype=np.uint8)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef _Builder bld = _Builder()
    cdef Py_ssize_t n = Xv.shape[0], k = fv.shape[0], m = 0, cap, i, j, pos, r, f
    cdef Entry* e

    for i in range(n):
        if inc[i]:
            m += 1
    if m == 0:
        raise ValueError("cannot grow a tree on zero rows")
    bld.k = k
    bld.m = m
    bld.entries = <Entry*> malloc(k * m * sizeof(Entry))
    bld.buf = <Entry*> malloc(m * sizeof(Entry))
    bld.mark = <unsigned char*> malloc(n * sizeof(unsigned char))
    if bld.entries == NULL or bld.buf == NULL or bld.mark == NULL:
        raise MemoryError()
    with nogil:
        for j in range(k):
            f = fv[j]
            e = bld.entries + j * m
            pos = 0
            for i in range(n):
                r = sv[f, i]
                if inc[r]:
                    e[pos].x = Xv[r, f]
                    e[pos].a = av[r]
                    e[pos].b = bv[r]
                    e[pos].row = r
                    pos += 1

    cap = 2 * m - 1
    if max_depth < 30 and (1 << (max_depth + 1)) - 1 < cap:
        cap = (1 << (max_depth + 1)) - 1
    feat = np.empty(cap, dtype=np.intp)
    thr = np.empty(cap, dtype=np.float64)
    left = np.empty(cap, dtype=np.intp)
    right = np.empty(cap, dtype=np.intp)
    value = np.empty(cap, dtype=np.float64)
    bld.features = fv
    bld.feat = feat
    bld.thr = thr
    bld.left = left
    bld.right = right
    bld.value = value
    bld.n_nodes = 0
    bld.p.criterion = criterion
    bld.p.max_depth = max_depth
    bld.p.min_samples_split = min_samples_split
    bld.p.min_samples_leaf = min_samples_leaf
    bld.p.min_child_weight = min_child_weight
    bld.p.reg_lambda = reg_lambda
    bld.p.gamma = gamma
    with nogil:
        bld.build(0, m, 0)
    nn = bld.n_nodes
    return feat[:nn].copy(), thr[:nn].copy(), left[:nn].copy(), right[:nn].copy(), value[:nn].copy()


def apply_tree(X, feature, threshold, left, right):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const Py_ssize_t[::1] fv = np.ascontiguousarray(feature, dtype=np.intp)
    cdef const double[::1] tv = np.ascontiguousarray(threshold, dtype=np.float64)
    cdef const Py_ssize_t[::1] lv = np.ascontiguousarray(left, dtype=np.intp)
    cdef const Py_ssize_t[::1] rv = np.ascontiguousarray(right, dtype=np.intp)
    out = np.empty(Xv.shape[0], dtype=np.intp)
    cdef Py_ssize_t[::1] ov = out
    cdef Py_ssize_t i, node
    with nogil:
        for i in range(Xv.shape[0]):
            node = 0
            while fv[node] >= 0:
                if Xv[i, fv[node]] <= tv[node]:
                    node = lv[node]
                else:
                    node = rv[node]
            ov[i] = node
    return out
