"""numba-compiled kernels; same signatures and results as ``_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True)
def all_over_axis(bits, stride, size):
    n = bits.shape[0]
    out = np.empty(n, dtype=np.bool_)
    block = stride * size
    for base in range(0, n, block):
        for off in range(stride):
            p = base + off
            ok = True
            for v in range(size):
                if not bits[p + v * stride]:
                    ok = False
                    break
            for v in range(size):
                out[p + v * stride] = ok
    return out


@njit(cache=True)
def cylinder_table(bits, sizes):
    d = sizes.shape[0]
    n = bits.shape[0]
    strides = np.ones(d, dtype=np.int64)
    for i in range(1, d):
        strides[i] = strides[i - 1] * sizes[i - 1]
    full = (1 << d) - 1
    table = np.empty((full + 1, n), dtype=np.bool_)
    table[full, :] = bits
    for k in range(full - 1, -1, -1):
        j = 0
        while (k >> j) & 1:
            j += 1
        src = table[k | (1 << j)]
        stride = strides[j]
        size = sizes[j]
        block = stride * size
        for base in range(0, n, block):
            for off in range(stride):
                p = base + off
                ok = True
                for v in range(size):
                    if not src[p + v * stride]:
                        ok = False
                        break
                for v in range(size):
                    table[k, p + v * stride] = ok
    return table


@njit(cache=True)
def bkr2_tables(ta, tb):
    rows, n = ta.shape
    full = rows - 1
    out = np.zeros(n, dtype=np.bool_)
    for k in range(rows):
        a = ta[k]
        b = tb[full ^ k]
        for p in range(n):
            if a[p] and b[p]:
                out[p] = True
    return out


@njit(cache=True)
def bkr_r_tables(tables):
    r, rows, n = tables.shape
    full = rows - 1
    if r == 1:
        return tables[0, full].copy()
    prev = tables[0].copy()
    cur = np.zeros((rows, n), dtype=np.bool_)
    for k in range(1, r):
        tk = tables[k]
        lo = 0 if k < r - 1 else full
        for m in range(rows):
            for p in range(n):
                cur[m, p] = False
        for m in range(lo, rows):
            j = m
            while True:
                h = prev[m ^ j]
                t = tk[j]
                for p in range(n):
                    if h[p] and t[p]:
                        cur[m, p] = True
                if j == 0:
                    break
                j = (j - 1) & m
        prev, cur = cur, prev
    return prev[full].copy()
