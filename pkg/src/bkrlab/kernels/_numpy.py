"""Pure-numpy kernels. Reference backend and fallback when numba is off."""

import numpy as np


def all_over_axis(bits, stride, size):
    n = bits.shape[0]
    t = bits.reshape(n // (stride * size), size, stride)
    return np.broadcast_to(t.all(axis=1, keepdims=True), t.shape).reshape(n).copy()


def cylinder_table(bits, sizes):
    d = len(sizes)
    n = bits.shape[0]
    strides = np.ones(d, dtype=np.int64)
    for i in range(1, d):
        strides[i] = strides[i - 1] * sizes[i - 1]
    full = (1 << d) - 1
    table = np.empty((full + 1, n), dtype=bool)
    table[full] = bits
    for k in range(full - 1, -1, -1):
        j = 0
        while k >> j & 1:
            j += 1
        table[k] = all_over_axis(table[k | (1 << j)], strides[j], sizes[j])
    return table


def bkr2_tables(ta, tb):
    # row full^K of tb is row K read backwards
    return np.any(ta & tb[::-1], axis=0)


def _submasks(m):
    out = []
    j = m
    while True:
        out.append(j)
        if j == 0:
            break
        j = (j - 1) & m
    return np.array(out, dtype=np.int64)


def bkr_r_tables(tables):
    r, rows, n = tables.shape
    full = rows - 1
    if r == 1:
        return tables[0, full].copy()
    subs = [_submasks(m) for m in range(rows)]
    prev = tables[0].copy()
    for k in range(1, r):
        tk = tables[k]
        targets = range(rows) if k < r - 1 else (full,)
        cur = np.zeros((rows, n), dtype=bool)
        for m in targets:
            js = subs[m]
            cur[m] = np.any(prev[m ^ js] & tk[js], axis=0)
        prev = cur
    return prev[full]
