# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels: Bareiss determinants and Sturm-chain evaluation.

Entries stay Python integers (arbitrary precision); the gain comes from
typed loop control and list access. Semantics match ``_kernels_py``.
"""


def bareiss_det(list rows):
    cdef Py_ssize_t n = len(rows), k, i, j
    cdef int sign = 1
    cdef list a, rowk, rowi
    cdef object prev, akk, aik, v, w
    if n == 0:
        return 1
    a = [list(row) for row in rows]
    prev = 1
    for k in range(n - 1):
        rowk = <list>a[k]
        if rowk[k] == 0:
            for i in range(k + 1, n):
                if (<list>a[i])[k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
            rowk = <list>a[k]
        akk = rowk[k]
        for i in range(k + 1, n):
            rowi = <list>a[i]
            aik = rowi[k]
            if aik == 0:
                for j in range(k + 1, n):
                    v = rowi[j]
                    if v:
                        rowi[j] = v * akk // prev
            else:
                for j in range(k + 1, n):
                    v = rowi[j]
                    w = rowk[j]
                    if v or w:
                        rowi[j] = (v * akk - aik * w) // prev
        prev = akk
    return sign * (<list>a[n - 1])[n - 1]


cpdef object horner_eval(list coeffs, object num, object den):
    cdef Py_ssize_t n = len(coeffs), k
    cdef object acc, dpow
    if n == 0:
        return 0
    acc = coeffs[n - 1]
    dpow = 1
    for k in range(n - 2, -1, -1):
        dpow *= den
        acc = acc * num + coeffs[k] * dpow
    return acc


def sign_variations(list chain, object num, object den):
    cdef int count = 0, last = 0, s
    cdef object v
    for coeffs in chain:
        v = horner_eval(<list>coeffs, num, den)
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last != 0 and s != last:
            count += 1
        last = s
    return count
