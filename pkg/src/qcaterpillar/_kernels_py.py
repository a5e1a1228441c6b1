"""Pure-Python implementations of the hot kernels.

Mirrors ``_kernels.pyx`` line for line; used when the compiled module is
unavailable or ``QCAT_PURE_PYTHON=1`` is set.
"""


def bareiss_det(rows):
    """Exact determinant of a square integer matrix (fraction-free Bareiss).

    ``rows`` is a list of lists of ints and is not modified.
    """
    n = len(rows)
    if n == 0:
        return 1
    a = [list(row) for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        rowk = a[k]
        if rowk[k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
            rowk = a[k]
        akk = rowk[k]
        for i in range(k + 1, n):
            rowi = a[i]
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
    return sign * a[n - 1][n - 1]


def horner_eval(coeffs, num, den):
    """Return den**n * f(num/den) for integer ``coeffs`` (ascending), n = len - 1."""
    n = len(coeffs)
    if n == 0:
        return 0
    acc = coeffs[n - 1]
    dpow = 1
    for k in range(n - 2, -1, -1):
        dpow *= den
        acc = acc * num + coeffs[k] * dpow
    return acc


def sign_variations(chain, num, den):
    """Count sign changes of a polynomial sequence at num/den (den > 0), zeros skipped."""
    count = 0
    last = 0
    for coeffs in chain:
        v = horner_eval(coeffs, num, den)
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            count += 1
        last = s
    return count
