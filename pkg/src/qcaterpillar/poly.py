"""Exact rational polynomials, pencil determinants and real-root isolation.

Polynomials are immutable and store :class:`fractions.Fraction` coefficients
in ascending order of power. Everything here is exact; floats appear only
as the final reported root values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from . import kernels
from .errors import DimensionMismatch, DivisionByZeroPoly


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c)
    return Fraction(c)


class RationalPoly:
    """Univariate polynomial over Q in the variable z."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [_to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    # construction helpers
    @classmethod
    def z(cls) -> "RationalPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "RationalPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, c, k: int) -> "RationalPoly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "RationalPoly":
        p = cls((1,))
        for r in roots:
            p = p * cls((-_to_fraction(r), 1))
        return p

    # basic properties
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self) -> str:
        return f"RationalPoly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mon = "z" if k == 1 else f"z^{k}"
                body = mon if a == 1 else f"{a}*{mon}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # ring operations
    def __neg__(self) -> "RationalPoly":
        return RationalPoly(-c for c in self.coeffs)

    def __add__(self, other) -> "RationalPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return RationalPoly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __sub__(self, other) -> "RationalPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "RationalPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "RationalPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def scale(self, c) -> "RationalPoly":
        c = _to_fraction(c)
        return RationalPoly(x * c for x in self.coeffs)

    def shift(self, k: int) -> "RationalPoly":
        """Multiply by z**k (k >= 0)."""
        if not self.coeffs:
            return self
        return RationalPoly((0,) * k + self.coeffs)

    def __divmod__(self, other) -> tuple["RationalPoly", "RationalPoly"]:
        other = _as_poly(other)
        if other.is_zero():
            raise DivisionByZeroPoly("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree
        inv = 1 / other.lc
        if len(r) - 1 < db:
            return RationalPoly(), self
        q = [Fraction(0)] * (len(r) - db)
        bc = other.coeffs
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv
            q[k] = c
            if c:
                for j in range(db + 1):
                    r[k + j] -= c * bc[j]
        return RationalPoly(q), RationalPoly(r[:db])

    def __floordiv__(self, other) -> "RationalPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "RationalPoly":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "RationalPoly":
        q, r = divmod(self, other)
        if r:
            raise ValueError(f"{other} does not divide {self}")
        return q

    def derivative(self) -> "RationalPoly":
        return RationalPoly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def monic(self) -> "RationalPoly":
        if not self.coeffs:
            return self
        return self.scale(1 / self.lc)

    def __call__(self, x):
        """Evaluate by Horner; exact for int/Fraction, float otherwise."""
        acc = 0 if not isinstance(x, float) else 0.0
        if isinstance(x, float):
            for c in reversed(self.coeffs):
                acc = acc * x + float(c)
            return acc
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_neg(self) -> "RationalPoly":
        """Return f(-z)."""
        return RationalPoly(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def valuation(self) -> int:
        """Largest k with z**k dividing self (-1 for zero)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return -1

    # integer views
    def integer_primitive(self) -> tuple[list[int], Fraction]:
        """Return (ints, s) with self == s * ints, ints primitive with positive leading coefficient."""
        if not self.coeffs:
            return [], Fraction(0)
        den = reduce(math.lcm, (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = reduce(math.gcd, ints, 0)
        if ints[-1] < 0:
            g = -g
        ints = [x // g for x in ints]
        return ints, Fraction(g, den)

    def to_json(self) -> dict:
        return {"coeffs": [_frac_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "RationalPoly":
        if isinstance(obj, dict):
            obj = obj["coeffs"]
        return cls(Fraction(c) for c in obj)


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _as_poly(x):
    if isinstance(x, RationalPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalPoly((x,))
    return NotImplemented


Z = RationalPoly.z()
ONE = RationalPoly.const(1)


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer polys (ascending lists), lc(b)^(da-db+1) * a mod b."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return r


def _primitive(a: list[int]) -> list[int]:
    g = reduce(math.gcd, a, 0)
    if g == 0:
        return a
    if a[-1] < 0:
        g = -g
    return [x // g for x in a]


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic gcd over Q (primitive remainder sequence over Z)."""
    if a.is_zero() and b.is_zero():
        raise DivisionByZeroPoly("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    x, _ = a.integer_primitive()
    y, _ = b.integer_primitive()
    if len(x) < len(y):
        x, y = y, x
    while y:
        r = _int_prem(x, y)
        x, y = y, (_primitive(r) if r else r)
    return RationalPoly(x).monic()


def squarefree_decomposition(f: RationalPoly) -> list[tuple[RationalPoly, int]]:
    """Yun's algorithm: f = c * prod(g_i ** i) with g_i square-free, pairwise coprime.

    Returns the nonconstant monic factors with their multiplicities.
    """
    if f.degree < 1:
        return []
    out = []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f.exact_div(a)
    c = df.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a.monic(), i))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        i += 1
    return out


def det_pencil(adjacency: Sequence[Sequence[int]], diag: Sequence[int]) -> RationalPoly:
    """det(-z*D + A) by evaluation at n+1 integer nodes and exact interpolation."""
    n = len(adjacency)
    if len(diag) != n or any(len(row) != n for row in adjacency):
        raise DimensionMismatch(f"A is {n}x? and D has {len(diag)} entries")
    if n == 0:
        return ONE
    nodes = [0]
    k = 1
    while len(nodes) < n + 1:
        nodes.append(k)
        if len(nodes) < n + 1:
            nodes.append(-k)
        k += 1
    base = [[int(x) for x in row] for row in adjacency]
    values = []
    for z in nodes:
        m = [row[:] for row in base]
        for i in range(n):
            m[i][i] -= z * diag[i]
        values.append(kernels.bareiss_det(m))
    return interpolate(nodes, values)


def interpolate(nodes: Sequence[int], values: Sequence[int]) -> RationalPoly:
    """Exact interpolating polynomial through (nodes[i], values[i]) via Newton form."""
    n = len(nodes)
    dd = [Fraction(v) for v in values]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - j])
    # Horner on the Newton basis, in coefficient lists
    acc = [dd[n - 1]]
    for k in range(n - 2, -1, -1):
        xk = nodes[k]
        nxt = [Fraction(0)] * (len(acc) + 1)
        for i, c in enumerate(acc):
            nxt[i + 1] += c
            nxt[i] -= c * xk
        nxt[0] += dd[k]
        acc = nxt
    return RationalPoly(acc)


# --------------------------------------------------------------------------
# real roots


@dataclass(frozen=True)
class RootSet:
    """Real roots as sorted (value, multiplicity) pairs."""

    roots: tuple[tuple[float, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(sorted((float(v), int(m)) for v, m in self.roots)))

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def values(self) -> list[float]:
        return [v for v, _ in self.roots]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.roots)

    def expanded(self) -> list[float]:
        """Values repeated by multiplicity, ascending."""
        return [v for v, m in self.roots for _ in range(m)]

    def to_json(self) -> list:
        return [{"value": v, "multiplicity": m} for v, m in self.roots]


def sturm_chain(f: RationalPoly) -> list[list[int]]:
    """Sturm sequence of a square-free f, each member scaled to a primitive integer poly.

    Scaling factors are positive so sign patterns are preserved.
    """
    seq = [f, f.derivative()]
    while seq[-1].degree > 0:
        seq.append(-(seq[-2] % seq[-1]))
        if seq[-1].is_zero():
            seq.pop()
            break
    out = []
    for p in seq:
        ints, s = p.integer_primitive()
        if s < 0:
            ints = [-x for x in ints]
        out.append(ints)
    return out


def _variations(chain, x: Fraction) -> int:
    return kernels.sign_variations(chain, x.numerator, x.denominator)


def _sign(ints, x: Fraction) -> int:
    v = kernels.horner_eval(ints, x.numerator, x.denominator)
    return (v > 0) - (v < 0)


def _isolate_squarefree(f: RationalPoly, lo: Fraction, hi: Fraction, tol: Fraction) -> list[float]:
    """Roots of square-free f in [lo, hi] as floats (midpoints of width<=tol brackets)."""
    found: list[float] = []
    g = f
    for end in (lo, hi):
        if g(end) == 0:
            found.append(float(end))
            g = g.exact_div(RationalPoly((-end, 1)))
    if g.degree < 1:
        return found
    ints, _ = g.integer_primitive()
    chain = sturm_chain(g)

    def refine(a: Fraction, b: Fraction):
        sa = _sign(ints, a)
        while b - a > tol:
            m = (a + b) / 2
            sm = _sign(ints, m)
            if sm == 0:
                return float(m)
            if sm == sa:
                a = m
            else:
                b = m
        return float((a + b) / 2)

    stack = [(lo, hi, _variations(chain, lo), _variations(chain, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count <= 0:
            continue
        if count == 1:
            found.append(refine(a, b))
            continue
        m = (a + b) / 2
        if _sign(ints, m) == 0:
            found.append(float(m))
            # step off m until the guard interval holds only m
            eps = (b - a) / 4
            while True:
                left, right = m - eps, m + eps
                if _sign(ints, left) and _sign(ints, right) and _variations(chain, left) - _variations(chain, right) == 1:
                    break
                eps /= 2
            stack.append((a, left, va, _variations(chain, left)))
            stack.append((right, b, _variations(chain, right), vb))
        else:
            vm = _variations(chain, m)
            stack.append((a, m, va, vm))
            stack.append((m, b, vm, vb))
    return found


def isolate_roots(poly: RationalPoly, lo=-1, hi=1, tol: float = 1e-12) -> RootSet:
    """All real roots of ``poly`` in [lo, hi] with exact multiplicities."""
    if poly.is_zero():
        raise ValueError("zero polynomial has no isolated roots")
    lo, hi = _to_fraction(lo), _to_fraction(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    if tol <= 0:
        raise ValueError("tol must be positive")
    ftol = Fraction(tol)
    roots = []
    for factor, mult in squarefree_decomposition(poly):
        for v in _isolate_squarefree(factor, lo, hi, ftol):
            roots.append((v, mult))
    return RootSet(tuple(roots))


# --------------------------------------------------------------------------
# rational functions


def _joint_integer_normal(num: RationalPoly, den: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
    """Scale num/den jointly to coprime-content integer coefficients with lc(den) > 0."""
    allc = num.coeffs + den.coeffs
    d = reduce(math.lcm, (c.denominator for c in allc), 1)
    g = reduce(math.gcd, (int(c * d) for c in allc), 0)
    s = Fraction(d, g)
    if den.lc < 0:
        s = -s
    return num.scale(s), den.scale(s)


class RationalFunction:
    """Reduced quotient num/den of rational polynomials.

    The stored form is canonical: gcd(num, den) = 1, all coefficients are
    integers with no common factor, and den has positive leading coefficient.
    Equality is therefore coefficient equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE, *, reduced: bool = False):
        num, den = _as_poly(num), _as_poly(den)
        if den.is_zero():
            raise DivisionByZeroPoly("zero denominator")
        if num.is_zero():
            self.num, self.den = RationalPoly(), ONE
            return
        if not reduced:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        self.num, self.den = _joint_integer_normal(num, den)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction(({self.num}) / ({self.den}))"

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, reduced=True)

    def __add__(self, other) -> "RationalFunction":
        other = _as_rf(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        return self + (-_as_rf(other))

    def __rsub__(self, other) -> "RationalFunction":
        return _as_rf(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = _as_rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.num.is_zero():
            raise DivisionByZeroPoly("reciprocal of zero")
        return RationalFunction(self.den, self.num, reduced=True)

    def __truediv__(self, other) -> "RationalFunction":
        return self * _as_rf(other).reciprocal()

    def __rtruediv__(self, other) -> "RationalFunction":
        return _as_rf(other) * self.reciprocal()

    @property
    def leading_ratio(self) -> Fraction:
        return self.num.lc / self.den.lc

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj) -> "RationalFunction":
        return cls(RationalPoly.from_json(obj["num"]), RationalPoly.from_json(obj["den"]))


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(_as_poly(x), ONE, reduced=True)


def reduce_fraction(num: RationalPoly, den: RationalPoly) -> RationalFunction:
    """Cancel the monic gcd of num and den and normalise the sign of den."""
    return RationalFunction(num, den)
