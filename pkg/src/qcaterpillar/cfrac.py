"""Caterpillar continued fractions.

For a caterpillar rooted at a stalk end with interior degrees m_1..m_{r-1},

    psi/theta = -z + 1/(m_1 z - (m_1-2)/z - 1/(m_2 z - (m_2-2)/z - ...
                      - 1/(m_{r-1} z - (m_{r-1}-1)/z)))

``cf_build`` evaluates this chain, ``cf_expand_exact`` peels it off again
using leading-coefficient ratios, and ``cf_expand_rounded`` does the same
for ratios whose coefficients carry small errors.

Peeling stages off monomial coefficients amplifies errors by roughly an
order of magnitude per stage. ``cf_expand_measure`` runs the same recursion
on the positive measure whose Stieltjes transform is -theta/psi; each stage
is then a Lanczos step plus removal of an atom at 0, which stays stable for
roots measured to ~1e-3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NotCaterpillarForm, ToleranceExceeded
from .poly import RationalFunction, RationalPoly, Z
from .tree import CaterpillarShape

MINUS_ONE_OVER_Z = RationalFunction(RationalPoly((-1,)), Z)
ONE_OVER_Z = RationalFunction(RationalPoly((1,)), Z)


@dataclass(frozen=True)
class RealRatio:
    """num/den with float coefficients, ascending powers."""

    num: tuple[float, ...]
    den: tuple[float, ...]

    @classmethod
    def from_function(cls, f: RationalFunction) -> "RealRatio":
        return cls(tuple(float(c) for c in f.num.coeffs), tuple(float(c) for c in f.den.coeffs))

    def to_json(self) -> dict:
        return {"num": {"coeffs": list(self.num)}, "den": {"coeffs": list(self.den)}}

    @classmethod
    def from_json(cls, obj) -> "RealRatio":
        def read(p):
            cs = p["coeffs"] if isinstance(p, dict) else p
            return tuple(float(Fraction(c)) if isinstance(c, str) else float(c) for c in cs)

        return cls(read(obj["num"]), read(obj["den"]))


@dataclass
class StageRecord:
    index: int
    m: int
    residual: object  # RationalFunction (exact) or (num, den) float tuples (rounded)
    rounding_error: float = 0.0

    def to_json(self) -> dict:
        if isinstance(self.residual, RationalFunction):
            res = self.residual.to_json()
        else:
            num, den = self.residual
            res = {"num": {"coeffs": list(num)}, "den": {"coeffs": list(den)}}
        return {"stage": self.index, "m": self.m, "residual": res, "rounding_error": self.rounding_error}


@dataclass
class ExpansionTrace:
    stages: list[StageRecord] = field(default_factory=list)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(s.m for s in self.stages)

    def to_json(self) -> list:
        return [s.to_json() for s in self.stages]


def _stage_term(m: int, c: int) -> RationalFunction:
    """m z - c/z."""
    return RationalFunction(RationalPoly((-c, 0, m)), Z)


def cf_build(shape: CaterpillarShape) -> RationalFunction:
    degs = shape.interior_degrees
    if not degs:
        return RationalFunction(RationalPoly((1, 0, -1)), Z)
    inner = _stage_term(degs[-1], degs[-1] - 1)
    for m in reversed(degs[:-1]):
        inner = _stage_term(m, m - 2) - inner.reciprocal()
    return -RationalFunction(Z) + inner.reciprocal()


def diophantine_solution(m: int, m_next: int) -> tuple[int, ...]:
    """Unique (up to order) positive integers n_k, k < m, with sum 1/n_k = m - 2 + 1/m_next."""
    target = Fraction(m - 2) + Fraction(1, m_next)
    if not (m - 2 < target <= m - 1):
        raise NotCaterpillarForm(f"no admissible split for m={m}, next={m_next}")
    sol = (1,) * (m - 2) + (m_next,)
    assert sum(Fraction(1, n) for n in sol) == target
    return sol


def _check_diophantine(degs: Sequence[int]) -> None:
    for a, b in zip(degs, degs[1:]):
        diophantine_solution(a, b)


def cf_expand_exact(ratio: RationalFunction) -> tuple[CaterpillarShape, ExpansionTrace]:
    """Recover the interior degrees from psi/theta in exact arithmetic."""
    if ratio.num.degree != ratio.den.degree + 1:
        raise NotCaterpillarForm("numerator degree must exceed denominator degree by one")
    if ratio.leading_ratio != -1:
        raise NotCaterpillarForm(f"leading ratio is {ratio.leading_ratio}, expected -1")
    trace = ExpansionTrace()
    s = ratio + RationalFunction(Z)
    if s == ONE_OVER_Z:
        return CaterpillarShape(()), trace
    if s.num.is_zero():
        raise NotCaterpillarForm("ratio is exactly -z")
    f = s.reciprocal()
    degs: list[int] = []
    size = f.num.degree + f.den.degree
    while True:
        if f.num.degree != f.den.degree + 1:
            raise NotCaterpillarForm(f"stage {len(degs) + 1}: degrees {f.num.degree}/{f.den.degree}")
        q = f.leading_ratio
        if q.denominator != 1 or q < 2:
            raise NotCaterpillarForm(f"stage {len(degs) + 1}: leading ratio {q} is not an integer >= 2")
        m = int(q)
        g = f - _stage_term(m, m - 2)
        degs.append(m)
        trace.stages.append(StageRecord(len(degs), m, g))
        if g == MINUS_ONE_OVER_Z:
            break
        if g.num.is_zero():
            raise NotCaterpillarForm(f"stage {len(degs)}: chain ends without a pendant vertex")
        f = -g.reciprocal()
        new_size = f.num.degree + f.den.degree
        if new_size >= size:
            raise NotCaterpillarForm(f"stage {len(degs)}: expansion does not shrink")
        size = new_size
    _check_diophantine(degs)
    return CaterpillarShape(tuple(degs)), trace


# --------------------------------------------------------------------------
# rounded mode


def _rationalize(coeffs) -> list[Fraction]:
    return [Fraction(float(c)) for c in coeffs]


def _strip_top(coeffs: list[Fraction]) -> list[Fraction]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _negligible(c: Fraction, bound: Fraction, what: str) -> None:
    if abs(c) > bound:
        raise ToleranceExceeded(f"{what}: |{float(c):.3g}| exceeds {float(bound):.3g}")


def _clean(p: list[Fraction], q: list[Fraction], tol: Fraction, scale: Fraction, what: str):
    """Bring the residual p/q into reduced shape.

    Drops coefficients of p above deg q - 1 and wrong-parity coefficients of
    both, each after checking it is below tol*scale, then cancels the
    largest power of z whose low coefficients in p are negligible.
    Returns (p, q) rescaled so that q is monic, re-rounded to doubles.
    """
    bound = tol * scale
    q = _strip_top(list(q))
    dq = len(q) - 1
    p = list(p)
    for k in range(dq, len(p)):
        _negligible(p[k], bound, f"{what}: leading term z^{k}")
    p = _strip_top(p[:dq])
    qpar = dq % 2
    for k in range(len(q)):
        if k % 2 != qpar and q[k]:
            _negligible(q[k], bound, f"{what}: parity of denominator z^{k}")
            q[k] = Fraction(0)
    for k in range(len(p)):
        if k % 2 == qpar and p[k]:
            _negligible(p[k], bound, f"{what}: parity of numerator z^{k}")
            p[k] = Fraction(0)
    a = next(k for k, c in enumerate(q) if c)
    t = 0
    while t < a and t < len(p) and abs(p[t]) <= bound:
        t += 1
    if t:
        p = p[t:]
        q = q[t:]
    lead = q[-1]
    p = [Fraction(float(c / lead)) for c in p]
    q = [Fraction(float(c / lead)) for c in q]
    return _strip_top(p), q


def _maxabs(*polys) -> Fraction:
    return max((abs(c) for poly in polys for c in poly), default=Fraction(1)) or Fraction(1)


def cf_expand_rounded(ratio, tol: float = 1e-9) -> tuple[CaterpillarShape, ExpansionTrace]:
    """Expand a ratio known only approximately.

    ``ratio`` is a :class:`RealRatio` or :class:`RationalFunction`. Every
    extracted degree is rounded to the nearest integer and every coefficient
    that must vanish is checked against ``tol`` relative to the size of the
    stage's coefficients.
    """
    if isinstance(ratio, RationalFunction):
        ratio = RealRatio.from_function(ratio)
    tol_f = Fraction(tol)
    num = _strip_top(_rationalize(ratio.num))
    den = _strip_top(_rationalize(ratio.den))
    if not den:
        raise NotCaterpillarForm("zero denominator")
    if len(num) != len(den) + 1:
        raise NotCaterpillarForm("numerator degree must exceed denominator degree by one")
    lead = num[-1] / den[-1]
    if abs(lead + 1) > tol_f:
        raise ToleranceExceeded(f"leading ratio {float(lead)} is not -1 within {tol}")
    num = [c / -lead for c in num]

    # ratio + z
    p = [c + (den[k - 1] if k >= 1 else 0) for k, c in enumerate(num)]
    p, q = _clean(p, den, tol_f, _maxabs(num, den), "stage 0")
    trace = ExpansionTrace()
    if _is_one_over(p, q, 1, tol_f):
        return CaterpillarShape(()), trace
    if not p:
        raise NotCaterpillarForm("ratio is -z")
    f_num, f_den = q, p
    degs: list[int] = []
    while True:
        stage = len(degs) + 1
        if len(f_num) != len(f_den) + 1:
            raise NotCaterpillarForm(f"stage {stage}: degrees {len(f_num) - 1}/{len(f_den) - 1}")
        raw = f_num[-1] / f_den[-1]
        m = round(raw)
        err = abs(raw - m)
        if err > tol_f * max(1, abs(raw)):
            raise ToleranceExceeded(f"stage {stage}: leading ratio {float(raw):.6g} is not an integer")
        if m < 2:
            raise NotCaterpillarForm(f"stage {stage}: extracted degree {m} < 2")
        # g = f - m z + (m-2)/z = (z N - m z^2 D + (m-2) D) / (z D)
        n_len = max(len(f_num) + 1, len(f_den) + 2)
        g_num = [Fraction(0)] * n_len
        for k, c in enumerate(f_num):
            g_num[k + 1] += c
        for k, c in enumerate(f_den):
            g_num[k + 2] -= m * c
            g_num[k] += (m - 2) * c
        g_den = [Fraction(0)] + list(f_den)
        scale = _maxabs(f_num, [m * c for c in f_den])
        g_num, g_den = _clean(g_num, g_den, tol_f, scale, f"stage {stage}")
        degs.append(m)
        trace.stages.append(StageRecord(stage, m, (tuple(map(float, g_num)), tuple(map(float, g_den))), float(err)))
        if _is_one_over(g_num, g_den, -1, tol_f):
            break
        if len(g_den) <= 2 or not g_num:
            raise NotCaterpillarForm(f"stage {stage}: chain ends without a pendant vertex")
        f_num, f_den = [-c for c in g_den], g_num
    _check_diophantine(degs)
    return CaterpillarShape(tuple(degs)), trace


def _is_one_over(p: list[Fraction], q: list[Fraction], sign: int, tol: Fraction) -> bool:
    """Whether p/q equals sign/z within tol, with q monic."""
    if len(q) != 2 or len(p) != 1:
        return False
    return abs(q[0]) <= tol and abs(p[0] - sign * q[1]) <= tol * max(1, abs(q[1]))


# --------------------------------------------------------------------------
# measure mode
#
# For a finite positive measure nu, S(z) = sum_j w_j / (z - x_j). With
# ratio = psi/theta one has ratio + z = S(nu_1), and at every stage
#   F_i = 1 / S(nu_i),  m_i = 1 / mass(nu_i),
#   nu_{i+1} = m_i b_1^2 nu_i' - (m_i - 2) delta_0,
# where b_1 and nu_i' are the first off-diagonal entry and the first
# associated measure of the Jacobi matrix of nu_i / mass(nu_i).
# The chain ends when nu_{i+1} = delta_0, i.e. G = -1/z.


def jacobi_from_measure(x, w) -> np.ndarray:
    """Off-diagonal Jacobi entries b_1..b_{n-1} of the probability measure sum w_j delta_{x_j}.

    Lanczos on diag(x) with full reorthogonalisation; the diagonal is
    returned separately by :func:`jacobi_full`.
    """
    return jacobi_full(x, w)[1]


def jacobi_full(x, w) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal a and off-diagonal b of the Jacobi matrix of sum w_j delta_{x_j} (normalised)."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    n = len(x)
    q = np.sqrt(w / w.sum())
    basis = np.zeros((n, n))
    basis[:, 0] = q
    a = np.zeros(n)
    b = np.zeros(max(n - 1, 0))
    for k in range(n):
        v = x * basis[:, k]
        if k:
            v -= b[k - 1] * basis[:, k - 1]
        a[k] = basis[:, k] @ v
        v -= a[k] * basis[:, k]
        for _ in range(2):
            v -= basis[:, : k + 1] @ (basis[:, : k + 1].T @ v)
        if k + 1 < n:
            b[k] = np.linalg.norm(v)
            if b[k] == 0.0:
                raise NotCaterpillarForm("measure has repeated atoms")
            basis[:, k + 1] = v / b[k]
    return a, b


def measure_from_jacobi(b) -> tuple[np.ndarray, np.ndarray]:
    """Atoms and weights of the zero-diagonal Jacobi matrix with off-diagonal b."""
    b = np.asarray(b, dtype=float)
    n = len(b) + 1
    jac = np.diag(b, 1) + np.diag(b, -1) if n > 1 else np.zeros((1, 1))
    x, u = np.linalg.eigh(jac)
    return x, u[0] ** 2


def measure_from_roots(alphas: Sequence[float], betas: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Poles and residues of -theta/psi for psi = -prod(z - alpha), theta = prod(z - beta)."""
    a = np.asarray(sorted(alphas), dtype=float)
    b = np.asarray(sorted(betas), dtype=float)
    if len(a) != len(b) + 1:
        raise NotCaterpillarForm(f"need one more pole than zero, got {len(a)} and {len(b)}")
    w = np.empty(len(a))
    for j, x in enumerate(a):
        others = np.delete(a, j) - x
        if np.any(others == 0.0):
            raise NotCaterpillarForm("repeated pole after cancellation")
        # both products carry the same sign flip (n - 1 factors each)
        w[j] = np.prod(b - x) / np.prod(others)
    return a, w


def cf_expand_measure(alphas: Sequence[float], betas: Sequence[float], tol: float = 1e-6
                      ) -> tuple[CaterpillarShape, ExpansionTrace]:
    """Expand psi/theta given by the roots of its reduced numerator and denominator."""
    x, w = measure_from_roots(alphas, betas)
    if np.any(w <= 0):
        raise ToleranceExceeded(f"residues must be positive (roots must interlace), min {w.min():.3g}")
    if abs(w.sum() - 1) > tol:
        raise ToleranceExceeded(f"residues sum to {w.sum():.6g}, expected 1")
    a, b = jacobi_full(x, w)
    if np.max(np.abs(a), initial=0.0) > tol:
        raise ToleranceExceeded(f"measure is not symmetric: diagonal up to {np.max(np.abs(a)):.3g}")
    trace = ExpansionTrace()
    if len(b) == 0:
        raise NotCaterpillarForm("ratio is -z")
    mass = b[0] ** 2
    x, w = measure_from_jacobi(b[1:])
    if len(x) == 1 and abs(x[0]) <= tol and abs(mass - 1) <= tol:
        return CaterpillarShape(()), trace
    degs: list[int] = []
    while True:
        stage = len(degs) + 1
        raw = 1.0 / mass
        m = int(round(raw))
        err = abs(raw - m)
        if err > tol * max(1.0, raw):
            raise ToleranceExceeded(f"stage {stage}: leading ratio {raw:.6g} is not an integer")
        if m < 2:
            raise NotCaterpillarForm(f"stage {stage}: extracted degree {m} < 2")
        if len(x) < 2:
            raise NotCaterpillarForm(f"stage {stage}: chain ends without a pendant vertex")
        a, b = jacobi_full(x, w)
        if np.max(np.abs(a)) > tol:
            raise ToleranceExceeded(f"stage {stage}: measure is not symmetric")
        nx, nw = measure_from_jacobi(b[1:])
        nw = m * b[0] ** 2 * nw
        if m > 2:
            j = int(np.argmin(np.abs(nx)))
            if abs(nx[j]) > tol:
                raise NotCaterpillarForm(f"stage {stage}: no atom at 0 for the {m - 2} pendant vertices")
            nw[j] -= m - 2
            if abs(nw[j]) <= tol:
                nx, nw = np.delete(nx, j), np.delete(nw, j)
            elif nw[j] < 0:
                raise ToleranceExceeded(f"stage {stage}: atom at 0 too light by {-nw[j]:.3g}")
        degs.append(m)
        trace.stages.append(StageRecord(stage, m, (tuple(nx.tolist()), tuple(nw.tolist())), float(err)))
        if len(nx) == 1 and abs(nx[0]) <= tol and abs(nw[0] - 1) <= tol:
            break
        if len(nx) == 0:
            raise NotCaterpillarForm(f"stage {stage}: measure exhausted before the chain closed")
        if np.any(nw <= 0):
            raise ToleranceExceeded(f"stage {stage}: non-positive weight {nw.min():.3g}")
        mass = float(nw.sum())
        x, w = nx, nw / mass
    _check_diophantine(degs)
    return CaterpillarShape(tuple(degs)), trace
