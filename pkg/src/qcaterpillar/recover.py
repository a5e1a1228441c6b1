"""Recover a caterpillar shape from its Neumann and Dirichlet spectra.

Pipeline: fold sqrt(lambda)*l modulo 2*pi, cluster the residues, read the
roots of psi and theta off the cluster centres, rebuild psi/theta and
expand it into the caterpillar continued fraction. A shape is only
reported as a success after its own polynomials reproduce the measured
roots.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .cfrac import ExpansionTrace, RealRatio, cf_expand_measure
from .errors import (CaterpillarError, CountMismatch, InconsistentWindows, MirrorMismatch,
                     UnexpectedLineCluster, VerificationFailed)
from .pencil import build_pencil
from .poly import RootSet, isolate_roots
from .spectra import TWO_PI, Spectrum
from .tree import CaterpillarShape, shape_to_tree

MIN_MATCH_TOL = 1e-8
# expansion tolerance = EXPAND_FACTOR * (largest angle stderr), capped; stage
# errors were observed up to ~175x the stderr on noisy (5,3,2,4) data
EXPAND_FACTOR = 500.0
EXPAND_CAP = 0.2


@dataclass(frozen=True)
class Cluster:
    center: float  # residue in [0, 2*pi)
    weight: int  # entries per window
    spread: float  # standard deviation of the member residues
    counts: tuple[int, ...] = ()  # per analysis window
    samples: int = 0

    @property
    def stderr(self) -> float:
        return self.spread / math.sqrt(self.samples) if self.samples else self.spread


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[Cluster, ...]
    windows: int
    first_window: int  # analysis windows are first_window..windows

    @property
    def centers(self) -> list[float]:
        return [c.center for c in self.clusters]

    @property
    def total_weight(self) -> int:
        return sum(c.weight for c in self.clusters)

    def to_json(self) -> dict:
        return {
            "windows": self.windows,
            "analysis_windows": [self.first_window, self.windows],
            "clusters": [
                {"center": c.center, "weight": c.weight, "spread": c.spread,
                 "stderr": c.stderr, "samples": c.samples}
                for c in self.clusters
            ],
        }


def _circ_diff(a: float, b: float) -> float:
    """Signed a - b wrapped into (-pi, pi]."""
    d = (a - b) % TWO_PI
    return d - TWO_PI if d > math.pi else d


def _single_linkage_circle(residues: np.ndarray, gap: float) -> list[np.ndarray]:
    """Groups of indices into ``residues`` whose circular chain gaps are all <= gap."""
    if residues.size == 0:
        return []
    order = np.argsort(residues)
    r = residues[order]
    cuts = np.nonzero(np.diff(r) > gap)[0]
    groups = np.split(order, cuts + 1)
    if len(groups) > 1 and (r[0] + TWO_PI - r[-1]) <= gap:
        groups[0] = np.concatenate([groups[-1], groups[0]])
        groups.pop()
    return groups


def fold_and_cluster(spec: Spectrum, l: float, windows: int = 50, gap: float = 0.05) -> ClusterSet:
    """Cluster the residues sqrt(lambda)*l mod 2*pi.

    Clusters, centres and weights come from the upper half of the windows
    (k > windows // 2), where the O(1/k) deviations are smallest.
    """
    if not l > 0 or not gap > 0 or windows < 1:
        raise ValueError("need l > 0, gap > 0, windows >= 1")
    y = spec.sqrt_values * l
    y = y[y < TWO_PI * (windows + 1)]
    first = windows // 2 + 1
    raw_k = np.floor(y / TWO_PI).astype(int) + 1
    upper = y[(raw_k >= first) & (raw_k <= windows)]
    groups = _single_linkage_circle(np.mod(upper, TWO_PI), gap)

    centers = []
    for g in groups:
        ref = float(np.mod(upper[g[0]], TWO_PI))
        unwrapped = [ref + _circ_diff(float(v), ref) for v in upper[g]]
        centers.append(float(np.mean(unwrapped)) % TWO_PI)
    if not centers:
        return ClusterSet((), windows, first)

    # assign every entry to its nearest centre and a cluster-relative window
    cen = np.array(centers)
    members: list[list[tuple[int, float]]] = [[] for _ in centers]
    for v in y:
        d = np.abs((np.mod(v, TWO_PI) - cen + math.pi) % TWO_PI - math.pi)
        j = int(np.argmin(d))
        k = int(round((v - cen[j]) / TWO_PI)) + 1
        if first <= k <= windows:
            members[j].append((k, float(v - TWO_PI * (k - 1))))

    n_an = windows - first + 1
    clusters = []
    for j, c in enumerate(centers):
        per = Counter(k for k, _ in members[j])
        counts = tuple(per.get(k, 0) for k in range(first, windows + 1))
        if max(counts) - min(counts) > 1:
            raise InconsistentWindows(
                f"cluster at {c:.4f}: per-window counts range {min(counts)}..{max(counts)}")
        weight = Counter(counts).most_common(1)[0][0]
        if weight == 0:
            continue
        res = np.array([r for _, r in members[j]])
        center = float(np.mean(res)) % TWO_PI if res.size else c
        spread = float(np.std(res)) if res.size else 0.0
        clusters.append(Cluster(center, weight, spread, counts, int(res.size)))
    clusters.sort(key=lambda c: c.center)
    if sum(c.weight for c in clusters) * n_an == 0:
        raise InconsistentWindows("no populated clusters")
    return ClusterSet(tuple(clusters), windows, first)


class RootEstimates(NamedTuple):
    alphas: RootSet
    betas: RootSet
    inferred_p: int
    alpha_stderr: tuple[float, ...]  # of arccos(alpha), aligned with alphas.roots
    beta_stderr: tuple[float, ...]


def _near(x: float, target: float, tol: float) -> bool:
    return abs(_circ_diff(x, target)) <= tol


def _pair_mirrors(clusters: list[Cluster], tol: float, what: str) -> list[tuple[float, int, float]]:
    """Match clusters at x in (0, pi) with their mirrors at 2*pi - x.

    Returns (cos x, weight, stderr of x) per pair, x averaged over both members.
    """
    pool = list(clusters)
    out = []
    while pool:
        c = pool.pop(0)
        want = TWO_PI - c.center
        cands = [m for m in pool if _near(m.center, want, tol) and m.weight == c.weight]
        if not cands:
            raise MirrorMismatch(f"{what}: cluster at {c.center:.6f} (weight {c.weight}) has no mirror")
        mate = min(cands, key=lambda m: abs(_circ_diff(m.center, want)))
        pool.remove(mate)
        lo, hi = (c, mate) if c.center <= math.pi else (mate, c)
        x = 0.5 * (lo.center + (TWO_PI - hi.center))
        out.append((math.cos(x), c.weight, 0.5 * math.hypot(c.stderr, mate.stderr)))
    return out


def roots_from_clusters(neumann: ClusterSet, dirichlet: ClusterSet, line_tol: float = 0.05) -> RootEstimates:
    """Roots of psi (alphas) and theta (betas) from the two cluster sets."""
    line, interior = [], []
    for c in neumann.clusters:
        (line if _near(c.center, 0.0, line_tol) or _near(c.center, math.pi, line_tol) else interior).append(c)
    at_zero = [c for c in line if _near(c.center, 0.0, line_tol)]
    at_pi = [c for c in line if _near(c.center, math.pi, line_tol)]
    if len(at_zero) != 1 or len(at_pi) != 1 or any(c.weight != 1 for c in line):
        raise CountMismatch("Neumann data needs exactly one line cluster at 0 and one at pi, each of weight 1")
    for c in dirichlet.clusters:
        if _near(c.center, 0.0, line_tol) or _near(c.center, math.pi, line_tol):
            raise UnexpectedLineCluster(f"Dirichlet cluster at {c.center:.6f}")

    a = _pair_mirrors(interior, line_tol, "Neumann")
    b = _pair_mirrors(list(dirichlet.clusters), line_tol, "Dirichlet")
    alphas = RootSet(((-1.0, 1), (1.0, 1)) + tuple((v, w) for v, w, _ in a))
    betas = RootSet(tuple((v, w) for v, w, _ in b))
    a_map = {1.0: at_zero[0].stderr, -1.0: at_pi[0].stderr}
    a_map.update({v: s for v, _, s in a})
    b_map = {v: s for v, _, s in b}
    p = alphas.total
    if betas.total != p - 1:
        raise CountMismatch(f"{alphas.total} Neumann roots but {betas.total} Dirichlet roots")
    return RootEstimates(alphas, betas, p,
                         tuple(a_map.get(v, 0.0) for v in alphas.values),
                         tuple(b_map.get(v, 0.0) for v in betas.values))


def _parity_clean(coeffs: np.ndarray) -> np.ndarray:
    """Zero the coefficients whose parity differs from the degree (ascending order)."""
    out = coeffs.copy()
    deg = len(out) - 1
    out[(np.arange(len(out)) % 2) != (deg % 2)] = 0.0
    return out


def cancel_common_roots(alphas: RootSet, betas: RootSet, match_tol=MIN_MATCH_TOL):
    """Pair each alpha with the nearest free beta on the angle scale arccos(.).

    ``match_tol`` is a scalar or a callable ``(alpha, beta) -> tol``.
    Returns (kept alphas, kept betas, cancelled (alpha, beta) pairs).
    """
    a = alphas.expanded()
    b = betas.expanded()
    if len(a) != len(b) + 1:
        raise CountMismatch(f"need |alphas| = |betas| + 1, got {len(a)} and {len(b)}")
    tol_of = match_tol if callable(match_tol) else (lambda x, y: match_tol)
    cancelled = []
    free_b = list(b)
    keep_a = []
    for x in a:
        ax = _angle(x)
        if free_b:
            j = min(range(len(free_b)), key=lambda i: abs(_angle(free_b[i]) - ax))
            if abs(_angle(free_b[j]) - ax) <= tol_of(x, free_b[j]):
                cancelled.append((x, free_b.pop(j)))
                continue
        keep_a.append(x)
    return keep_a, free_b, cancelled


def symmetrize(roots) -> list[float]:
    """Average a sorted root list with its negated reversal (psi and theta have a parity)."""
    r = np.sort(np.asarray(roots, dtype=float))
    return (0.5 * (r - r[::-1])).tolist()


def assemble_ratio(alphas: RootSet, betas: RootSet, match_tol=MIN_MATCH_TOL):
    """-prod(z - alpha) / prod(z - beta) after cancelling alpha ~ beta pairs.

    Returns (RealRatio, list of cancelled (alpha, beta) pairs).
    """
    keep_a, free_b, cancelled = cancel_common_roots(alphas, betas, match_tol)
    num = -np.poly(keep_a)[::-1] if keep_a else np.array([-1.0])
    den = np.poly(free_b)[::-1] if free_b else np.array([1.0])
    return RealRatio(tuple(_parity_clean(num).tolist()), tuple(_parity_clean(den).tolist())), cancelled


def _angle(x: float) -> float:
    return math.acos(max(-1.0, min(1.0, x)))


@dataclass
class RecoverOptions:
    windows: int = 50
    gap: float = 0.05
    tol: Optional[float] = None  # expansion tolerance; None derives it from the cluster spread
    match_factor: float = 10.0
    verify: bool = True

    def to_json(self) -> dict:
        return {"windows": self.windows, "gap": self.gap, "tol": self.tol,
                "match_factor": self.match_factor, "verify": self.verify}


@dataclass
class RecoveryReport:
    status: str = "failure"
    reason: str = ""
    inferred_p: Optional[int] = None
    alphas: Optional[RootSet] = None
    betas: Optional[RootSet] = None
    ratio: Optional[RealRatio] = None
    cancelled: list = field(default_factory=list)
    shape: Optional[CaterpillarShape] = None
    trace: Optional[ExpansionTrace] = None
    neumann_clusters: Optional[ClusterSet] = None
    dirichlet_clusters: Optional[ClusterSet] = None
    tolerances: dict = field(default_factory=dict)
    verification_error: Optional[float] = None
    options: Optional[RecoverOptions] = None
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "success"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "inferred_p": self.inferred_p,
            "alphas": self.alphas.to_json() if self.alphas else None,
            "betas": self.betas.to_json() if self.betas else None,
            "ratio": self.ratio.to_json() if self.ratio else None,
            "cancelled_pairs": [list(p) for p in self.cancelled],
            "interior_degrees": list(self.shape.interior_degrees) if self.shape is not None else None,
            "trace": self.trace.to_json() if self.trace else None,
            "stage_residuals": [s.rounding_error for s in self.trace.stages] if self.trace else None,
            "neumann_clusters": self.neumann_clusters.to_json() if self.neumann_clusters else None,
            "dirichlet_clusters": self.dirichlet_clusters.to_json() if self.dirichlet_clusters else None,
            "tolerances": self.tolerances,
            "verification_error": self.verification_error,
            "diagnostics": self.diagnostics,
            "metadata": {
                "expansion": "measure (Lanczos on the residue measure of -theta/psi)",
                "options": self.options.to_json() if self.options else None,
                "note": "window count, gap and tolerances are engineering defaults; "
                        "no recovery guarantee is implied for noisy data",
            },
        }


def _max_root_mismatch(est: RootSet, true: RootSet) -> float:
    a, b = est.expanded(), true.expanded()
    if len(a) != len(b):
        return math.inf
    return max((abs(x - y) for x, y in zip(a, b)), default=0.0)


def verify_shape(shape: CaterpillarShape, alphas: RootSet, betas: RootSet) -> float:
    """Largest distance between the measured roots and those of the shape's own pencil."""
    pair = build_pencil(shape_to_tree(shape))
    return max(_max_root_mismatch(alphas, isolate_roots(pair.psi, -1, 1)),
               _max_root_mismatch(betas, isolate_roots(pair.theta, -1, 1)))


def recover(neumann: Spectrum, dirichlet: Spectrum, l: float, opts: RecoverOptions | None = None) -> RecoveryReport:
    """Run the whole inverse pipeline; domain errors end up in ``status``, never raised."""
    opts = opts or RecoverOptions()
    rep = RecoveryReport(options=opts)
    try:
        rep.neumann_clusters = fold_and_cluster(neumann, l, opts.windows, opts.gap)
        rep.dirichlet_clusters = fold_and_cluster(dirichlet, l, opts.windows, opts.gap)
        for name, cs in (("neumann", rep.neumann_clusters), ("dirichlet", rep.dirichlet_clusters)):
            for c in cs.clusters:
                if c.weight > 1:
                    rep.diagnostics.append(
                        f"{name} cluster at {c.center:.6f} has weight {c.weight}: coincident roots merged")
        est = roots_from_clusters(rep.neumann_clusters, rep.dirichlet_clusters, opts.gap)
        rep.alphas, rep.betas, rep.inferred_p = est.alphas, est.betas, est.inferred_p
        se_a = dict(zip(est.alphas.values, est.alpha_stderr))
        se_b = dict(zip(est.betas.values, est.beta_stderr))
        se_max = max(est.alpha_stderr + est.beta_stderr, default=0.0)

        def match_tol(x, y):
            return max(MIN_MATCH_TOL, opts.match_factor * math.hypot(se_a.get(x, se_max), se_b.get(y, se_max)))

        tol = opts.tol if opts.tol is not None else min(EXPAND_CAP, max(1e-6, EXPAND_FACTOR * se_max))
        verify_tol = max(1e-7, opts.match_factor * se_max)
        rep.tolerances = {"stderr": se_max, "match_factor": opts.match_factor, "expand": tol, "verify": verify_tol}
        keep_a, keep_b, rep.cancelled = cancel_common_roots(est.alphas, est.betas, match_tol)
        keep_a, keep_b = symmetrize(keep_a), symmetrize(keep_b)
        rep.ratio = RealRatio(tuple(_parity_clean(-np.poly(keep_a)[::-1]).tolist()),
                              tuple(_parity_clean(np.poly(keep_b)[::-1] if keep_b else np.ones(1)).tolist()))
        shape, rep.trace = cf_expand_measure(keep_a, keep_b, tol)
        if shape.vertex_count != est.inferred_p:
            raise CountMismatch(f"shape {shape} has {shape.vertex_count} vertices, data says {est.inferred_p}")
        if opts.verify:
            rep.verification_error = verify_shape(shape, est.alphas, est.betas)
            if not rep.verification_error <= verify_tol:
                raise VerificationFailed(
                    f"shape {shape} misses the measured roots by {rep.verification_error:.3g} > {verify_tol:.3g}")
        rep.shape = shape
        rep.status = "success"
    except (CaterpillarError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        rep.status = "failure"
        rep.reason = f"{type(exc).__name__}: {exc}"
    return rep
