"""Neumann and Dirichlet eigenvalues of an equilateral tree with zero potential.

Each root a of the pencil polynomial contributes two arithmetic branches in
sqrt(lambda)*l, at 2*pi*(k-1) + arccos(a) and 2*pi*k - arccos(a). The
Neumann problem also carries the line branch pi*(k-1) coming from sin.
Bounded perturbations on the sqrt(lambda) scale stand in for nonzero edge
potentials.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .pencil import PencilPair, build_pencil
from .poly import RootSet, isolate_roots
from .tree import Tree

TWO_PI = 2 * math.pi
BRANCH_KINDS = ("N-line", "N-up", "N-down", "D-up", "D-down")


@dataclass(frozen=True)
class Branch:
    kind: str
    i: int
    k: int


@dataclass(frozen=True)
class Eigenvalue:
    sqrt_lambda: float
    branch: Optional[Branch] = None

    @property
    def lam(self) -> float:
        return self.sqrt_lambda * self.sqrt_lambda


@dataclass(frozen=True)
class Spectrum:
    l: float
    entries: tuple[Eigenvalue, ...] = ()

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError("edge length must be positive")
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e.sqrt_lambda)))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def sqrt_values(self) -> np.ndarray:
        return np.array([e.sqrt_lambda for e in self.entries], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return self.sqrt_values ** 2

    def unlabeled(self) -> "Spectrum":
        return Spectrum(self.l, tuple(Eigenvalue(e.sqrt_lambda) for e in self.entries))

    def window_counts(self, windows: int) -> list[int]:
        """Entries per 2*pi window of sqrt(lambda)*l."""
        counts = [0] * windows
        for e in self.entries:
            w = int(e.sqrt_lambda * self.l // TWO_PI)
            if 0 <= w < windows:
                counts[w] += 1
        return counts

    # file formats
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "lambda", "sqrt_lambda", "branch_kind", "branch_i", "window_k"])
        for idx, e in enumerate(self.entries):
            b = e.branch
            w.writerow([idx, repr(e.lam), repr(e.sqrt_lambda),
                        b.kind if b else "", b.i if b else "", b.k if b else ""])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, l: float) -> "Spectrum":
        entries = []
        for row in csv.DictReader(io.StringIO(text)):
            s = row.get("sqrt_lambda")
            root = float(s) if s not in (None, "") else math.sqrt(float(row["lambda"]))
            branch = None
            if row.get("branch_kind"):
                branch = Branch(row["branch_kind"], int(row["branch_i"]), int(row["window_k"]))
            entries.append(Eigenvalue(root, branch))
        return cls(l, tuple(entries))

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "entries": [
                {"lambda": e.lam, "sqrt_lambda": e.sqrt_lambda,
                 "branch": None if e.branch is None else
                 {"kind": e.branch.kind, "i": e.branch.i, "k": e.branch.k}}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Spectrum":
        entries = []
        for d in obj["entries"]:
            root = d.get("sqrt_lambda")
            if root is None:
                root = math.sqrt(d["lambda"])
            b = d.get("branch")
            entries.append(Eigenvalue(float(root), Branch(b["kind"], b["i"], b["k"]) if b else None))
        return cls(float(obj["l"]), tuple(entries))

    def dumps(self, fmt: str = "csv") -> str:
        return self.to_csv() if fmt == "csv" else json.dumps(self.to_json(), indent=1)


@dataclass(frozen=True)
class NoiseModel:
    amplitude: float = 0.0
    decay: str = "const"  # "const" or "1/k"
    seed: int = 0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("noise amplitude must be >= 0")
        if self.decay not in ("const", "1/k"):
            raise ValueError(f"unknown decay mode {self.decay!r}")

    def bound(self, k: int) -> float:
        return self.amplitude if self.decay == "const" else self.amplitude / max(k, 1)


def interior_psi_roots(pair: PencilPair, tol: float = 1e-12) -> RootSet:
    """Roots of omega, i.e. the roots of psi other than +-1."""
    return isolate_roots(pair.omega, -1, 1, tol)


def theta_roots(pair: PencilPair, tol: float = 1e-12) -> RootSet:
    return isolate_roots(pair.theta, -1, 1, tol)


def _arccos_branches(roots: RootSet, l: float, windows: int, up: str, down: str, first_up: int, first_down: int):
    out = []
    for j, a in enumerate(roots.expanded()):
        theta = math.acos(max(-1.0, min(1.0, a)))
        for k in range(1, windows + 1):
            out.append(Eigenvalue((TWO_PI * (k - 1) + theta) / l, Branch(up, first_up + j, k)))
            out.append(Eigenvalue((TWO_PI * k - theta) / l, Branch(down, first_down + j, k)))
    return out


def neumann_spectrum(tree: Tree, l: float, windows: int, pair: PencilPair | None = None) -> Spectrum:
    if windows < 1:
        raise ValueError("windows must be >= 1")
    pair = pair or build_pencil(tree)
    p = tree.p
    entries = [Eigenvalue(math.pi * (k - 1) / l, Branch("N-line", 1, (k + 1) // 2)) for k in range(1, 2 * windows + 1)]
    entries += _arccos_branches(interior_psi_roots(pair), l, windows, "N-up", "N-down", 2, p)
    return Spectrum(l, tuple(entries))


def dirichlet_spectrum(tree: Tree, l: float, windows: int, pair: PencilPair | None = None) -> Spectrum:
    if windows < 1:
        raise ValueError("windows must be >= 1")
    pair = pair or build_pencil(tree)
    return Spectrum(l, tuple(_arccos_branches(theta_roots(pair), l, windows, "D-up", "D-down", 1, tree.p)))


def perturb(spec: Spectrum, noise: NoiseModel) -> Spectrum:
    """Shift every sqrt(lambda) by a seeded uniform deviate within the noise bound; labels are dropped."""
    rng = np.random.default_rng(noise.seed)
    out = []
    for e in spec.entries:
        k = e.branch.k if e.branch else int(e.sqrt_lambda * spec.l // TWO_PI) + 1
        c = noise.bound(k)
        if e.sqrt_lambda == 0.0:
            delta = rng.uniform(0.0, c) if c > 0 else 0.0
        else:
            delta = rng.uniform(-c, c) if c > 0 else 0.0
        out.append(Eigenvalue(max(0.0, e.sqrt_lambda + delta)))
    return Spectrum(spec.l, tuple(out))


def forward_spectra(tree: Tree, l: float, windows: int, noise: NoiseModel | None = None) -> tuple[Spectrum, Spectrum]:
    """Neumann and Dirichlet spectra, optionally perturbed with independent streams."""
    pair = build_pencil(tree)
    n = neumann_spectrum(tree, l, windows, pair)
    d = dirichlet_spectrum(tree, l, windows, pair)
    if noise is not None:
        n = perturb(n, noise)
        d = perturb(d, replace(noise, seed=noise.seed + 1_000_003))
    return n, d
