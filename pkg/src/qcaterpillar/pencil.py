"""Characteristic polynomials of the normalized-Laplacian pencil of a rooted tree."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotDivisible, RootDegreeNotOne
from .poly import RationalFunction, RationalPoly, det_pencil, reduce_fraction
from .tree import Tree

ONE_MINUS_Z2 = RationalPoly((1, 0, -1))


@dataclass(frozen=True)
class PencilPair:
    """psi = det(-zD + A), theta = det(-zD1 + A1), omega = psi / (1 - z^2).

    D1 keeps the degrees from the whole tree, not from the subtree.
    """

    psi: RationalPoly
    theta: RationalPoly
    omega: RationalPoly

    def to_json(self) -> dict:
        return {"psi": self.psi.to_json(), "theta": self.theta.to_json(), "omega": self.omega.to_json()}


def pencil_matrices(tree: Tree) -> tuple[list[list[int]], list[int]]:
    return tree.adjacency_matrix(), tree.degrees


def build_pencil(tree: Tree) -> PencilPair:
    a, d = pencil_matrices(tree)
    if d[0] != 1:
        raise RootDegreeNotOne(f"root has degree {d[0]}")
    psi = det_pencil(a, d)
    theta = det_pencil([row[1:] for row in a[1:]], d[1:])
    omega, rem = divmod(psi, ONE_MINUS_Z2)
    if rem:
        raise NotDivisible(f"psi = {psi} is not divisible by 1 - z^2")
    return PencilPair(psi, theta, omega)


def psi_theta_ratio(tree: Tree, pair: PencilPair | None = None) -> RationalFunction:
    """Reduced psi/theta scaled so that lim psi / (z theta) = -1."""
    if pair is None:
        pair = build_pencil(tree)
    ratio = reduce_fraction(pair.psi, pair.theta)
    c = ratio.leading_ratio
    if c != -1:
        ratio = RationalFunction(ratio.num.scale(Fraction(-1) / c), ratio.den, reduced=True)
    return ratio
