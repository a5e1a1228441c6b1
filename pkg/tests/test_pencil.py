import pytest

from qcaterpillar.cfrac import cf_build
from qcaterpillar.errors import RootDegreeNotOne
from qcaterpillar.pencil import build_pencil, psi_theta_ratio
from qcaterpillar.poly import RationalFunction, RationalPoly
from qcaterpillar.tree import CaterpillarShape, Tree, random_tree, shape_to_tree, shapes_up_to, tree_to_shape

from conftest import EXAMPLE_PSI, EXAMPLE_THETA, leaf_rooted

P = RationalPoly


def test_p2():
    pair = build_pencil(shape_to_tree(CaterpillarShape()))
    assert pair.psi == P((-1, 0, 1)) and pair.theta == P((0, -1)) and pair.omega == P((-1,))


def test_p3():
    pair = build_pencil(shape_to_tree(CaterpillarShape.of(2)))
    assert pair.psi == P((0, 2, 0, -2)) and pair.theta == P((-1, 0, 2)) and pair.omega == P((0, 2))


def test_twelve_vertex():
    tree = shape_to_tree(CaterpillarShape.of(5, 3, 2, 4))
    pair = build_pencil(tree)
    assert pair.psi.degree == 12 and pair.theta.degree == 11 and pair.omega.degree == 10
    assert pair.psi.lc == 120
    assert psi_theta_ratio(tree, pair) == RationalFunction(EXAMPLE_PSI, EXAMPLE_THETA)


def test_star_ratio():
    f = psi_theta_ratio(Tree(4, ((0, 1), (1, 2), (1, 3))))
    assert f.num == P((0, 3, 0, -3)) and f.den == P((-2, 0, 3))


def test_root_degree():
    with pytest.raises(RootDegreeNotOne):
        build_pencil(Tree(3, ((0, 1), (0, 2))))


def test_omega_identity_and_parity():
    for seed in range(30):
        t = leaf_rooted(random_tree(3 + seed % 15, seed))
        pair = build_pencil(t)
        p = t.p
        assert pair.omega * P((1, 0, -1)) == pair.psi
        assert pair.psi.compose_neg() == pair.psi.scale((-1) ** p)
        assert pair.theta.compose_neg() == pair.theta.scale((-1) ** (p - 1))
        assert (pair.psi.degree, pair.theta.degree, pair.omega.degree) == (p, p - 1, p - 2)


def test_ratio_normalization():
    for s in shapes_up_to(9):
        f = psi_theta_ratio(shape_to_tree(s))
        assert f.leading_ratio == -1
        assert f == cf_build(tree_to_shape(shape_to_tree(s)))


def test_to_json_keys():
    doc = build_pencil(shape_to_tree(CaterpillarShape.of(3))).to_json()
    assert set(doc) >= {"psi", "theta", "omega"}
