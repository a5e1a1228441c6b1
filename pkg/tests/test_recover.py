import math

import numpy as np
import pytest

from qcaterpillar.cfrac import RealRatio, cf_build
from qcaterpillar.errors import CountMismatch, InconsistentWindows, MirrorMismatch, UnexpectedLineCluster
from qcaterpillar.poly import RootSet
from qcaterpillar.recover import (Cluster, ClusterSet, RecoverOptions, assemble_ratio, fold_and_cluster,
                                  recover, roots_from_clusters, symmetrize)
from qcaterpillar.spectra import Eigenvalue, NoiseModel, Spectrum, forward_spectra
from qcaterpillar.tree import CaterpillarShape, shape_to_tree, shapes_up_to

S = CaterpillarShape.of
EXAMPLE = S(5, 3, 2, 4)


def spectra(shape, windows=50, noise=None, l=1.0):
    return forward_spectra(shape_to_tree(shape), l, windows, noise)


def test_p3_neumann_clusters():
    n, _ = spectra(S(2), windows=10)
    cs = fold_and_cluster(n, 1.0, 10, 0.05)
    assert cs.centers == pytest.approx([0, math.pi / 2, math.pi, 3 * math.pi / 2], abs=1e-12)
    assert [c.weight for c in cs.clusters] == [1, 1, 1, 1]


def test_p2_dirichlet_clusters():
    _, d = spectra(S(), windows=10)
    cs = fold_and_cluster(d, 1.0, 10, 0.05)
    assert cs.centers == pytest.approx([math.pi / 2, 3 * math.pi / 2])
    assert [c.weight for c in cs.clusters] == [1, 1]


def test_p3_noisy_centres():
    n, _ = spectra(S(2), noise=NoiseModel(0.1, "1/k", 2))
    cs = fold_and_cluster(n, 1.0, 50, 0.05)
    want = [0, math.pi / 2, math.pi, 3 * math.pi / 2]
    assert len(cs.centers) == 4
    for c, w in zip(sorted(cs.centers), want):
        assert abs((c - w + math.pi) % (2 * math.pi) - math.pi) <= 0.02


def test_weights_count_multiplicity():
    # star with centre degree 6: omega is a multiple of z^5, so 0 is a 5-fold root
    n, _ = spectra(S(6))
    cs = fold_and_cluster(n, 1.0, 50, 0.05)
    weights = {round(c.center % (2 * math.pi), 6) % round(2 * math.pi, 6): c.weight for c in cs.clusters}
    assert weights == {0.0: 1, round(math.pi / 2, 6): 5, round(math.pi, 6): 1, round(3 * math.pi / 2, 6): 5}
    assert cs.total_weight == 2 * 7 - 2


def test_inconsistent_windows():
    # a cluster present in only some windows
    entries = [Eigenvalue(2 * math.pi * k + 1.0) for k in range(50)]
    entries += [Eigenvalue(2 * math.pi * k + 2.0) for k in range(0, 50, 2)]
    entries += [Eigenvalue(2 * math.pi * k + 2.0) for k in range(0, 50, 2)]
    with pytest.raises(InconsistentWindows):
        fold_and_cluster(Spectrum(1.0, tuple(entries)), 1.0, 50, 0.05)


def test_roots_p3():
    n, d = spectra(S(2), windows=10)
    est = roots_from_clusters(fold_and_cluster(n, 1.0, 10), fold_and_cluster(d, 1.0, 10))
    assert est.alphas.expanded() == pytest.approx([-1, 0, 1], abs=1e-12)
    assert est.betas.expanded() == pytest.approx([-2 ** -0.5, 2 ** -0.5], abs=1e-12)
    assert est.inferred_p == 3


def test_roots_example():
    n, d = spectra(EXAMPLE)
    est = roots_from_clusters(fold_and_cluster(n, 1.0), fold_and_cluster(d, 1.0))
    assert est.alphas.total == 12 and est.betas.total == 11 and est.inferred_p == 12


def _cs(*centers_weights):
    return ClusterSet(tuple(Cluster(c, w, 0.0, (), 10) for c, w in centers_weights), 50, 26)


def test_unexpected_line_cluster():
    neu = _cs((0.0, 1), (math.pi, 1))
    with pytest.raises(UnexpectedLineCluster):
        roots_from_clusters(neu, _cs((0.0, 1)))


def test_mirror_mismatch():
    neu = _cs((0.0, 1), (1.0, 1), (math.pi, 1))
    with pytest.raises(MirrorMismatch):
        roots_from_clusters(neu, _cs((1.2, 1), (2 * math.pi - 1.2, 1)))


def test_count_mismatch():
    neu = _cs((0.0, 1), (math.pi, 1))
    with pytest.raises(CountMismatch):
        roots_from_clusters(neu, _cs((1.2, 1), (2 * math.pi - 1.2, 1), (1.5, 1), (2 * math.pi - 1.5, 1)))
    with pytest.raises(CountMismatch):
        roots_from_clusters(_cs((0.0, 1)), _cs((1.2, 1), (2 * math.pi - 1.2, 1)))


def _ratio_close(r: RealRatio, num, den, tol=1e-9):
    k = num[-1] / r.num[-1]
    return np.allclose(np.array(r.num) * k, num, atol=tol) and np.allclose(np.array(r.den) * k, den, atol=tol)


def test_assemble_examples():
    r, canc = assemble_ratio(RootSet(((-1.0, 1), (0.0, 1), (1.0, 1))), RootSet(((-2 ** -0.5, 1), (2 ** -0.5, 1))))
    assert not canc
    assert r.num == pytest.approx((0, 1, 0, -1)) and r.den == pytest.approx((-0.5, 0, 1))
    assert _ratio_close(r, [0, 2, 0, -2], [-1, 0, 2])
    r, _ = assemble_ratio(RootSet(((-1.0, 1), (1.0, 1))), RootSet(((0.0, 1),)))
    assert r.num == pytest.approx((1, 0, -1)) and r.den == pytest.approx((0, 1))


def test_assemble_example():
    n, d = spectra(EXAMPLE)
    est = roots_from_clusters(fold_and_cluster(n, 1.0), fold_and_cluster(d, 1.0))
    r, canc = assemble_ratio(est.alphas, est.betas, 1e-8)
    assert len(canc) == 5
    assert len(r.num) == 8 and len(r.den) == 7
    f = cf_build(EXAMPLE)
    assert _ratio_close(r, [float(c) for c in f.num.coeffs], [float(c) for c in f.den.coeffs])


def test_symmetrize():
    assert symmetrize([0.5, -0.51, 0.01]) == pytest.approx([-0.505, 0.0, 0.505])


def test_recover_examples():
    for shape in (EXAMPLE, S()):
        n, d = spectra(shape)
        rep = recover(n.unlabeled(), d.unlabeled(), 1.0)
        assert rep.ok and rep.shape == shape
        assert rep.inferred_p == shape.vertex_count == shape_to_tree(rep.shape).p


def test_recover_other_edge_length():
    n, d = spectra(S(3, 2), l=2.5)
    rep = recover(n, d, 2.5)
    assert rep.ok and rep.shape == S(3, 2)


def test_inferred_p_noiseless():
    for s in shapes_up_to(8):
        n, d = spectra(s)
        rep = recover(n, d, 1.0)
        assert rep.inferred_p == s.vertex_count


def test_success_ratio_matches_build():
    for s in shapes_up_to(7):
        n, d = spectra(s)
        rep = recover(n, d, 1.0)
        assert rep.ok
        f = cf_build(rep.shape)
        assert _ratio_close(rep.ratio, [float(c) for c in f.num.coeffs], [float(c) for c in f.den.coeffs], 1e-7)


def test_adversarial_constant_noise():
    for seed in range(10):
        n, d = spectra(EXAMPLE, windows=20, noise=NoiseModel(0.5, "const", seed))
        rep = recover(n, d, 1.0, RecoverOptions(windows=20))
        assert (not rep.ok and rep.reason) or rep.shape == EXAMPLE


def test_failures_are_reported_not_raised():
    n, d = spectra(EXAMPLE)
    rep = recover(n, Spectrum(1.0, ()), 1.0)
    assert rep.status == "failure" and rep.reason
    rep = recover(d, n, 1.0)
    assert rep.status == "failure"


def test_report_json():
    n, d = spectra(S(4, 2))
    doc = recover(n, d, 1.0).to_json()
    assert doc["status"] == "success"
    assert doc["interior_degrees"] == [4, 2]
    assert doc["trace"] and doc["stage_residuals"] is not None
    assert doc["metadata"]["options"]["windows"] == 50
    assert "no recovery guarantee" in doc["metadata"]["note"]


def test_merged_roots_are_noted():
    n, d = spectra(S(6))
    rep = recover(n, d, 1.0)
    assert rep.ok and any("merged" in msg for msg in rep.diagnostics)
