import os
import subprocess
import sys
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qcaterpillar import _kernels_py, kernels

try:
    from qcaterpillar import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = [_kernels_py] + ([_compiled] if _compiled else [])

square = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=n, max_size=n))


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(rows=square)
@settings(max_examples=80, deadline=None)
def test_bareiss_matches_sympy(impl, rows):
    assert impl.bareiss_det([list(r) for r in rows]) == sympy.Matrix(rows).det()


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_bareiss_needs_pivoting(impl):
    assert impl.bareiss_det([[0, 1], [1, 0]]) == -1
    assert impl.bareiss_det([[0, 0], [1, 0]]) == 0
    assert impl.bareiss_det([[10 ** 30, 1], [1, 10 ** 30]]) == 10 ** 60 - 1


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=12), st.integers(-40, 40), st.integers(1, 40))
@settings(max_examples=80, deadline=None)
def test_horner_homogeneous(impl, coeffs, num, den):
    n = len(coeffs) - 1
    want = sum(Fraction(c) * Fraction(num, den) ** k for k, c in enumerate(coeffs)) * den ** n
    assert impl.horner_eval(coeffs, num, den) == want


@given(st.lists(st.lists(st.integers(-9, 9), min_size=1, max_size=6), min_size=1, max_size=6),
       st.integers(-20, 20), st.integers(1, 9))
@settings(max_examples=60, deadline=None)
def test_backends_agree_on_variations(chain, num, den):
    for impl in BACKENDS[1:]:
        assert impl.sign_variations(chain, num, den) == _kernels_py.sign_variations(chain, num, den)


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    env = dict(os.environ, QCAT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import qcaterpillar.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(_compiled is None, reason="compiled kernels not built")
def test_compiled_backend_is_default():
    if os.environ.get("QCAT_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "cython"
