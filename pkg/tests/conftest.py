import pytest

from qcaterpillar.poly import RationalFunction, RationalPoly
from qcaterpillar.tree import CaterpillarShape

EXAMPLE = CaterpillarShape.of(5, 3, 2, 4)
EXAMPLE_PSI = RationalPoly((0, 40, 0, -189, 0, 269, 0, -120))
EXAMPLE_THETA = RationalPoly((-30, 0, 156, 0, -245, 0, 120))


@pytest.fixture
def example_ratio():
    return RationalFunction(EXAMPLE_PSI, EXAMPLE_THETA)


def leaf_rooted(tree):
    """Relabel so that vertex 0 is a leaf (build_pencil needs a pendant root)."""
    from qcaterpillar.tree import Tree

    if tree.p < 2 or tree.degrees[0] == 1:
        return tree
    leaf = next(v for v, d in enumerate(tree.degrees) if d == 1)
    swap = {0: leaf, leaf: 0}
    return Tree(tree.p, tuple((swap.get(a, a), swap.get(b, b)) for a, b in tree.edges))


_ACCEPTANCE: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status, dur = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{name}: {status} ({dur:.1f}s)")
