"""Recover the shape of a caterpillar quantum tree from its Neumann and Dirichlet spectra."""
from .cfrac import (ExpansionTrace, RealRatio, StageRecord, cf_build, cf_expand_exact, cf_expand_measure,
                    cf_expand_rounded, diophantine_solution)
from .errors import CaterpillarError
from .kernels import BACKEND
from .pencil import PencilPair, build_pencil, psi_theta_ratio
from .poly import RationalFunction, RationalPoly, RootSet, isolate_roots
from .recover import ClusterSet, RecoverOptions, RecoveryReport, fold_and_cluster, recover, roots_from_clusters
from .spectra import NoiseModel, Spectrum, dirichlet_spectrum, forward_spectra, neumann_spectrum, perturb
from .tree import CaterpillarShape, Tree, enumerate_shapes, random_shape, shape_to_tree, tree_to_shape

__version__ = "0.1.0"
