"""Local limits of conditioned Galton-Watson trees.

Trees, offspring laws and their tilts, exact laws, samplers, the trees
coding L_A, and convergence diagnostics towards Kesten's tree.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .events import EventSpec, parse_event, parse_family
from .offspring import NotGeneric, OffspringDistribution, TiltedFamily, critical_theta
from .trees import (DegreeSet, NATURALS, POSITIVE, LEAVES, RestrictedTree, Tree,
                    as_degree_set, decode, encode, graft, mrca, restrict)
