""" Weak epsilon-net constructions and their exact verifier """

from .baseline import quadratic_net, quadratic_size_bound, trivial_net
from .geometry import Point, PointSet, ensure_general_position
from .improved import Instance, RecursionTrace, RestrictionGraph, build_weak_net, improved_net
from .net import Net, Provenance
from .params import ImprovedConfig, NetConstants
from .verifier import VerifyReport, is_weak_eps_net
