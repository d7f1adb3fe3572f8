"""Horocyclic Radon transform on homogeneous trees and its unitarization."""

from .cfunction import c_function, multiplier, plancherel_weight
from .errors import (FormatError, HoroRadonError, InsufficientCylinderDepth,
                     ParameterMismatch, ZeroInput)
from .horocycle import HoroFunction, dual_radon, pihat_action, rebase
from .ranges import (ConditionReport, check_flat, check_range_cc, check_sharp,
                     reducibility_witness)
from .transforms import (FreqFunction, VertexFunction, abel, fourier_z, helgason_fourier,
                         hf_invert, lambda_op, phi_v, pi_action, plancherel_norm,
                         q_invert, q_transform, radon)
from .tree import (IDENTITY, ROOT, CylindricalFunction, Isometry, RootedPerm, Translate,
                   Tree)

__version__ = "0.1.0"

__all__ = [
    "ROOT", "IDENTITY", "Tree", "CylindricalFunction", "Isometry", "Translate", "RootedPerm",
    "HoroFunction", "rebase", "pihat_action", "dual_radon",
    "VertexFunction", "FreqFunction", "radon", "abel", "fourier_z", "helgason_fourier",
    "phi_v", "lambda_op", "q_transform", "pi_action", "hf_invert", "q_invert",
    "plancherel_norm", "c_function", "plancherel_weight", "multiplier",
    "ConditionReport", "check_range_cc", "check_flat", "check_sharp", "reducibility_witness",
    "HoroRadonError", "InsufficientCylinderDepth", "ZeroInput", "FormatError",
    "ParameterMismatch",
]
