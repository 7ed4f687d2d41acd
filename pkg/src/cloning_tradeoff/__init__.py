"""Universal 1 -> 2 cloning as a minimal-disturbance measurement on a qubit.

Submodules:

- ``qmath``: states, partial traces, Haar sampling, sphere/SU(2) quadrature
- ``cloner``: the asymmetric cloning machine, Bell decomposition, U-NOT
- ``povm``: covariant, tetrahedron, ξ-family and Bell measurements
- ``tradeoff``: estimation vs output fidelity for both schemes
- ``channels``: lossy-channel and erasure-memory strategies
- ``cli``: the ``cloning-tradeoff`` command
"""

from .cloner import ClonerParams, apply_cloner, params_from_mu
from .montecarlo import McEstimate
from .povm import XiFamily
from .qmath import DensityMatrix, PureState, SphereAngles
from .tradeoff import TradeoffPoint, banaszek_f

__all__ = [
    "ClonerParams",
    "DensityMatrix",
    "McEstimate",
    "PureState",
    "SphereAngles",
    "TradeoffPoint",
    "XiFamily",
    "apply_cloner",
    "banaszek_f",
    "params_from_mu",
]
