"""Warped-product partial Ricci flow: stationary profiles, the reduced
parabolic equation for the warping function, stability estimates, the
eigenvalue flow on Riemannian foliations and the Adams/Ferus numbers."""
from .errors import *  # noqa: F401,F403
from .topology import adams_rho, ferus_check, ferus_number
from .geometry import WarpedProductMetric, curvature_snapshot
from .stationary import Regime, critical_phi, stationary_solution
from .flow import (BoundaryData, Constant, ExponentialApproach, FlowConfig, Tabulated,
                   Trajectory, evolve)
from .bounds import divergence_rate, resonance_bound, subcritical_bound
from .eigenflow import EigenFlowState, blow_up_time, eigen_closed_form, eigen_rk4
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
