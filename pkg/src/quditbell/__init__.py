"""Bipartite qudit entanglement and Bell-inequality toolkit."""
from .matcore import hermitian_eigs, kron, partial_trace, partial_transpose
from .states import DensityMatrix, SimplexState
from .nonlocality import MeasurementSettings, analytic_settings, cglmp_Id
from .optimizer import NelderMeadConfig, maximize_cglmp
from .estimators import BellOptimizer, EntanglementDetector

__version__ = "0.1.0"
