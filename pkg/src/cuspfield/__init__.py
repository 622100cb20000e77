"""Local elastic fields of surface waves near cuspidal ridges and gorges.

Layers, from material data to desk-scale verification:

* material / rayleigh: half-space wave speeds and the travelling surface mode
* geometry: cusp shapes, arclength, curvature, natural and blow-up coordinates
* outer: first-order curvature forcing, mode projections, wavelength shift
* horn: reduced 1-d model of the closing sliver, tip cutoffs, branch scalings
* gorge: crack-tip fields with the finite-opening correction
* fem: plane-strain solver and structured cusp meshes
* experiments: sweeps that reproduce the published scaling exponents
"""

from .fitting import ScalingFit, fit_loglog
from .geometry import CuspShape, InnerScales
from .material import ElasticModuli, WaveSpeeds, decay_rates, kolosov, wave_speeds
from .outer import ProjectionConstants, WavelengthCorrection, projection_constants, solve_m1
from .rayleigh import RayleighMode

__version__ = "0.1.0"

__all__ = [
    "CuspShape",
    "ElasticModuli",
    "InnerScales",
    "ProjectionConstants",
    "RayleighMode",
    "ScalingFit",
    "WaveSpeeds",
    "WavelengthCorrection",
    "decay_rates",
    "fit_loglog",
    "kolosov",
    "projection_constants",
    "solve_m1",
    "wave_speeds",
    "__version__",
]
