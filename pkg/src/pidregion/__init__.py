"""Stabilizing PID gain sets for polynomial and time-delay loops."""
from .errors import (ConsistencyError, DegenerateEigenvalue, DegenerateSlice, DegreeError,
                     DeltaInvalid, DomainError, Inconclusive, NotApplicable, PidRegionError,
                     PlantFileError, PoleOnAxis, SingularCancellation)
from .gamma import GammaRegion, decoupling_function, q_basis, transform_matrix
from .kp_analysis import (KpInterval, KpPlot, StabilityPeak, admissible_intervals,
                          count_singular_frequencies, kp_plot, merge_intervals, required_Z,
                          stability_peaks)
from .plant import PlantModel, QuasiPlant
from .polynomial import RealPoly, RootCensus, root_census, roots
from .region import Region3D, build_region
from .robust import PlantFamily, RobustPolygon, robust_intervals, robust_slice
from .slicing import (BoundaryLine, SingularFrequency, Slice, SliceFace, boundary_line,
                      compute_slice, singular_frequencies, transition_signs, verify_point)
from .delay import (FrequencyClass, QuasiCheck, amp_phase, compute_delay_slice,
                    delay_admissible_intervals, delay_required_Z, delay_singular_frequencies,
                    quasi_stability_check, relevant_frequency_range)
from .io import export_region, parse_plant_file

__all__ = [
    "BoundaryLine", "ConsistencyError", "DegenerateEigenvalue", "DegenerateSlice",
    "DegreeError", "DeltaInvalid", "DomainError", "FrequencyClass", "GammaRegion",
    "Inconclusive", "KpInterval", "KpPlot", "NotApplicable", "PidRegionError", "PlantFamily",
    "PlantFileError", "PlantModel", "PoleOnAxis", "QuasiCheck", "QuasiPlant", "RealPoly",
    "Region3D", "RobustPolygon", "RootCensus", "SingularCancellation", "SingularFrequency",
    "Slice", "SliceFace", "StabilityPeak", "admissible_intervals", "amp_phase",
    "boundary_line", "build_region", "compute_delay_slice", "compute_slice",
    "count_singular_frequencies", "decoupling_function", "delay_admissible_intervals",
    "delay_required_Z", "delay_singular_frequencies", "export_region", "kp_plot",
    "merge_intervals", "parse_plant_file", "q_basis", "quasi_stability_check",
    "relevant_frequency_range", "required_Z", "robust_intervals", "robust_slice",
    "root_census", "roots", "singular_frequencies", "stability_peaks", "transform_matrix",
    "transition_signs", "verify_point",
]
