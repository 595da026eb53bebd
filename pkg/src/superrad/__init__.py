"""superrad: steady-state collective emission toolkit for microcavity emitter ensembles."""

from .cumulant import (
    MomentState,
    closure_triple,
    flux_decomposition,
    integrate_to_steady_state,
    moment_rhs,
    photon_flux_cumulant,
)
from .exact import (
    DensityMatrix,
    HilbertConfig,
    Liouvillian,
    build_liouvillian,
    expectation,
    g2_zero_converged,
    g2_zero_exact,
    photon_flux_exact,
    steady_state_exact,
    time_evolve,
    trace_distance,
)
from .optics import (
    OpticalParams,
    ReflectanceMap,
    cavity_dispersion,
    coherence_length,
    compute_reflectance_map,
    emission_fwhm,
    fit_coupling_scaling,
    polariton_eigenmodes,
    reflectance_spectrum,
)
from .params import (
    DriveMap,
    SystemParams,
    collective_coupling,
    omega_of_voltage,
    per_emitter_coupling,
    validate_params,
)
from .sweep import (
    PowerLawFit,
    SweepRow,
    SweepSpec,
    control_luminance,
    fit_power_law,
    run_concentration_sweep,
)
from .units import MEV_NM, TIME_UNIT_PS

__version__ = "0.1.0"

__all__ = [
    "MomentState",
    "closure_triple",
    "flux_decomposition",
    "integrate_to_steady_state",
    "moment_rhs",
    "photon_flux_cumulant",
    "DensityMatrix",
    "HilbertConfig",
    "Liouvillian",
    "build_liouvillian",
    "expectation",
    "g2_zero_converged",
    "g2_zero_exact",
    "photon_flux_exact",
    "steady_state_exact",
    "time_evolve",
    "trace_distance",
    "OpticalParams",
    "ReflectanceMap",
    "cavity_dispersion",
    "coherence_length",
    "compute_reflectance_map",
    "emission_fwhm",
    "fit_coupling_scaling",
    "polariton_eigenmodes",
    "reflectance_spectrum",
    "DriveMap",
    "SystemParams",
    "collective_coupling",
    "omega_of_voltage",
    "per_emitter_coupling",
    "validate_params",
    "PowerLawFit",
    "SweepRow",
    "SweepSpec",
    "control_luminance",
    "fit_power_law",
    "run_concentration_sweep",
    "MEV_NM",
    "TIME_UNIT_PS",
    "__version__",
]
