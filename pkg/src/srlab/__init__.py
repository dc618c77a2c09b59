"""Mean-field Dicke superradiance: coherence, intensity and speed limits.

Modules:
    meanfield     closed-form single-atom dynamics, intensity, l1-coherence
    qsl           quantum speed limit of the effective unitary evolution
    dicke_oracle  exact collective master equation on the Dicke ladder
    quadrature    adaptive Simpson integration used for cross-checks
    cli           command-line front end (``python -m srlab``)
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    InvalidMeasurementError,
    InvariantViolationError,
    NumericalConsistencyError,
    SrlabError,
    UndefinedBoundError,
    ValidationError,
)
from .meanfield import (  # noqa: E402
    ModelParams,
    coherence_from_intensity,
    excitation_probability,
    intensity,
    l1_coherence,
    n_particle_coherence,
    nonlinear_hamiltonian,
    single_atom_density,
    single_atom_state,
    time_delay,
)
from .qsl import (  # noqa: E402
    QslInputs,
    QslReport,
    avg_energy_variance,
    bures_angle,
    instantaneous_variance,
    qsl_ratio_from_coherence,
    qsl_time,
)
