"""Entropic quantum correlations of two-qubit states.

Discord (both directions and two-way), measurement-induced disturbance (MID),
its ameliorated variant (AMID) and the classical mutual information, together
with searches for the states that maximize discord and AMID at fixed von
Neumann entropy.
"""
from .errors import (
    ConstraintInfeasible,
    InternalConsistencyError,
    InvalidState,
    NonHermitian,
    NotXState,
    OutOfRange,
    QCorrError,
)
from .measures import (
    CorrelationReport,
    LocalMeasurement,
    MeasurementParams,
    amid,
    amid_x_candidates,
    classical_mutual_information,
    discord_left,
    discord_right,
    discord_two_way,
    full_report,
    mid,
    mutual_information,
)
from .states import (
    DensityMatrix,
    beta_family,
    bloch_normal_form,
    delta_family,
    load_state,
    p_family,
    r_family,
    random_state,
    random_x_state,
    save_state,
    werner,
    x_state,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintInfeasible", "InternalConsistencyError", "InvalidState", "NonHermitian",
    "NotXState", "OutOfRange", "QCorrError",
    "CorrelationReport", "LocalMeasurement", "MeasurementParams", "amid", "amid_x_candidates",
    "classical_mutual_information", "discord_left", "discord_right", "discord_two_way",
    "full_report", "mid", "mutual_information",
    "DensityMatrix", "beta_family", "bloch_normal_form", "delta_family", "load_state",
    "p_family", "r_family", "random_state", "random_x_state", "save_state", "werner", "x_state",
    "__version__",
]
