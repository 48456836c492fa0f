"""
circloyd models

Enums, validated parameters and analysis records.
"""

from .circle import (
    # Enums
    DensityFamily,
    CentroidMode,
    Verdict,
    RootStatus,
    SalaStatus,

    # Parameters
    KAPPA_MAX,
    VonMisesParams,
    DensitySpec,
    SalaConfig,

    # Records
    CirculantJacobian,
    StabilityReport,
    CriticalKappaResult,
    ScanRecord,
    LOG_FLOOR,
    LyapunovReport,
    TraceRow,
    SweepRecord,
)

__all__ = [
    "DensityFamily", "CentroidMode", "Verdict", "RootStatus", "SalaStatus",
    "KAPPA_MAX", "VonMisesParams", "DensitySpec", "SalaConfig",
    "CirculantJacobian", "StabilityReport", "CriticalKappaResult", "ScanRecord",
    "LOG_FLOOR", "LyapunovReport", "TraceRow", "SweepRecord",
]
