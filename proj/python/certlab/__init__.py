"""Instance-optimal quantum state certification lab."""

from ._certlab import (  # noqa: F401
    CertlabError,
    DensityMatrix,
    analyze,
    certify,
    chi2_kernel_exact,
    diagonal_density,
    fidelity,
    lower_bucketing_summary,
    quantum_chi2,
    quantum_paninski,
    sample_haar,
    schatten,
    trace_distance,
    upper_functional,
    validate_density,
    verify_all,
    __version__,
)

__all__ = [
    "CertlabError",
    "DensityMatrix",
    "analyze",
    "certify",
    "chi2_kernel_exact",
    "diagonal_density",
    "fidelity",
    "lower_bucketing_summary",
    "quantum_chi2",
    "quantum_paninski",
    "sample_haar",
    "schatten",
    "trace_distance",
    "upper_functional",
    "validate_density",
    "verify_all",
    "__version__",
]
