"""Narcowich-Wigner spectra of phase-space functions on a finite grid."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AliasingError,
    ConfigError,
    DimensionError,
    DomainTagError,
    GridMismatchError,
    InconsistencyError,
    NormalizationError,
    NWSpecError,
    ResolutionError,
)
from .gaussian import GaussianSpec, gaussian_eta0, gaussian_family, squeezed_gaussian  # noqa: E402
from .husimi import (  # noqa: E402
    BargmannSample,
    bargmann_form_ratio,
    bargmann_husimi_identity_check,
    bargmann_transform,
    coherent_wigner,
    find_husimi_zeros,
    gaussian_smoothing,
    husimi,
)
from .phase_space import (  # noqa: E402
    Domain,
    GridSpec,
    PhaseSpaceFunction,
    PhaseSpacePoint,
    convolve,
    dump_csv,
    inverse_symplectic_fourier,
    load_csv,
    symplectic_form,
    symplectic_fourier,
)
from .spectrum import (  # noqa: E402
    KlmMatrix,
    ProbeSet,
    SpectrumEstimate,
    Verdict,
    convolution_positivity_check,
    estimate_spectrum,
    klm_matrix,
    klm_refute,
    operator_positivity_test,
)
from .states import (  # noqa: E402
    DensityKernel,
    WaveFunction,
    cat_state,
    coherent_state,
    density,
    fock_state,
    inverse_weyl,
    mix,
    moyal_overlap,
    purity,
    purity_bound,
    wigner_of_density,
    wigner_transform,
)
