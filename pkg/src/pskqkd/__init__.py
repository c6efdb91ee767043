"""Key-rate analysis for N-letter phase-shift-keyed coherent-state QKD.

Lossy, noiseless channel with a beam-splitting eavesdropper. Covers the
Alice-Bob mutual information for heterodyne detection, Eve's Holevo bounds
for direct and reverse reconciliation, postselection, amplitude
optimization, and a Monte Carlo simulation of the protocol chain.
"""

from .states import (
    ProtocolParams,
    SplitStates,
    alphabet_state,
    beam_split,
    coherent_overlap,
    decode,
)
from .information import (
    PosteriorDistribution,
    iab_pointwise,
    iab_total,
    likelihood,
    marginal,
    posterior,
    shannon_entropy,
)
from .eve import (
    EveConditionedMatrix,
    SpectralWeights,
    eve_conditioned_matrix,
    eve_overlap,
    iae_direct,
    ibe_pointwise,
    spectral_weights,
    von_neumann_entropy,
)
from .quadrature import QuadratureGrid, integrate_phase_space
from .keyrate import (
    KeyRateResult,
    PostselectionBoundary,
    keyrate,
    keyrate_direct,
    keyrate_reverse,
    psa_boundary,
    psa_masked_rate,
)
from .optimize import (
    BracketError,
    CrossingRecord,
    SweepPoint,
    find_crossing,
    golden_section_max,
    locate_bracket,
    optimize_amplitude,
    sweep_eta,
)
from .montecarlo import (
    SimulationConfig,
    SimulationReport,
    empirical_confusion_entropy,
    simulate,
)
from .errors import NumericalError

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "CrossingRecord",
    "EveConditionedMatrix",
    "KeyRateResult",
    "NumericalError",
    "PosteriorDistribution",
    "PostselectionBoundary",
    "ProtocolParams",
    "QuadratureGrid",
    "SimulationConfig",
    "SimulationReport",
    "SpectralWeights",
    "SplitStates",
    "SweepPoint",
    "alphabet_state",
    "beam_split",
    "coherent_overlap",
    "decode",
    "empirical_confusion_entropy",
    "eve_conditioned_matrix",
    "eve_overlap",
    "find_crossing",
    "golden_section_max",
    "iab_pointwise",
    "iab_total",
    "iae_direct",
    "ibe_pointwise",
    "integrate_phase_space",
    "keyrate",
    "keyrate_direct",
    "keyrate_reverse",
    "locate_bracket",
    "likelihood",
    "marginal",
    "optimize_amplitude",
    "posterior",
    "psa_boundary",
    "psa_masked_rate",
    "shannon_entropy",
    "simulate",
    "spectral_weights",
    "sweep_eta",
    "von_neumann_entropy",
]
