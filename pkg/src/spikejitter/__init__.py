"""spikejitter: conditional-inference resampling for neural spike trains.

The package generates synthetic point-process data, produces surrogate
ensembles under explicit conditional null hypotheses (trial shuffle,
interval / pattern / tilted jitter), computes test statistics, and turns
surrogate ensembles into Monte Carlo p-values and acceptance bands.
Everything is deterministic given a master seed and independent of the
number of workers used.
"""

from .core import (
    IntervalCounts,
    PatternEncoding,
    SpikeTrain,
    TrialSet,
    WindowPartition,
    interval_counts,
    pattern_decompose,
    pattern_encode,
)
from .resample import SurrogateSpec, surrogate_trialset
from .infer import SurrogateEnsemble, BandSet, build_ensemble, mc_pvalue

__version__ = "0.1.0"

__all__ = [
    "SpikeTrain",
    "TrialSet",
    "WindowPartition",
    "IntervalCounts",
    "PatternEncoding",
    "interval_counts",
    "pattern_decompose",
    "pattern_encode",
    "SurrogateSpec",
    "surrogate_trialset",
    "SurrogateEnsemble",
    "BandSet",
    "build_ensemble",
    "mc_pvalue",
    "__version__",
]
