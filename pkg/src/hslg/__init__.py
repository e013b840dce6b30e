"""Half-space log-gamma polymer simulation library.

Subpackages and modules: specfun (digamma family and model constants), dist
(base distributions and quadrature/Fourier oracles), polymer (disorder and
log-space partition functions), ensemble (multipath partition functions and
the line ensemble), gibbs (Gibbs measures, heat-bath and monotone coupling,
bottom-free laws), walks (bridges, paired walks, conditioned statistics),
harness (campaigns and the hslg CLI).
"""

__version__ = "0.1.0"

from . import _kernels, dist, ensemble, gibbs, harness, polymer, specfun, walks

__all__ = [
    "__version__", "_kernels", "dist", "ensemble", "gibbs", "harness",
    "polymer", "specfun", "walks",
]
