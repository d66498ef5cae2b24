"""Symmetric f-divergences, marginal perspective costs and their metric properties.

Modules
-------
entropy
    Admissible entropy families, perspectives, reverses, conjugates and
    discrete ``f``-divergences.
power_means
    Two-point power means ``M_p(r, t)``.
marginal_perspective
    ``H_F(r, t)``: closed forms and a numerical oracle.
divergence_dynamics
    The symmetrisation maps ``T_a`` on sampled entropies.
metric_check
    Triangle-inequality audits and monotonicity certificates.
cone_cost
    Marginal perspective costs with transport, cone metrics.
entropy_transport
    Discrete Optimal Entropy-Transport.
"""

__version__ = "0.1.0"

from .entropy import (  # noqa: F401
    ChiAlpha,
    DiscreteMeasure,
    DoublePower,
    Indicator,
    Matusita,
    PowerLike,
    PowerLog,
    Tabulated,
    TotalVariationScaled,
    f_divergence,
    make_entropy,
    parse_entropy,
)
from .marginal_perspective import MarginalPerspective, h_closed, h_oracle  # noqa: F401
from .power_means import power_mean  # noqa: F401
