"""Bounds on one trace-form entropy given the value of another.

For trace-form entropies ``H_f(p) = sum_i f(p_i)`` the extremes of ``H_f`` at
fixed ``H_g`` are attained on two one-parameter families of distributions
whenever ``f'`` is a strictly convex or strictly concave function of ``g'``.
"""

__version__ = "0.1.0"

from .exceptions import *  # noqa: E402,F401,F403
from .measures import (  # noqa: E402
    BUILTIN_SPECS, EntropyMeasure, eval_display, eval_sum, make_measure, undo_display,
)
from .simplex import ProbVec, make_probvec, pure, uniform  # noqa: E402
from .spectra import (  # noqa: E402
    density_entropy, density_spectrum, eigenvalues, eigenvalues_batch, entanglement,
    schmidt_probs,
)
from .extremal import (  # noqa: E402
    BoundCurve, Bounds, ConditionReport, ExtremalFamily, Form, Verdict, bound_curve,
    bounds_at, classify_condition, family_Hg, hg_range, invert_Hg, realize,
)
from .sampling import (  # noqa: E402
    Ensemble, SampleConfig, ViolationReport, sample_bipartite, sample_density,
    sample_simplex, scan_violations,
)
from .oracle import Structure, grid_extrema, structural_match  # noqa: E402
from .estimators import EntropyBounds, TraceEntropy  # noqa: E402
