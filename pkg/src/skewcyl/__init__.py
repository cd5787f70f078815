"""Numerical laboratory for a nonuniformizable Stein skew cylinder.

Modules: potential (log-singularity series u), interpolant (step psi),
brset (obstacle set K), levi (pseudoconvexity certification), fiber (charts
and log monodromy), schwarzian, rigidity (obstruction certificate), cli.
"""

__version__ = "0.1.0"
