"""Exact fluctuation-theory quantities for integer-lattice random walks.

Thin wrapper over the compiled extension module: step-distribution builders,
Wiener-Hopf ladder data, killed Green functions, two-sided exit laws,
Monte Carlo estimators and asymptotic trend reports.
"""

from _fluctlab import *  # noqa: F401,F403

try:
    from _fluctlab import __doc__ as _core_doc  # noqa: F401
except ImportError:  # pragma: no cover
    pass
