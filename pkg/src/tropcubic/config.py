"""Session-wide defaults: working precision, cyclotomic order, seeding."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

DEFAULT_PREC = mpq(20)
DEFAULT_ZETA_ORDER = 12


@dataclass(frozen=True)
class SessionConfig:
    """Knobs threaded through the CLI and the higher-level pipelines.

    prec is an absolute t-exponent cutoff, not a term count: series are
    carried with all exponents strictly below it.  zeta_order selects the
    coefficient field Q(zeta_N).  max_branch_depth bounds the recursion
    of the Puiseux root solver before it reports a separation failure.
    """

    prec: mpq = DEFAULT_PREC
    zeta_order: int = DEFAULT_ZETA_ORDER
    seed: int = 0
    max_branch_depth: int = 64

    def __post_init__(self):
        object.__setattr__(self, "prec", mpq(self.prec))
        if self.prec <= 0:
            raise ValueError("prec must be positive")
        if self.max_branch_depth < 1:
            raise ValueError("max_branch_depth must be at least 1")


DEFAULT_CONFIG = SessionConfig()
