"""Randomized quasi-Monte Carlo integration on scrambled base-2 digital nets,
with quantile-based confidence intervals and randomization diagnostics."""

from . import diagnose, estimate, f2, integrands, kindex, nets, streams, walsh

__all__ = ["diagnose", "estimate", "f2", "integrands", "kindex", "nets",
           "streams", "walsh"]
__version__ = "0.1.0"
