"""Two-prover relativistic zero-knowledge protocols, extractors and soundness bounds."""

__version__ = "0.1.0"
