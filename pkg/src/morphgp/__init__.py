"""morphgp: genetic programming over recursion-scheme scaffolds.

Evolves pure, typed functional programs by filling the typed slots of six
fold/unfold skeletons (straight-line, indexed fold, curried fold, unfold,
accumulating fold, unfold-refold), evaluated against a registry of
synthesis-by-example benchmark problems.
"""
from .exec.backend import NAME as engine_name

__version__ = "0.1.0"
__all__ = ["engine_name", "__version__"]
