"""Checking, one-vertex extension and decrementing of Ramsey counterexample sets."""

from .engine import (
    CounterexampleSet,
    ExtensionStats,
    PsiMap,
    build_psi,
    check_candidate,
    decrement_set,
    extend_set,
    psi_attach_check,
    verify_chain,
)
from .graph import Graph, graph6_decode, graph6_encode, read_graph6, write_graph6
from .oracle import RamseyParams, enumerate_counterexamples, is_counterexample

__version__ = "0.1.0"
