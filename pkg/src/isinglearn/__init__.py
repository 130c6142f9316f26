"""Structure learning for ferromagnetic Ising models.

Exact small-system inference, Glauber sampling, the Thr/Ind/IndD/Rlr
learners, incoherence and tree-recursion calculators, and a seeded
experiment harness.
"""

from isinglearn.graph import Graph, IsingParams, SampleSet, max_degree

__version__ = "0.1.0"

__all__ = ["Graph", "IsingParams", "SampleSet", "max_degree", "__version__"]
