from isinglearn.theory.bounds import (BoundReport, bound_lemma1, bound_thm1, bound_thm3, bound_thm4,
                                      bound_thm5)
from isinglearn.theory.tree import (ConvergedIncoherence, ThresholdError, TreeIncoherence, boundary_field,
                                    boundary_field_iteration, converged_incoherence, hbar_and_theta_tilde,
                                    hbar_iteration, tree_incoherence, tree_params, tree_threshold)

__all__ = [
    "BoundReport", "ConvergedIncoherence", "ThresholdError", "TreeIncoherence", "bound_lemma1",
    "bound_thm1", "bound_thm3", "bound_thm4", "bound_thm5", "boundary_field", "boundary_field_iteration",
    "converged_incoherence", "hbar_and_theta_tilde", "hbar_iteration", "tree_incoherence", "tree_params",
    "tree_threshold",
]
