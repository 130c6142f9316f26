from isinglearn.learners.ind import default_eps_gamma, ind_learn, indd_learn, potential_neighbors, score
from isinglearn.learners.result import LearnerResult, VertexResult
from isinglearn.learners.rlr import prox_gradient, pseudo_likelihood, rlr_learn, scaled_lambda
from isinglearn.learners.stats import Statistics, as_statistics, empirical_correlations
from isinglearn.learners.thr import HypothesisError, default_tau, thr_learn

__all__ = [
    "HypothesisError", "LearnerResult", "Statistics", "VertexResult", "as_statistics",
    "default_eps_gamma", "default_tau", "empirical_correlations", "ind_learn", "indd_learn",
    "potential_neighbors", "prox_gradient", "pseudo_likelihood", "rlr_learn", "scaled_lambda",
    "score", "thr_learn",
]
