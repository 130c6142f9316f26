"""Sample-complexity bound calculators.

The unspecified numerical constants (``K``, ``K_prime``, ``K1``..``K3``,
``alpha``) are explicit inputs, default 1.0, and are echoed in every report.
Hypothesis violations set ``hypothesis_ok=False``; the formula is still
evaluated so the caller can see the number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    inputs: dict[str, Any]
    value: float
    hypothesis_ok: bool
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"theorem": self.theorem, "inputs": self.inputs, "value": self.value,
                "hypothesis_ok": self.hypothesis_ok, **self.extra}


def _check_common(p: int, delta: int, theta: float, confidence_delta: float) -> None:
    if p < 1:
        raise ValueError("p must be positive")
    if not 0 < confidence_delta < 1:
        raise ValueError("confidence delta must lie in (0, 1)")
    if theta < 0:
        raise ValueError("theta must be non-negative")


def bound_thm1(p: int, delta: int, theta: float, confidence_delta: float) -> BoundReport:
    """Thresholding: ``8 / (tanh theta - 1/(2 delta))^2 * log(2p/delta_c)``."""
    _check_common(p, delta, theta, confidence_delta)
    if delta <= 1:
        raise ValueError("delta must exceed 1")
    gap = math.tanh(theta) - 1.0 / (2 * delta)
    value = 8.0 / gap**2 * math.log(2 * p / confidence_delta) if gap != 0 else math.inf
    tau = (math.tanh(theta) + 1.0 / (2 * delta)) / 2
    return BoundReport("thm1", {"p": p, "delta": delta, "theta": theta, "confidence_delta": confidence_delta},
                       value, theta < math.atanh(1.0 / (2 * delta)), {"tau": tau})


def bound_thm3(p: int, delta: int, theta: float, confidence_delta: float, K: float = 1.0) -> BoundReport:
    """Local independence test with ``eps = sinh(2 theta)/4``,
    ``gamma = exp(-4 delta theta) 2^(-2 delta)``:
    ``n <= 100 delta / (eps^2 gamma^4) log(2p/delta_c)`` and
    ``chi <= K (2p)^(2 delta + 1) log p``."""
    _check_common(p, delta, theta, confidence_delta)
    if delta < 1:
        raise ValueError("delta must be at least 1")
    eps = math.sinh(2 * theta) / 4
    gamma = math.exp(-4 * delta * theta) * 2.0 ** (-2 * delta)
    value = 100.0 * delta / (eps**2 * gamma**4) * math.log(2 * p / confidence_delta) if eps > 0 else math.inf
    chi = K * (2.0 * p) ** (2 * delta + 1) * math.log(p)
    return BoundReport("thm3", {"p": p, "delta": delta, "theta": theta, "confidence_delta": confidence_delta, "K": K},
                       value, theta > 0, {"eps": eps, "gamma": gamma, "complexity": chi})


def bound_thm4(p: int, delta: int, theta: float, confidence_delta: float, alpha: float = 1.0,
               K_prime: float = 1.0, K: float = 1.0) -> BoundReport:
    """Thresholded-pool independence test with ``kappa = tanh theta``:
    ``n <= 8 (kappa^2 + 8^delta) log(4p/delta_c)`` and
    ``chi <= K' p delta^(delta log(4/kappa)/alpha) + K' delta p^2 log p``.
    Hypothesis: ``theta < K / delta``."""
    _check_common(p, delta, theta, confidence_delta)
    if delta < 1:
        raise ValueError("delta must be at least 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    kappa = math.tanh(theta)
    eps = math.sinh(2 * theta) / 4
    gamma = math.exp(-4 * delta * theta) * 2.0 ** (-2 * delta)
    value = 8.0 * (kappa**2 + 8.0**delta) * math.log(4 * p / confidence_delta)
    if kappa > 0:
        chi = K_prime * p * delta ** (delta * math.log(4 / kappa) / alpha) + K_prime * delta * p**2 * math.log(p)
    else:
        chi = math.inf
    return BoundReport("thm4", {"p": p, "delta": delta, "theta": theta, "confidence_delta": confidence_delta,
                                "alpha": alpha, "K_prime": K_prime, "K": K},
                       value, theta < K / delta,
                       {"kappa": kappa, "eps": eps, "gamma": gamma, "complexity": chi})


def bound_thm5(p: int, delta: int, theta: float, confidence_delta: float, K2: float = 1.0,
               K3: float = 1.0, K1: float = 1.0) -> BoundReport:
    """Regularized pseudo-likelihood: ``n <= K2 theta^-2 delta log(8 p^2/delta_c)``
    with ``lambda = K3 theta delta^(-1/2)``. Hypothesis: ``theta <= K1/delta``."""
    _check_common(p, delta, theta, confidence_delta)
    if delta < 3:
        raise ValueError("delta must be at least 3")
    value = K2 * delta * math.log(8 * p**2 / confidence_delta) / theta**2 if theta > 0 else math.inf
    lam = K3 * theta / math.sqrt(delta)
    return BoundReport("thm5", {"p": p, "delta": delta, "theta": theta, "confidence_delta": confidence_delta,
                                "K1": K1, "K2": K2, "K3": K3},
                       value, theta <= K1 / delta, {"lambda": lam})


def bound_lemma1(n: int, delta: int, lam: float, eps: float, C_min: float) -> BoundReport:
    """Upper bound on the success probability of ``Rlr(lam)`` when the
    incoherence condition fails by ``eps``:
    ``4 delta^2 exp(-n dA^2) + 2 delta exp(-n lam^2 dB^2)`` with
    ``dA = C_min^2 eps / (100 delta^2)``, ``dB = C_min eps / (8 delta)``,
    clamped to ``[0, 1]``. Hypothesis: ``lam < sqrt(C_min^3 eps / (2^9 delta^4))``."""
    if n < 0 or delta < 1 or lam < 0 or eps <= 0 or C_min <= 0:
        raise ValueError("invalid lemma inputs")
    dA = C_min**2 * eps / (100 * delta**2)
    dB = C_min * eps / (8 * delta)
    raw = 4 * delta**2 * math.exp(-n * dA**2) + 2 * delta * math.exp(-n * lam**2 * dB**2)
    lam_max = math.sqrt(C_min**3 * eps / (2**9 * delta**4))
    return BoundReport("lemma1", {"n": n, "delta": delta, "lambda": lam, "eps": eps, "C_min": C_min},
                       min(1.0, max(0.0, raw)), lam < lam_max,
                       {"raw": raw, "delta_A": dA, "delta_B": dB, "lambda_max": lam_max})
