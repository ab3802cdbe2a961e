"""Distance functions turning score differences into pairwise error values.

Three kernels, all vectorised over numpy arrays and exact for scalars:

  step_distance     piecewise-linear ramp, 0 below -delta, 1 above +delta
  sigmoid_distance  logistic curve with steepness lam
  ce_distance       cross-entropy of the sigmoid, softplus(lam*x)/lam

plus the two analytic derivatives the gradient paths need. The derivative
convention everywhere is d/d(anchor score): the argument x is
score[negative] - score[anchor], so d/d(anchor) = -d/dx.

Numerical notes. The ramp is computed as 0.5 + 0.5*(x/delta) inside the
clamp, so huge |x| cannot overflow the way (x + delta) can. The sigmoid goes
through scipy.special.expit, which is branch-stable for large |lam*x|. The
cross-entropy form -(1/lam)*log(1 - sigmoid(lam*x)) loses everything to
rounding once lam*x > ~37, so it is evaluated as np.logaddexp(0, lam*x)/lam,
which is the same function arranged without the cancellation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit

from .types import DistanceKind, DistanceSpec, ValidationError


def _prepare(x, name: str = "x") -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} must be finite")
    return arr, arr.ndim == 0


def _check_param(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _ret(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def step_distance(x, delta: float = 0.5):
    """Clamped linear ramp H(x) = clip((x + delta) / (2 delta), 0, 1).

    Exactly 0 for x <= -delta, exactly 1 for x >= delta, 0.5 at x = 0, and
    symmetric: H(x) + H(-x) = 1.
    """
    delta = _check_param("delta", delta)
    arr, scalar = _prepare(x)
    # x / delta may overflow to +-inf for extreme scores; the clamp absorbs it
    with np.errstate(over="ignore"):
        return _ret(np.clip(0.5 + 0.5 * (arr / delta), 0.0, 1.0), scalar)


def sigmoid_distance(x, lam: float = 8.0):
    """Logistic distance S(x) = 1 / (1 + exp(-lam * x))."""
    lam = _check_param("lam", lam)
    arr, scalar = _prepare(x)
    # lam * x may overflow to +-inf for extreme scores; expit saturates correctly
    with np.errstate(over="ignore"):
        return _ret(expit(lam * arr), scalar)


def sigmoid_distance_grad_wrt_u(x, lam: float = 8.0):
    """d S(v - u) / d u = -lam * S(x) * (1 - S(x)) at x = v - u.

    Written as -lam * S(x) * S(-x): both factors are stable, neither is a
    subtraction from 1.
    """
    lam = _check_param("lam", lam)
    arr, scalar = _prepare(x)
    with np.errstate(over="ignore"):
        z = lam * arr
        return _ret(-lam * expit(z) * expit(-z), scalar)


def ce_distance(x, lam: float = 8.0):
    """Cross-entropy distance CE(x) = softplus(lam * x) / lam.

    Identical to -(1/lam) * log(1 - S(x)) but immune to the 1 - S
    cancellation for large lam * x. Nonnegative everywhere, ~0 for strongly
    correct pairs, asymptotically linear (slope 1) for strongly wrong ones.
    """
    lam = _check_param("lam", lam)
    arr, scalar = _prepare(x)
    with np.errstate(over="ignore"):
        return _ret(np.logaddexp(0.0, lam * arr) / lam, scalar)


def ce_distance_grad_wrt_u(x, lam: float = 8.0):
    """d CE(v - u) / d u = -S(x) at x = v - u.

    The lam factors cancel: (1 / (lam * (1 - S))) from the outer log times
    (-lam * S * (1 - S)) from the inner sigmoid leaves -S.
    """
    lam = _check_param("lam", lam)
    arr, scalar = _prepare(x)
    with np.errstate(over="ignore"):
        return _ret(-expit(lam * arr), scalar)


def distance_value(x, spec: DistanceSpec):
    """Evaluate the distance selected by spec."""
    if spec.kind is DistanceKind.STEP:
        return step_distance(x, spec.delta)
    if spec.kind is DistanceKind.SIGMOID:
        return sigmoid_distance(x, spec.lam)
    return ce_distance(x, spec.lam)
