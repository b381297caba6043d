"""The exponent psi(q, gamma) of Krawtchouk moments and the 4-tuple thresholds.

Two independent routes compute psi:

* ``psi_moment`` evaluates the finite-n moment
  ``(1/n) log2(2^-n sum_j C(n,j) |K_i(j)|^q) - (q/2) h(i/n)`` exactly from
  integer Krawtchouk values;
* ``psi_variational`` minimises
  ``g(eps) = (q-1) lambda(q, eps) - q gamma log2(1 - 2 eps)`` over
  ``[0, 1/2]`` and subtracts ``(q/2) h(gamma)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import bisect

from .krawtchouk import krawtchouk_table

EPS_TOL = 1e-12


def binary_entropy(t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"entropy argument must lie in [0, 1], got {t}")
    if t in (0.0, 1.0):
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)


def lambda_of(q: float, eps: float) -> float:
    """``1 + log2(eps^q + (1-eps)^q) / (q-1)``; ``1 + log2(1-eps)`` at ``q = inf``."""
    if not (q == math.inf or q > 1):
        raise ValueError(f"lambda(q, eps) is defined here for q > 1 or inf, got {q}")
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"eps must lie in [0, 1/2], got {eps}")
    if q == math.inf:
        return 1.0 + math.log2(1.0 - eps)
    return 1.0 + math.log2(eps ** q + (1.0 - eps) ** q) / (q - 1.0)


@dataclass(frozen=True)
class PsiValue:
    q: float
    gamma: float
    value: float
    eps0: float | None
    method: str
    n: int | None = None
    weight: int | None = None
    extension: bool = False

    def row(self) -> dict:
        return {"q": self.q, "gamma": self.gamma, "psi": self.value,
                "eps0": "" if self.eps0 is None else self.eps0,
                "method": self.method, "n": "" if self.n is None else self.n}


def _log2_int(x: int) -> float:
    return math.log2(x) if x > 0 else -math.inf


def psi_moment(q: float, gamma: float, n: int) -> PsiValue:
    """Finite-n moment estimate of ``psi(q, gamma)``; error is O(log n / n).

    ``gamma * n`` is rounded to the nearest weight ``i``; the entropy term
    uses ``i/n`` so the estimate is consistent for the weight actually summed.
    """
    if not 0.0 < gamma <= 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2], got {gamma}")
    if n < 2:
        raise ValueError("n must be >= 2")
    i = int(round(gamma * n))
    K = krawtchouk_table(n, i).values
    if q == int(q):
        p = int(q)
        total = sum(comb(n, j) * abs(K[j]) ** p for j in range(n + 1))
        log_mean = _log2_int(total) - n
    else:
        logs = np.array([math.log2(comb(n, j)) + q * _log2_int(abs(K[j])) for j in range(n + 1)])
        top = logs.max()
        log_mean = top + math.log2(np.exp2(logs - top).sum()) - n
    value = log_mean / n - 0.5 * q * binary_entropy(i / n)
    return PsiValue(q, i / n, value, None, "moment", n, i, q != int(q) or int(q) % 2 == 1)


def stationarity(q: float, eps: float) -> float:
    """``(1/2 - eps)((1-eps)^(q-1) - eps^(q-1)) / ((1-eps)^q + eps^q)``;
    decreases from 1/2 to 0 on ``[0, 1/2]``."""
    return (0.5 - eps) * ((1 - eps) ** (q - 1) - eps ** (q - 1)) / ((1 - eps) ** q + eps ** q)


def g_exponent(q: float, gamma: float, eps: float) -> float:
    """``(q-1) lambda(q, eps) - q gamma log2(1 - 2 eps)``."""
    if eps >= 0.5:
        return math.inf if gamma > 0 else q - 1 + math.log2(2 * 0.5 ** q)
    return (q - 1) + math.log2(eps ** q + (1 - eps) ** q) - q * gamma * math.log2(1 - 2 * eps)


def variational_argmin(q: float, gamma: float) -> float:
    """The stationary point ``eps0`` of ``g``; 0 at ``gamma = 1/2``."""
    if gamma == 0.5:
        return 0.0
    return bisect(lambda e: stationarity(q, e) - gamma, 0.0, 0.5, xtol=EPS_TOL)


def psi_variational(q: float, gamma: float) -> PsiValue:
    """``min_eps g(eps) - (q/2) h(gamma)`` with the minimiser found by bisection.

    ``gamma = 1/2`` is accepted as the endpoint where ``eps0 = 0``.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if not 0.0 < gamma <= 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2], got {gamma}")
    eps0 = variational_argmin(q, gamma)
    value = g_exponent(q, gamma, eps0) - 0.5 * q * binary_entropy(gamma)
    return PsiValue(q, gamma, value, eps0, "variational", extension=q != int(q))


def is_unimodal_around(q: float, gamma: float, step: float = 1e-3) -> bool:
    """``g`` strictly decreases up to ``eps0`` and strictly increases after it
    on a grid of the given step."""
    eps0 = variational_argmin(q, gamma)
    left = np.arange(eps0, -step / 2, -step)[::-1]
    right = np.arange(eps0, 0.5 - step / 2, step)
    gl = [g_exponent(q, gamma, e) for e in left]
    gr = [g_exponent(q, gamma, e) for e in right]
    return bool(np.all(np.diff(gl) < 0) and np.all(np.diff(gr) > 0))


# -- threshold algebra for 4-tuples -----------------------------------------

def prop18_threshold(R: float) -> float:
    """``8^R + 1 - 3 sqrt(8^(2R-1) + 8^(R-1))``; falls from 1/2 at R=0 to 0 at R=1."""
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {R}")
    return 8.0 ** R + 1.0 - 3.0 * math.sqrt(8.0 ** (2 * R - 1) + 8.0 ** (R - 1))


def gamma_of_y(y: float) -> float:
    """Stationarity at ``q = 4`` written in ``y = (1 - 2 eps)^2``."""
    return (y * y + 3 * y) / (y * y + 6 * y + 1)


def eps_of_y(y: float) -> float:
    return 0.5 * (1.0 - math.sqrt(y))


@dataclass(frozen=True)
class Thresholds:
    y0: float
    y1: float
    eps0: float
    eps1: float


def y0_y1(R: float, gamma: float) -> Thresholds:
    """``y0`` solves ``gamma = (y^2 + 3y)/(y^2 + 6y + 1)``; ``y1`` solves
    ``y^2 + 6y + 1 = 8^(1-R)``, i.e. ``lambda(4, eps1) = 1 - R``."""
    if not 0.0 < gamma <= 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2], got {gamma}")
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {R}")
    y0 = (6 * gamma - 3 + math.sqrt((3 - 6 * gamma) ** 2 + 4 * gamma * (1 - gamma))) / (2 * (1 - gamma))
    y1 = math.sqrt(8.0 + 8.0 ** (1.0 - R)) - 3.0
    return Thresholds(y0, y1, eps_of_y(y0), eps_of_y(max(y1, 0.0)))


def prop18_bound(R: float, gamma: float) -> float:
    """Per-coordinate exponent bounding ``(1/n) log2 N_i(C)`` for a
    pseudorandom code of rate ``R`` at weight ``gamma n``.

    ``gamma >= f(R)``: ``psi(4, gamma) + 2 h(gamma) - 3 (1 - R)``;
    otherwise ``-2 gamma log2(sqrt(8 + 8^(1-R)) - 3)``.
    """
    if not 0.0 < R < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {R}")
    if not 0.0 < gamma <= 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2], got {gamma}")
    if gamma >= prop18_threshold(R):
        return prop18_bound_branches(R, gamma)[0]
    return prop18_bound_branches(R, gamma)[1]


def prop18_bound_branches(R: float, gamma: float) -> tuple[float, float]:
    """Both case expressions, regardless of which applies."""
    first = psi_variational(4, gamma).value + 2 * binary_entropy(gamma) - 3 * (1 - R)
    y1 = math.sqrt(8.0 + 8.0 ** (1.0 - R)) - 3.0
    second = -2 * gamma * math.log2(y1)
    return first, second


PSI_COLUMNS = ("q", "gamma", "psi", "eps0", "method", "n")


def psi_csv(values) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=PSI_COLUMNS, lineterminator="\n")
    w.writeheader()
    for v in values:
        w.writerow({k: (repr(x) if isinstance(x, float) else x) for k, x in v.row().items()})
    return buf.getvalue()
