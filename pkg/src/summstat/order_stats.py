"""Expected values of standard-normal order statistics.

The r-th order statistic of n i.i.d. N(0,1) draws has expectation

    E[Z(r:n)] = C(n, r) * integral z * F(z)^(r-1) * (1 - F(z))^(n-r) * f(z) dz,

with C(n, r) = n! / ((r-1)! (n-r)!), f the normal density and F its CDF.
This module evaluates the integral by adaptive Gauss-Legendre quadrature
and derives from it the two scaling constants used by the estimators:

* ``xi(n)``  = 2 E[Z(n:n)]   -- the expected range of n draws,
* ``eta(n)`` = 2 E[Z(3Q+1:n)] for n = 4Q+1 -- the expected interquartile
  range of n draws.

Dividing an observed range (or IQR) by the matching constant turns it
into an estimate of the sample standard deviation.  Closed-form
approximations of both constants via Blom's plotting position
(Blom, 1958) are also provided; they avoid quadrature entirely and are
accurate to a few parts per thousand for n >= 10.

Numerical notes: the binomial-style coefficient overflows native floats
near n = 200, so coefficient and powers are combined in log space.  The
integrand's mass drifts outward like sqrt(2 ln n), so the truncation
window grows with n accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy import special as _special

from .normal_math import quantile

__all__ = [
    "QuadratureError",
    "ScalingTable",
    "adaptive_gauss_legendre",
    "blom",
    "blom_eta",
    "blom_xi",
    "eta",
    "expected_order_stat",
    "generate_table",
    "xi",
]

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# 20-point panels: degree-39 exactness makes the bisection error estimate
# collapse fast for smooth integrands.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


class QuadratureError(RuntimeError):
    """Adaptive integration ran out of budget before reaching tolerance."""

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    h = 0.5 * (b - a)
    return h * float(np.dot(_GL_WEIGHTS, f(0.5 * (a + b) + h * _GL_NODES)))


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-8,
    max_panels: int = 4096,
) -> float:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    Bisects any panel whose 20-point estimate disagrees with the sum of
    its two half-panel estimates by more than its share of the budget.
    ``f`` must accept a 1-D ndarray of abscissae.  Raises
    :class:`QuadratureError` (carrying the value and error reached) if
    ``max_panels`` panels are not enough.
    """
    total = 0.0
    err_total = 0.0
    panels = 0
    stack = [(a, b, _panel(f, a, b), tol)]
    while stack:
        lo, hi, coarse, budget = stack.pop()
        panels += 1
        if panels > max_panels:
            # Drain the stack with coarse values so the caller sees the
            # best available estimate alongside the failure.
            total += coarse + sum(item[2] for item in stack)
            err_total += budget + sum(item[3] for item in stack)
            raise QuadratureError(
                f"quadrature used more than {max_panels} panels "
                f"(achieved error ~{err_total:.3e}, tolerance {tol:.3e})",
                estimate=total,
                error_estimate=err_total,
            )
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        disc = abs(left + right - coarse)
        if disc <= budget or (hi - lo) < 1e-13:
            total += left + right
            err_total += disc
        else:
            stack.append((lo, mid, left, 0.5 * budget))
            stack.append((mid, hi, right, 0.5 * budget))
    return total


def _validate_query(n: int, r: int) -> None:
    if not isinstance(n, (int, np.integer)) or not isinstance(r, (int, np.integer)):
        raise ValueError(f"order-statistic query needs integers, got n={n!r}, r={r!r}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got n={n}")
    if not 1 <= r <= n:
        raise ValueError(f"rank must satisfy 1 <= r <= n, got r={r} for n={n}")


def expected_order_stat(n: int, r: int, tol: float = 1e-8) -> float:
    """E[Z(r:n)], the expected r-th smallest of n standard-normal draws.

    Exact to ``tol`` (default 1e-8) by adaptive quadrature on a window
    of +/- (8 + sqrt(2 ln n)), wide enough that the discarded tails are
    far below tolerance for any practical n.
    """
    _validate_query(n, r)
    n = int(n)
    r = int(r)
    log_coef = math.lgamma(n + 1) - math.lgamma(r) - math.lgamma(n - r + 1)

    def integrand(z: np.ndarray) -> np.ndarray:
        # log of F^(r-1) (1-F)^(n-r) f, assembled from erfc of positive
        # arguments so neither tail loses precision.
        f_z = 0.5 * _special.erfc(-z / _SQRT2)
        sf_z = 0.5 * _special.erfc(z / _SQRT2)
        with np.errstate(divide="ignore"):  # exact zeros only at the window edge
            lw = (
                log_coef
                + (r - 1) * np.log(f_z)
                + (n - r) * np.log(sf_z)
                - 0.5 * z * z
                - _LOG_SQRT_2PI
            )
        return z * np.exp(lw)

    half_width = 8.0 + math.sqrt(2.0 * math.log(n)) if n > 1 else 8.0
    return adaptive_gauss_legendre(integrand, -half_width, half_width, tol=tol)


@lru_cache(maxsize=None)
def xi(n: int) -> float:
    """Expected range of n standard-normal draws: 2 E[Z(n:n)].

    xi(1) is 0 by symmetry; SD estimators reject n < 2 themselves.
    """
    if n < 1:
        raise ValueError(f"xi requires n >= 1, got {n}")
    if n == 1:
        return 0.0
    return 2.0 * expected_order_stat(n, n)


@lru_cache(maxsize=None)
def eta(n: int) -> float:
    """Expected IQR of n standard-normal draws: 2 E[Z(3Q+1:n)], n = 4Q+1.

    Only defined when the quartiles fall exactly on order statistics,
    i.e. n = 4Q+1 with Q >= 1; any other n raises ValueError (callers
    that must handle arbitrary n use :func:`blom_eta`).
    """
    q, rem = divmod(n - 1, 4)
    if rem != 0 or q < 1:
        raise ValueError(f"eta requires n = 4Q+1 with Q >= 1, got n={n}")
    return 2.0 * expected_order_stat(n, 3 * q + 1)


def blom(n: int, r: int, alpha: float = 0.375) -> float:
    """Blom's closed-form approximation of E[Z(r:n)].

    Evaluates the normal quantile at the plotting position
    (r - alpha) / (n - 2 alpha + 1).  The default alpha = 0.375 is
    Blom's compromise value; 0 <= alpha < 0.5 is required.
    """
    _validate_query(n, r)
    if not 0.0 <= alpha < 0.5:
        raise ValueError(f"alpha must lie in [0, 0.5), got {alpha}")
    return quantile((r - alpha) / (n - 2.0 * alpha + 1.0))


def blom_xi(n: int) -> float:
    """Blom-form expected range: 2 * quantile((n - 0.375) / (n + 0.25))."""
    if n < 2:
        raise ValueError(f"blom_xi requires n >= 2, got {n}")
    return 2.0 * quantile((n - 0.375) / (n + 0.25))


def blom_eta(n: int) -> float:
    """Blom-form expected IQR: 2 * quantile((0.75 n - 0.125) / (n + 0.25)).

    Valid for any n >= 2 (no 4Q+1 restriction); converges to
    2 * quantile(0.75) = 1.34898 as n grows.
    """
    if n < 2:
        raise ValueError(f"blom_eta requires n >= 2, got {n}")
    return 2.0 * quantile((0.75 * n - 0.125) / (n + 0.25))


def _round3(x: float) -> float:
    # Half-away-from-zero to 3 decimals, matching the printed tables.
    return float(Decimal(repr(x)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ScalingTable:
    """Scaling constants indexed by n (kind="xi") or by Q (kind="eta")."""

    kind: Literal["xi", "eta"]
    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if self.kind not in ("xi", "eta"):
            raise ValueError(f"table kind must be 'xi' or 'eta', got {self.kind!r}")

    def rounded(self) -> list[tuple[int, float]]:
        """Entries rounded half-away-from-zero to 3 decimals."""
        return [(i, _round3(v)) for i, v in self.entries]

    def write_csv(self, stream) -> None:
        """Emit ``index,value`` rows with 3-decimal values."""
        stream.write("index,value\n")
        for i, v in self.rounded():
            stream.write(f"{i},{v:.3f}\n")


def generate_table(kind: Literal["xi", "eta"], max_index: int) -> ScalingTable:
    """Tabulate xi(n) for n = 1..max_index or eta(4Q+1) for Q = 1..max_index.

    Values are exact quadrature results at full precision; rounding to
    the printed 3 decimals happens only on emission.
    """
    if kind not in ("xi", "eta"):
        raise ValueError(f"table kind must be 'xi' or 'eta', got {kind!r}")
    if max_index < 1:
        raise ValueError(f"max_index must be >= 1, got {max_index}")
    if kind == "xi":
        entries = tuple((n, xi(n)) for n in range(1, max_index + 1))
    else:
        entries = tuple((q, eta(4 * q + 1)) for q in range(1, max_index + 1))
    return ScalingTable(kind=kind, entries=entries)
