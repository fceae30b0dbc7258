"""Projected quasi-Newton minimization over a box.

Small dense problems only (the planner has 8-9 variables), so the inverse
Hessian approximation is kept as a full matrix. Variables sitting on a bound
with the gradient pushing outward are frozen for the iteration; the search
direction is built from the inverse Hessian restricted to the free set, and
trial points are projected back onto the box. The line search brackets a
weak Wolfe point, which tolerates the kinks of norm-based objectives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ARMIJO = 1e-4
CURVATURE = 0.9
MAX_LINE_SEARCH = 60


@dataclass
class BoxResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    evaluations: int
    converged: bool
    status: str
    history: list[float] = field(default_factory=list)


def project(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(x, lower), upper)


def projected_gradient(x, g, lower, upper) -> np.ndarray:
    """Gradient with components zeroed where a bound blocks descent."""
    pg = g.copy()
    pg[(x <= lower) & (g > 0.0)] = 0.0
    pg[(x >= upper) & (g < 0.0)] = 0.0
    return pg


def minimize_box(
    fun_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    max_iterations: int = 200,
    gradient_tolerance: float = 1e-8,
    step_tolerance: float = 1e-10,
) -> BoxResult:
    """Minimize ``fun`` subject to ``lower <= x <= upper``.

    ``fun_and_grad`` may return ``inf`` for points outside its domain; the
    line search backs off from them. Every accepted iterate satisfies the
    Armijo condition, so ``history`` (cost per accepted iterate) never
    increases. Termination statuses: ``"gradient"`` and ``"step"`` count as
    converged, ``"max_iterations"`` and ``"infeasible_start"`` do not.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x = project(np.asarray(x0, dtype=float), lower, upper)
    f, g = fun_and_grad(x)
    evals = 1
    history = [f]
    if not np.isfinite(f):
        return BoxResult(x, f, g, 0, evals, False, "infeasible_start", history)

    n = x.size
    h = np.eye(n)
    fresh = True
    status = "max_iterations"
    it = 0
    while it < max_iterations:
        pg = projected_gradient(x, g, lower, upper)
        if np.abs(pg).max() < gradient_tolerance:
            status = "gradient"
            break
        it += 1

        free = ~(((x <= lower) & (g > 0.0)) | ((x >= upper) & (g < 0.0)))
        d = np.zeros(n)
        d[free] = -(h[np.ix_(free, free)] @ g[free])
        if g @ d >= 0.0:
            h = np.eye(n)
            fresh = True
            d = -pg

        t, t_lo, t_hi = 1.0, 0.0, np.inf
        accepted = None
        fallback = None
        for _ in range(MAX_LINE_SEARCH):
            xn = project(x + t * d, lower, upper)
            s = xn - x
            if np.abs(s).max() < step_tolerance:
                break
            gs = g @ s
            fn, gn = fun_and_grad(xn)
            evals += 1
            if not np.isfinite(fn) or gs >= 0.0 or fn > f + ARMIJO * gs:
                t_hi = t
            elif gn @ s < CURVATURE * gs:
                fallback = (xn, fn, gn)
                t_lo = t
            else:
                accepted = (xn, fn, gn)
                break
            t = 0.5 * (t_lo + t_hi) if np.isfinite(t_hi) else 2.0 * t_lo
            if t > 1e12:
                break
        if accepted is None:
            accepted = fallback
        if accepted is None:
            status = "step"
            break

        xn, fn, gn = accepted
        s = xn - x
        y = gn - g
        x, f, g = xn, fn, gn
        history.append(f)
        if np.abs(s).max() < step_tolerance:
            status = "step"
            break

        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if fresh:
                h = np.eye(n) * (sy / (y @ y))
                fresh = False
            rho = 1.0 / sy
            hy = h @ y
            h = h - rho * (np.outer(s, hy) + np.outer(hy, s)) + (rho * rho * (y @ hy) + rho) * np.outer(s, s)

    return BoxResult(x, f, g, it, evals, status in ("gradient", "step"), status, history)
