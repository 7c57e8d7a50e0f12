"""Bracketed inversion of monotone functions.

Wraps :func:`scipy.optimize.bisect` with the residual check the planners need:
scipy stops on the bracket width, callers care about the error in the output.
"""

from typing import Callable, Optional

from scipy.optimize import bisect

from waistband.config.settings import settings
from waistband.utils.exceptions import ConvergenceError
from waistband.utils.logging import logger


def invert_increasing(
    func: Callable[[float], float],
    target: float,
    lower: float,
    upper: float,
    *,
    ftol: float,
    maxiter: Optional[int] = None,
    xtol: float = 1e-12,
) -> float:
    """Return ``x`` in ``[lower, upper]`` with ``func(x) == target`` within ``ftol``.

    ``func`` must be increasing on the bracket and ``target`` must lie between
    ``func(lower)`` and ``func(upper)``. A target within ``ftol`` of an endpoint
    value returns that endpoint.

    Raises
    ------
    ConvergenceError
        If the iteration cap is reached or the final residual exceeds ``ftol``.
    """
    if maxiter is None:
        maxiter = settings.max_bisection_iterations

    f_lower = func(lower) - target
    if abs(f_lower) <= ftol:
        return lower
    f_upper = func(upper) - target
    if abs(f_upper) <= ftol:
        return upper
    if f_lower > 0 or f_upper < 0:
        raise ConvergenceError(
            f"Target {target} is not bracketed by [{lower}, {upper}]"
        )

    root, result = bisect(
        lambda x: func(x) - target,
        lower,
        upper,
        xtol=xtol,
        maxiter=maxiter,
        full_output=True,
        disp=False,
    )
    residual = abs(func(root) - target)
    logger.debug(
        f"Bisection for target {target}: x={root} after {result.iterations} "
        f"iterations, residual {residual}"
    )
    if not result.converged or residual > ftol:
        raise ConvergenceError(
            f"Bisection for target {target} stopped at x={root} with residual "
            f"{residual} after {result.iterations} iterations"
        )
    return float(root)
