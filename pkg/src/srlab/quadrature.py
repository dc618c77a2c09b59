"""Adaptive Simpson quadrature.

Used as an independent check on closed-form time averages; nothing in the
closed forms depends on it.
"""

from __future__ import annotations

import math

from .errors import NumericalConsistencyError


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 40) -> float:
    """Integrate scalar ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Intervals are bisected until the Richardson-corrected step-doubling
    estimate ``|S_left + S_right - S_whole| / 15`` falls below the local
    share of ``tol``.

    Raises:
        NumericalConsistencyError: if some interval still fails the
            tolerance at ``max_depth`` bisections.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            raise NumericalConsistencyError(
                f"adaptive Simpson did not converge on [{lo!r}, {hi!r}]"
            )
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if not math.isfinite(total):
        raise NumericalConsistencyError("integral is not finite")
    return total
