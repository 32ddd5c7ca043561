"""Batched one-dimensional searches.

Each routine works on a vector of independent problems at once: row i of the
bracket arrays belongs to problem i, and the callable receives/returns arrays
of the same length.  All rows take the same number of steps, so results do not
depend on how problems are grouped into batches.
"""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_iterations(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return math.ceil(math.log(tol / width) / math.log(INV_PHI))


def golden_minimize(f, lo, hi, tol: float) -> np.ndarray:
    """Minimize unimodal functions on [lo, hi] rowwise.

    Ties keep the left sub-bracket, so a flat valley resolves to its left end.
    Each row stops once its own bracket is within ``tol``, so a row's answer
    does not depend on what else is in the batch.
    """
    a = np.array(lo, dtype=float, ndmin=1)
    b = np.array(hi, dtype=float, ndmin=1)
    a, b = np.broadcast_arrays(a, b)
    a, b = a.copy(), b.copy()
    steps = np.array([golden_iterations(float(w), tol) for w in (b - a).ravel()]).reshape(a.shape)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for k in range(int(steps.max(initial=0))):
        run = k < steps
        left = f1 <= f2
        go_left, go_right = run & left, run & ~left
        # left: [a, x2] with x1 becoming the new right probe
        b = np.where(go_left, x2, b)
        a = np.where(go_right, x1, a)
        nx2 = np.where(go_left, x1, np.where(go_right, a + INV_PHI * (b - a), x2))
        nx1 = np.where(go_left, b - INV_PHI * (b - a), np.where(go_right, x2, x1))
        probe = np.where(left, nx1, nx2)
        fp = f(probe)
        f1, f2 = np.where(go_left, fp, np.where(go_right, f2, f1)), np.where(go_left, f1, np.where(go_right, fp, f2))
        x1, x2 = nx1, nx2
    return 0.5 * (a + b)


def golden_minimize_scalar(f, lo: float, hi: float, tol: float) -> float:
    return float(golden_minimize(lambda x: np.array([f(float(x[0]))]), [lo], [hi], tol)[0])


def bisect_increasing(f, lo, hi, tol: float, max_iter: int = 200):
    """Root of rowwise increasing functions with f(lo) <= 0 <= f(hi).

    Returns (root, iterations).  Rows that land on an exact zero stop there.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    done = np.zeros(lo.shape, dtype=bool)
    exact = np.full(lo.shape, np.nan)
    it = 0
    while it < max_iter:
        active = ~done & (hi - lo > tol)
        if not active.any():
            break
        it += 1
        mid = 0.5 * (lo + hi)
        val = f(mid)
        hit = active & (val == 0)
        exact = np.where(hit, mid, exact)
        done |= hit
        go_left = active & ~hit & (val > 0)
        go_right = active & ~hit & (val < 0)
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_right, mid, lo)
    root = np.where(np.isnan(exact), 0.5 * (lo + hi), exact)
    return root, it
