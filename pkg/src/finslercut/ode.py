"""Batched Dormand-Prince 5(4) integrator with dense output.

All trajectories in a batch share one step sequence; a trajectory that
leaves the domain is frozen and its exit time is located on the dense
interpolant.  Dense output uses the method's fourth-order continuous
extension, so interpolated states carry roughly the same error as the
step endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import StepFailure

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
])


@dataclass
class BatchSolution:
    """Dense solution of a batch; ``Y`` has shape ``(n_times, n_traj, k)``."""

    times: np.ndarray
    Y: np.ndarray
    coeffs: np.ndarray  # (n_steps, 5, n_traj, k)
    exit_time: np.ndarray  # inf when the trajectory never left the domain
    t_end: float

    @property
    def n(self):
        return self.Y.shape[1]

    def end_time(self):
        return np.minimum(self.exit_time, self.t_end)

    def __call__(self, t, idx=None):
        """State at time(s) ``t``.

        ``t`` may be a scalar (all trajectories) or an array of per-trajectory
        times matching ``idx`` (default: all trajectories).  Times beyond a
        trajectory's end are clamped; use :meth:`valid` to mask them.
        """
        idx = np.arange(self.n) if idx is None else np.asarray(idx)
        t = np.broadcast_to(np.asarray(t, float), idx.shape)
        t = np.clip(t, self.times[0], self.times[-1])
        step = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2)
        t0 = self.times[step]
        h = self.times[step + 1] - t0
        th = ((t - t0) / h)[:, None]
        r = self.coeffs[step, :, idx, :]  # (m, 5, k)
        r1, r2, r3, r4, r5 = (r[:, i, :] for i in range(5))
        return r1 + th * (r2 + (1 - th) * (r3 + th * (r4 + (1 - th) * r5)))

    def valid(self, t, idx=None):
        idx = np.arange(self.n) if idx is None else np.asarray(idx)
        return np.asarray(t) <= self.end_time()[idx]


def integrate_batch(
    rhs: Callable,
    Y0,
    t_end: float,
    rtol: float = 1e-9,
    atol: float = 1e-9,
    inside: Optional[Callable] = None,
    h0: Optional[float] = None,
    max_steps: int = 100000,
) -> BatchSolution:
    """Integrate the autonomous system ``Y' = rhs(Y)`` for every row of ``Y0``.

    ``rhs`` maps ``(m, k)`` arrays to ``(m, k)`` arrays.  ``inside(Y)``
    returns a boolean mask; a row turning False is frozen at that step.
    """
    Y = np.array(Y0, dtype=float, ndmin=2)
    n, k = Y.shape
    active = np.ones(n, dtype=bool) if inside is None else np.asarray(inside(Y), dtype=bool).copy()
    exit_time = np.where(active, np.inf, 0.0)

    def f(Yv, mask):
        out = np.zeros_like(Yv)
        if np.any(mask):
            out[mask] = rhs(Yv[mask])
        return out

    K1 = f(Y, active)
    t = 0.0
    if h0 is None:
        scale = atol + rtol * np.abs(Y)
        d0 = np.sqrt(np.mean((Y / scale) ** 2))
        d1 = np.sqrt(np.mean((K1 / scale) ** 2))
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h0, t_end)
    times = [0.0]
    Ys = [Y.copy()]
    coeffs = []
    steps = 0
    while t < t_end and np.any(active):
        steps += 1
        if steps > max_steps:
            raise StepFailure(f"exceeded {max_steps} steps at t={t:.6g}")
        h = min(h, t_end - t)
        Ks = [K1]
        with np.errstate(all="ignore"):
            for s in range(1, 7):
                Ystage = Y + h * sum(a * Kj for a, Kj in zip(_A[s], Ks))
                if s == 6:
                    Ynew = Ystage
                Ks.append(f(Ystage, active & np.all(np.isfinite(Ystage), axis=1)))
            Kst = np.stack(Ks)  # (7, n, k)
            err_vec = h * np.tensordot(_E, Kst, axes=1)
            sc = atol + rtol * np.maximum(np.abs(Y), np.abs(Ynew))
            per = np.sqrt(np.mean((err_vec / sc) ** 2, axis=1))
        per = np.where(active, per, 0.0)
        err = float(np.max(per)) if np.all(np.isfinite(per[active])) and np.all(np.isfinite(Ynew[active])) else np.inf
        if err > 1.0:
            fac = 0.2 if not np.isfinite(err) else max(0.2, 0.9 * err ** -0.2)
            h *= fac
            if h < 1e-13 * max(1.0, abs(t)):
                raise StepFailure(f"step size underflow at t={t:.6g}")
            continue
        # accepted
        ydiff = Ynew - Y
        bspl = h * Kst[0] - ydiff
        rc = np.stack([Y, ydiff, bspl, ydiff - h * Kst[6] - bspl, h * np.tensordot(_D, Kst, axes=1)])
        Ynew = np.where(active[:, None], Ynew, Y)
        rc[:, ~active] = 0.0
        rc[0, ~active] = Y[~active]
        t_new = t + h
        if inside is not None:
            now_in = np.asarray(inside(Ynew), dtype=bool)
            left = active & ~now_in
            for i in np.nonzero(left)[0]:
                lo, hi = 0.0, 1.0
                for _ in range(40):
                    mid = 0.5 * (lo + hi)
                    r1, r2, r3, r4, r5 = rc[:, i]
                    ym = r1 + mid * (r2 + (1 - mid) * (r3 + mid * (r4 + (1 - mid) * r5)))
                    if bool(inside(ym[None])[0]):
                        lo = mid
                    else:
                        hi = mid
                exit_time[i] = t + lo * h
            active = active & now_in
        coeffs.append(rc)
        times.append(t_new)
        Ys.append(Ynew.copy())
        t = t_new
        Y = Ynew
        K1 = np.where(active[:, None], Kst[6], 0.0)
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= fac
    if not coeffs:
        rc = np.zeros((5, n, k))
        rc[0] = Y
        coeffs.append(rc)
        times.append(times[-1] + 1e-300)
        Ys.append(Y.copy())
    return BatchSolution(np.array(times), np.stack(Ys), np.stack(coeffs), exit_time, float(t_end))
