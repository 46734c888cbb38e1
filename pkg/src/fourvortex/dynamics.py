"""Direct integration of the point-vortex equations for verifying relative equilibria."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CollisionError, DomainError
from .model import PlanarConfiguration, SolutionRecord, Vorticities

DEFAULT_TOL = 1e-10
COLLISION_TOL = 1e-6


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray          # (n,)
    states: np.ndarray         # (n, N, 2)
    invariant_series: dict     # H, I: (n,); M: (n, 2)

    def __len__(self):
        return len(self.times)


def velocity(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Right-hand side: xdot_i = -J sum_j G_j (x_i - x_j) / r_ij^2."""
    d = x[:, None, :] - x[None, :, :]
    r2 = np.sum(d * d, axis=-1)
    np.fill_diagonal(r2, np.inf)
    w = (g[None, :] / r2)[..., None] * d
    v = w.sum(axis=1)
    # -J (a, b) = (-b, a)
    return np.stack([-v[:, 1], v[:, 0]], axis=1)


def invariants(states: np.ndarray, g: np.ndarray) -> dict:
    """H, I = 1/2 sum G |x|^2 and M = sum G x for each sampled state."""
    if states.ndim == 2:
        states = states[None]
    n = len(g)
    iu, ju = np.triu_indices(n, 1)
    d = states[:, iu, :] - states[:, ju, :]
    r2 = np.sum(d * d, axis=-1)
    H = -0.5 * np.sum(g[iu] * g[ju] * np.log(r2), axis=1)
    I = 0.5 * np.sum(g * np.sum(states**2, axis=-1), axis=1)
    M = np.einsum("j,njk->nk", g, states)
    return {"H": H, "I": I, "M": M}


def _min_distance(x: np.ndarray) -> float:
    n = len(x)
    iu, ju = np.triu_indices(n, 1)
    return float(np.sqrt(np.min(np.sum((x[iu] - x[ju]) ** 2, axis=-1))))


def integrate_positions(x0: np.ndarray, strengths, T: float, *, tol: float = DEFAULT_TOL,
                        samples: int = 201, collision_tol: float = COLLISION_TOL,
                        stop=None) -> Trajectory:
    """Integrate any number of vortices over [0, T] with DOP853.

    ``stop(t, x) -> float`` is an optional terminal event; integration ends
    where it crosses zero and the trajectory is truncated there.
    """
    x0 = np.asarray(x0, dtype=float)
    g = np.asarray(strengths, dtype=float)
    n = len(g)
    if x0.shape != (n, 2):
        raise DomainError(f"expected positions of shape ({n}, 2), got {x0.shape}")
    if T <= 0:
        raise DomainError("integration horizon must be positive")
    scale = _min_distance(x0)
    if scale <= collision_tol:
        raise CollisionError("initial configuration is already at collision", x0)

    def rhs(_t, y):
        return velocity(y.reshape(n, 2), g).ravel()

    def near_collision(_t, y):
        return _min_distance(y.reshape(n, 2)) - collision_tol * scale

    near_collision.terminal = True
    events = [near_collision]
    if stop is not None:
        def user_stop(t, y):
            return stop(t, y.reshape(n, 2))
        user_stop.terminal = True
        events.append(user_stop)
    t_eval = np.linspace(0.0, T, samples)
    sol = solve_ivp(rhs, (0.0, T), x0.ravel(), method="DOP853", rtol=tol, atol=tol * scale,
                    t_eval=t_eval, events=events)
    if sol.status == -1 or (sol.status == 1 and sol.t_events[0].size):
        last = sol.y[:, -1].reshape(n, 2) if sol.y.size else x0
        raise CollisionError(f"integration stopped at t={sol.t[-1] if sol.t.size else 0.0:.6g}: {sol.message}",
                             last)
    times, states = sol.t, sol.y.T.reshape(-1, n, 2)
    if sol.status == 1:
        times = np.append(times, sol.t_events[1][0])
        states = np.concatenate([states, sol.y_events[1][0].reshape(1, n, 2)])
    return Trajectory(times, states, invariants(states, g))


def integrate_flow(config: PlanarConfiguration, gammas: Vorticities, T: float, tol: float = DEFAULT_TOL,
                   *, samples: int = 201, stop=None) -> Trajectory:
    return integrate_positions(config.positions, gammas.strengths, T, tol=tol, samples=samples, stop=stop)


def rotation_period(lam: float) -> float:
    return 2 * math.pi / abs(lam)


def rotated(x0: np.ndarray, c: np.ndarray, lam: float, t: float) -> np.ndarray:
    """c + exp(-J lam t)(x0 - c), a counterclockwise turn by lam t."""
    ct, st = math.cos(lam * t), math.sin(lam * t)
    R = np.array([[ct, -st], [st, ct]])
    return c + (x0 - c) @ R.T


def rigid_rotation_error(record: SolutionRecord, T: float | None = None, *, tol: float = DEFAULT_TOL,
                         lam: float | None = None, samples: int = 201, abort_above: float | None = None) -> float:
    """Max deviation of the integrated motion from the predicted rigid rotation.

    Relative equilibria default to one period; equilibria default to T = 10
    and compare against the frozen initial positions. With ``abort_above``
    the run stops once the deviation reaches that bound and the return value
    is at least ``abort_above``: a lower bound on the full-horizon error.
    """
    pos = record.positions
    lam = record.angular_velocity if lam is None else lam
    c = pos.center if pos.center is not None else record.gammas.array @ pos.positions / record.gammas.total
    if T is None:
        T = 10.0 if lam == 0 else rotation_period(lam)
    x0 = pos.positions

    def deviation(t, x):
        return float(np.max(np.linalg.norm(x - rotated(x0, c, lam, t), axis=1)))

    stop = None if abort_above is None else (lambda t, x: abort_above - deviation(t, x))
    traj = integrate_flow(pos, record.gammas, T, tol, samples=samples, stop=stop)
    err = max(deviation(t, x) for t, x in zip(traj.times, traj.states))
    if abort_above is not None and traj.times[-1] < T:
        err = max(err, abort_above)
    return err


def rotating_frame_growth_rate(record: SolutionRecord, h: float = 1e-7) -> float:
    """Largest real part of the linearized flow in the co-rotating frame.

    Round-off of size eps is amplified roughly by exp(rate * T), which bounds
    how well any double-precision integration can track an unstable record.
    """
    x0 = record.positions.positions
    g = record.gammas.array
    lam = record.angular_velocity
    c = record.positions.center
    n = len(g)

    def f(y):
        y = y.reshape(n, 2)
        rot = lam * (y - c)
        return (velocity(y, g) + np.stack([rot[:, 1], -rot[:, 0]], axis=1)).ravel()

    A = np.empty((2 * n, 2 * n))
    for k in range(2 * n):
        e = np.zeros(2 * n)
        e[k] = h
        A[:, k] = (f(x0.ravel() + e) - f(x0.ravel() - e)) / (2 * h)
    return float(np.max(np.linalg.eigvals(A).real))


def conservation_drift(traj: Trajectory, gammas: Vorticities | None = None) -> dict:
    """Max absolute drift of H, I and |M| relative to the first sample."""
    inv = traj.invariant_series
    return {
        "dH": float(np.max(np.abs(inv["H"] - inv["H"][0]))),
        "dI": float(np.max(np.abs(inv["I"] - inv["I"][0]))),
        "dM": float(np.max(np.linalg.norm(inv["M"] - inv["M"][0], axis=1))),
    }


def frozen_trajectory(config: PlanarConfiguration, gammas: Vorticities) -> Trajectory:
    states = config.positions[None].copy()
    return Trajectory(np.zeros(1), states, invariants(states, gammas.array))


def swept_angle(traj: Trajectory, i: int, c) -> float:
    """Signed, unwrapped angle swept by vortex i about c over the trajectory."""
    d = traj.states[:, i, :] - np.asarray(c)
    ang = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    return float(ang[-1] - ang[0])


def two_vortex_state(d: float, t: float, g1: float = 1.0, g2: float = 1.0) -> np.ndarray:
    """Exact positions of two vortices started on the x-axis a distance d apart."""
    x0 = np.array([[0.0, 0.0], [d, 0.0]])
    c = np.array([g2 * d / (g1 + g2), 0.0])
    return rotated(x0, c, (g1 + g2) / d**2, t)
