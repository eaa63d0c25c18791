"""Monte Carlo integration of the rescaled motor-cargo system.

On the fast clock (unit = cargo relaxation time) the state
``(X_1..X_N, Z)`` obeys

    dX_i = eps g(s F_i) dt + sqrt(eps rho) dW_i
    dZ   = (sum_i F_i - theta) dt + dW_z

with ``F_i = X_i - Z`` for a linear tail, or ``Phi_i'(lam (X_i - Z)) / lam``
for a general one.  Each replica draws from its own PCG64 stream keyed by
``(seed, replica)``, so results do not depend on the number of workers.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import SimulationError
from .forcevelocity import ForceVelocityCurve
from .nondim import DimensionlessGroups, compute_groups
from .params import PhysicalParams
from .springs import SpringLaw

__all__ = [
    "SimConfig",
    "NondimSystem",
    "TrajectoryEnsemble",
    "TransportSummary",
    "integrate_system",
    "integrate_nondim",
    "estimate_transport",
    "stationary_samples",
    "write_trajectory_csv",
    "write_summary_json",
    "replica_rng",
    "MAX_DT",
    "MIN_WINDOW",
]

MAX_DT = 0.05
MIN_WINDOW = 100.0  # fast time units after burn-in
MIN_REPLICAS_FOR_SE = 8
TARGET_RECORDS = 1000

_REASONS = {_kernels.NONFINITE: "non-finite state", _kernels.DOMAIN_EXIT: "tail left its domain"}


@dataclass(frozen=True)
class SimConfig:
    """Time stepping and ensemble settings (all times on the fast clock).

    ``t_final=None`` means ``10/eps``.  ``record_stride=None`` picks a stride
    giving about 1000 stored states per replica.  ``initial_condition=None``
    puts every motor at 0 and the cargo at ``-theta/N``.
    """

    dt: float = 0.01
    t_final: Optional[float] = None
    burn_in: float = 0.1
    n_replicas: int = 64
    seed: int = 0
    record_stride: Optional[int] = None
    initial_condition: Optional[tuple] = None
    motor_noise: bool = True
    cargo_noise: bool = True
    workers: int = 1
    block: int = 1 << 16

    def __post_init__(self):
        if not 0 < self.dt <= MAX_DT:
            raise ValueError(f"dt must lie in (0, {MAX_DT}]")
        if not 0 <= self.burn_in < 1:
            raise ValueError("burn_in must lie in [0, 1)")
        if self.n_replicas < 1:
            raise ValueError("n_replicas must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.record_stride is not None and self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.t_final is not None and not self.t_final > 0:
            raise ValueError("t_final must be > 0")
        if self.workers < 1 or self.block < 1:
            raise ValueError("workers and block must be >= 1")

    def horizon(self, epsilon: float) -> float:
        if self.t_final is not None:
            return float(self.t_final)
        if not epsilon > 0:
            raise ValueError("t_final is required when epsilon = 0")
        return 10.0 / epsilon

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NondimSystem:
    """Parameters of the rescaled equations; ``epsilon = 0`` freezes the motor drift."""

    n_motors: int
    epsilon: float
    s: float
    rho: float
    theta_tilde: float = 0.0
    lam: float = 1.0
    length_ref: float = 1.0
    time_ref: float = 1.0

    @classmethod
    def from_groups(cls, groups: DimensionlessGroups, n_motors: int):
        return cls(n_motors, groups.epsilon, groups.s, groups.rho, groups.theta_tilde,
                   groups.lambda_ or 1.0, groups.length_ref, groups.time_ref)


@dataclass(eq=False)
class TrajectoryEnsemble:
    """Sampled paths ``paths[replica, k, :] = (X_1..X_N, Z)`` at times ``t[k]``.

    ``burn_states`` and ``final_states`` hold the exact states at the end of
    burn-in (``t_burn``) and at ``t_end``.
    """

    t: np.ndarray
    paths: np.ndarray
    burn_states: np.ndarray
    final_states: np.ndarray
    t_burn: float
    t_end: float
    system: NondimSystem
    config: SimConfig
    seed_keys: list = field(default_factory=list)

    @property
    def n_motors(self) -> int:
        return self.system.n_motors


@dataclass(frozen=True)
class TransportSummary:
    """Ensemble estimates of long-run velocity and diffusivity.

    Dimensional fields are nm/s and nm^2/s; ``velocity``/``diffusivity`` are
    on the slow clock.  Standard errors are ``nan`` when unavailable.
    """

    velocity_nm_s: float
    velocity_se: float
    diffusivity_nm2_s: float
    diffusivity_se: float
    velocity: float
    velocity_slow_se: float
    diffusivity: float
    diffusivity_slow_se: float
    displacements: np.ndarray
    elapsed: float
    effective_sample_size: int
    tracked: str

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "displacements"}
        out["displacements"] = [float(d) for d in self.displacements]
        return out


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Independent generator for one replica, fixed by ``(seed, replica)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(replica,))))


def _spring_kernel(law: Optional[SpringLaw]):
    if law is None or law.is_linear:
        return 0, np.zeros(1)
    code, params = law.kernel
    return int(code), np.asarray(params, dtype=float)


def _initial_state(system: NondimSystem, cfg: SimConfig) -> np.ndarray:
    n = system.n_motors
    if cfg.initial_condition is None:
        state = np.zeros(n + 1)
        state[n] = -system.theta_tilde / n
        return state
    state = np.asarray(cfg.initial_condition, dtype=float)
    if state.shape != (n + 1,):
        raise ValueError(f"initial_condition must have {n + 1} entries (X_1..X_N, Z)")
    return state.copy()


def _run_replica(r, system, cfg, gspec, sspec, n_steps, n_burn, stride, n_rec):
    n = system.n_motors
    rng = replica_rng(cfg.seed, r)
    gcode, gpar, gtab = gspec
    scode, spar = sspec
    eps, dt = system.epsilon, cfg.dt
    motor_scale = math.sqrt(eps * system.rho * dt) if cfg.motor_noise else 0.0
    cargo_scale = math.sqrt(dt) if cfg.cargo_noise else 0.0
    state = _initial_state(system, cfg)
    rec = np.empty((n_rec, n + 1))
    rec[0] = state
    fail = np.zeros(1, dtype=np.int64)
    burn = state.copy() if n_burn == 0 else None
    step = 0
    for stop in (n_burn, n_steps):
        while step < stop:
            m = min(cfg.block, stop - step)
            normals = rng.standard_normal((m, n + 1))
            status = _kernels.em_block(
                state, normals, dt, eps, system.s, system.theta_tilde, motor_scale, cargo_scale,
                gcode, gpar, gtab, scode, spar, system.lam, rec, step, stride, fail,
            )
            if status != _kernels.OK:
                raise SimulationError(r, int(fail[0]), state.copy(), _REASONS[status])
            step += m
        if stop == n_burn and burn is None:
            burn = state.copy()
    return rec, burn, state


def integrate_nondim(system: NondimSystem, curve: ForceVelocityCurve, cfg: SimConfig,
                     law: Optional[SpringLaw] = None) -> TrajectoryEnsemble:
    """Euler-Maruyama ensemble for a rescaled system.

    Raises :class:`~motorcargo.errors.SimulationError` when a replica
    produces a non-finite state or a tail leaves its domain.
    """
    t_end_req = cfg.horizon(system.epsilon)
    n_steps = max(1, int(round(t_end_req / cfg.dt)))
    n_burn = int(round(cfg.burn_in * n_steps))
    stride = cfg.record_stride or max(1, n_steps // TARGET_RECORDS)
    n_rec = n_steps // stride + 1
    gspec = curve.kernel_spec()
    sspec = _spring_kernel(law)

    def job(r):
        return _run_replica(r, system, cfg, gspec, sspec, n_steps, n_burn, stride, n_rec)

    replicas = range(cfg.n_replicas)
    if cfg.workers == 1:
        results = [job(r) for r in replicas]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(job, replicas))  # map keeps replica order
    paths = np.stack([res[0] for res in results])
    return TrajectoryEnsemble(
        t=np.arange(n_rec) * stride * cfg.dt,
        paths=paths,
        burn_states=np.stack([res[1] for res in results]),
        final_states=np.stack([res[2] for res in results]),
        t_burn=n_burn * cfg.dt,
        t_end=n_steps * cfg.dt,
        system=system,
        config=cfg,
        seed_keys=[(int(cfg.seed), r) for r in replicas],
    )


def integrate_system(p: PhysicalParams, curve: ForceVelocityCurve,
                     law: Optional[SpringLaw] = None, cfg: SimConfig = SimConfig()) -> TrajectoryEnsemble:
    """Simulate the parameter set ``p`` (``p.motor_count_N`` motors)."""
    groups = compute_groups(p, law)
    system = NondimSystem.from_groups(groups, p.motor_count_N)
    return integrate_nondim(system, curve, cfg, law)


def _variance_se(d: np.ndarray) -> float:
    # distribution-free standard error of the unbiased sample variance
    n = d.size
    c = d - d.mean()
    m2 = np.mean(c**2) * n / (n - 1)
    m4 = np.mean(c**4)
    return float(math.sqrt(max(m4 - (n - 3) / (n - 1) * m2**2, 0.0) / n))


def estimate_transport(ens: TrajectoryEnsemble, groups: Optional[DimensionlessGroups] = None,
                       min_window: float = MIN_WINDOW) -> TransportSummary:
    """Velocity and diffusivity from post-burn-in endpoint displacements.

    The tracked coordinate is the mean motor position (the motor itself for
    one motor, the midpoint for two).
    """
    elapsed = ens.t_end - ens.t_burn
    if elapsed < min_window:
        raise ValueError(f"post-burn-in window {elapsed:g} < {min_window:g} fast time units")
    n = ens.n_motors
    disp = ens.final_states[:, :n].mean(axis=1) - ens.burn_states[:, :n].mean(axis=1)
    R = disp.size
    sysm = ens.system
    length = groups.length_ref if groups is not None else sysm.length_ref
    tref = groups.time_ref if groups is not None else sysm.time_ref
    eps = groups.epsilon if groups is not None else sysm.epsilon

    v_fast = float(np.mean(disp)) / elapsed
    v_se_fast = float(np.std(disp, ddof=1)) / math.sqrt(R) / elapsed if R > 1 else math.nan
    if R > 1:
        d_fast = float(np.var(disp, ddof=1)) / (2 * elapsed)
        d_se_fast = _variance_se(disp) / (2 * elapsed) if R >= MIN_REPLICAS_FOR_SE else math.nan
    else:
        d_fast = d_se_fast = math.nan
    slow = (1.0 / eps) if eps > 0 else math.nan
    return TransportSummary(
        velocity_nm_s=v_fast * length / tref,
        velocity_se=v_se_fast * length / tref,
        diffusivity_nm2_s=d_fast * length**2 / tref,
        diffusivity_se=d_se_fast * length**2 / tref,
        velocity=v_fast * slow,
        velocity_slow_se=v_se_fast * slow,
        diffusivity=d_fast * slow,
        diffusivity_slow_se=d_se_fast * slow,
        displacements=disp,
        elapsed=elapsed,
        effective_sample_size=R,
        tracked={1: "X", 2: "M"}.get(n, "mean"),
    )


def stationary_samples(ens: TrajectoryEnsemble, kind: str) -> np.ndarray:
    """Recorded post-burn-in samples of ``Y = X - Z`` (one motor) or ``R = X1 - X2``."""
    keep = ens.t >= ens.t_burn
    block = ens.paths[:, keep, :]
    if kind == "Y":
        if ens.n_motors != 1:
            raise ValueError("Y samples need one motor")
        return (block[..., 0] - block[..., 1]).ravel()
    if kind == "R":
        if ens.n_motors != 2:
            raise ValueError("R samples need two motors")
        return (block[..., 0] - block[..., 1]).ravel()
    raise ValueError("kind must be 'Y' or 'R'")


def write_trajectory_csv(ens: TrajectoryEnsemble, replica: int, path, header: Optional[dict] = None):
    """One replica's recorded path with columns ``t_tilde, X1..XN, Z``."""
    path = Path(path)
    n = ens.n_motors
    with path.open("w", newline="") as fh:
        if header:
            fh.write(f"# {json.dumps(header, sort_keys=True, default=str)}\n")
        w = csv.writer(fh)
        w.writerow(["t_tilde", *[f"X{i + 1}" for i in range(n)], "Z"])
        for t, row in zip(ens.t, ens.paths[replica]):
            w.writerow([repr(float(t)), *[repr(float(v)) for v in row]])
    return path


def write_summary_json(summary: TransportSummary, ens: TrajectoryEnsemble, path,
                       groups: Optional[DimensionlessGroups] = None, extra: Optional[dict] = None):
    payload = {
        "config": ens.config.to_dict(),
        "system": asdict(ens.system),
        "groups": groups.to_dict() if groups is not None else None,
        "seeds": ens.seed_keys,
        "summary": summary.to_dict(),
    }
    if extra:
        payload.update(extra)
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str))
    return path
