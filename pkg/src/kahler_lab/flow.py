"""Normalized potential-level Ricci flow on the projective model.

The flow evolved here is

    d/dt phi  =  log(w_phi^n / w^n) + phi - f,

with w the round reference (whose Ricci potential f vanishes), so the
round metric is an exact stationary point and the flow preserves the
class volume identically.

Explicit time stepping at full collocation resolution is hopeless -- the
spectral Laplacian carries eigenvalues growing like the fourth power of
the grid size -- so steps are taken in a fixed low-order coefficient
subspace: the right-hand side is evaluated exactly on the grid, the
update is projected onto the leading Chebyshev modes, and the potential
is re-centered to zero reference mean.  Within that subspace the explicit
step is stable for ordinary step sizes, and the stationary point stays
machine-exact.  A step that leaves the admissible cone is retried with a
halved (sticky) step size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotKahlerError, ParameterError, UnsupportedModelError
from .geometry import Background, make_metric
from .energies import e_k_closed

Array = np.ndarray


@dataclass
class FlowSample:
    t: float
    phi: Array
    energies: dict[int, float]
    min_ricci: float
    volume_defect: float


@dataclass
class FlowTrajectory:
    bg: Background
    samples: list[FlowSample] = field(default_factory=list)
    dt_final: float = 0.0
    halvings: int = 0
    steps: int = 0
    status: str = "completed"
    reason: str = ""

    @property
    def times(self) -> Array:
        return np.array([s.t for s in self.samples])

    def energy_series(self, k: int) -> Array:
        return np.array([s.energies[k] for s in self.samples])


def run_flow(bg: Background, phi0, dt: float = 1e-3, steps: int = 1000,
             modes: int = 24, sample_every: int = 25,
             energy_ks=None, max_halvings: int = 12) -> FlowTrajectory:
    """Integrate the normalized flow for `steps` accepted steps of size dt.

    Samples (potential, energies, curvature minimum, volume defect) every
    `sample_every` accepted steps and at both endpoints.  If the step size
    collapses entirely the trajectory is returned truncated, with the
    reason recorded, rather than raising.
    """
    if bg.model != "cpn":
        raise UnsupportedModelError("the normalized flow is for the projective model")
    if dt > 1e-3 + 1e-15:
        raise ParameterError(f"step size must not exceed 1e-3, got {dt}")
    if dt * steps > 10.0 + 1e-9:
        raise ParameterError("total flow time must not exceed 10")
    if energy_ks is None:
        energy_ks = [0, 1] if bg.n >= 1 else [0]

    phi = bg.lowpass(np.asarray(phi0, dtype=float), modes)
    phi = phi - bg.mean(phi)
    state = make_metric(bg, phi)

    traj = FlowTrajectory(bg)

    def record(t: float, phi_now: Array, state_now) -> None:
        energies = {k: e_k_closed(bg, phi_now, k) for k in energy_ks}
        vol = bg.integrate(state_now.rho)
        traj.samples.append(FlowSample(
            t, phi_now.copy(), energies, state_now.min_ricci,
            abs(vol - bg.volume) / bg.volume))

    record(0.0, phi, state)

    t = 0.0
    halvings = 0
    accepted = 0
    while accepted < steps:
        rhs = state.log_rho + phi
        candidate = bg.lowpass(phi + dt * rhs, modes)
        candidate = candidate - bg.mean(candidate)
        try:
            new_state = make_metric(bg, candidate)
        except NotKahlerError as exc:
            halvings += 1
            if halvings > max_halvings:
                traj.status = "truncated"
                traj.reason = f"step size collapsed after {max_halvings} halvings: {exc}"
                break
            dt *= 0.5  # sticky: stay at the smaller step from here on
            continue
        phi, state = candidate, new_state
        t += dt
        accepted += 1
        if accepted % sample_every == 0:
            record(t, phi, state)

    if traj.samples[-1].t < t - 1e-12 or accepted == 0:
        record(t, phi, state)
    traj.dt_final = dt
    traj.halvings = halvings
    traj.steps = accepted
    return traj
