"""Two Monge-Ampere continuity paths and their verification suites.

Both paths start from a radial reference metric w (potential `ref` over the
background) with normalized Ricci potential f, and are parametrized by
t in [0, 1]:

* the bending path          w_phi_t^n = e^{f - t phi_t} w^n,
  which deforms the Ricci condition Ric = t w_phi + (1-t) w and ends, when
  it reaches t = 1, at an Einstein metric;

* the prescribed-volume path  w_psi_t^n = e^{t f + c_t} w^n,
  which needs no iteration at all (each t is a monotone moment inversion)
  and ends at the metric whose Ricci form equals w.

The bending path is solved by damped fixed-point sweeps with a Newton
finisher on (Lap + t I); near t = 1 the linearization is genuinely
singular along the rotation direction and the Newton step switches to a
least-squares solve.  Failed steps trigger internal substepping; reported
points always stay on the requested uniform grid, and a path that cannot
reach the requested end is returned truncated with a stall record rather
than raising.

The verification suites turn the structural facts of these paths --
derivative identities, eigenvalue bounds, monotone quantities, endpoint
energy identities and inequalities -- into CheckItem rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.linalg

from .checks import CheckItem
from .errors import (
    GeneratorError,
    NotKahlerError,
    ParameterError,
    SolverError,
    UnsupportedModelError,
)
from .geometry import (
    Background,
    MetricState,
    laplacian,
    laplacian_matrix,
    make_metric,
    osc,
    potential_from_density,
    ricci_potential,
    slot_gradsq,
    slot_hessian,
    slot_metric,
    slot_ricci,
    wedge_density,
)
from .energies import e_k_closed, i_and_j, mu_k
from . import spectral

Array = np.ndarray


@dataclass
class PathPoint:
    t: float
    phi: Array          # reference-mean-zero representative
    c_t: float          # constant making phi + c_t solve the equation exactly
    state: MetricState
    iterations: int = 0
    residual: float = 0.0

    @property
    def phi_exact(self) -> Array:
        """The equation-exact potential (mean-zero part plus its constant)."""
        return self.phi + self.c_t


@dataclass
class Termination:
    status: str           # "completed" | "stalled"
    t_last: float
    reason: str = ""


@dataclass
class PathTrajectory:
    kind: str             # "bending" | "prescribed"
    bg: Background
    ref: Array
    f: Array
    points: list[PathPoint] = field(default_factory=list)
    termination: Termination | None = None

    @property
    def completed(self) -> bool:
        return self.termination is not None and self.termination.status == "completed"

    @property
    def ts(self) -> Array:
        return np.array([p.t for p in self.points])

    @property
    def dt(self) -> float:
        if len(self.points) < 2:
            raise SolverError("trajectory has fewer than two points")
        return self.points[1].t - self.points[0].t

    def stacked_exact(self) -> Array:
        return np.stack([p.phi_exact for p in self.points])

    def exact_rate(self) -> Array:
        """Time derivative of the equation-exact potential on the grid."""
        return spectral.fd_derivative(self.stacked_exact(), self.dt)


# ---------------------------------------------------------------------------
# first nonzero eigenvalue of the metric Laplacian


def lambda1_radial(state: MetricState, ritz_modes: int = 64) -> float:
    """Smallest nonzero eigenvalue of minus the Laplacian of the state.

    Rayleigh-Ritz on the symmetric Dirichlet form: stiffness D^T W D with
    the metric-weighted quadrature W and the state's volume weights as
    mass, both projected onto the span of the first `ritz_modes` smooth
    basis functions (Chebyshev in the moment coordinate, Fourier on the
    flat model).  Restricting to smooth trial functions excludes the
    grid's weight-degenerate directions -- the full-grid form is rank
    deficient near the coordinate pole -- while the smooth eigenfunctions
    of the reduced problem converge spectrally.  Constants lie in the
    trial space, so the projected pencil has exactly one zero eigenvalue
    and the first physical one is next.
    """
    bg = state.bg
    if bg.model == "cpn":
        wdiag = bg.ref_measure * bg.w0 * state.m_over_x ** (bg.n - 1)
        mass = bg.ref_measure * state.rho
    else:
        wdiag = bg.wq * np.ones(bg.size)
        mass = bg.wq * state.rho

    m = min(ritz_modes, bg.size // 2)
    if bg.model == "cpn":
        s = np.clip(2.0 * bg.x / bg.length - 1.0, -1.0, 1.0)
        theta = np.arccos(s)
        B = np.cos(theta[:, None] * np.arange(m)[None, :])
    else:
        j = np.arange(1, m // 2 + 1)
        ang = 2.0 * np.pi * bg.x[:, None] * j[None, :]
        B = np.hstack([np.ones((bg.size, 1)), np.cos(ang), np.sin(ang)])

    dB = bg.D @ B
    A_m = dB.T @ (wdiag[:, None] * dB)
    M_m = B.T @ (mass[:, None] * B)
    evals = scipy.linalg.eigh(
        0.5 * (A_m + A_m.T), 0.5 * (M_m + M_m.T), eigvals_only=True)
    return float(evals[1])


# ---------------------------------------------------------------------------
# the prescribed-volume path (direct inversion at every t)


def _ref_mean(bg: Background, values: Array, rho_ref: Array) -> float:
    return float((bg.ref_measure * rho_ref) @ values) / bg.volume


def solve_yau_path(bg: Background, ref, t_max: float = 1.0,
                   dt: float = 0.02) -> PathTrajectory:
    """Solve the prescribed-volume path on a uniform grid in t.

    Every point is a single monotone moment inversion; the path always
    completes.  Stored potentials have zero reference mean; the recorded
    c_t makes the volume identity exact.
    """
    theta = np.asarray(ref, dtype=float)
    ref_state = make_metric(bg, theta)
    f_pot, _ = ricci_potential(ref_state)
    f = f_pot.values

    traj = PathTrajectory("prescribed", bg, theta, f)
    steps = int(round(t_max / dt))
    for i in range(steps + 1):
        t = i * dt
        mass = float(bg.ref_measure @ (np.exp(t * f) * ref_state.rho))
        c_t = -np.log(mass / bg.volume)
        density = np.exp(t * f + c_t) * ref_state.rho
        total = potential_from_density(bg, density, polish=1)
        psi = total - theta
        psi = psi - _ref_mean(bg, psi, ref_state.rho)
        state = make_metric(bg, theta + psi)
        traj.points.append(PathPoint(t, psi, float(c_t), state))
    traj.termination = Termination("completed", traj.points[-1].t)
    return traj


# ---------------------------------------------------------------------------
# the bending path (fixed point + Newton, with substepping)


def _bending_residual(bg: Background, state: MetricState, phi_tilde: Array,
                      f: Array, log_rho_ref: Array, t: float) -> Array:
    return state.log_rho - log_rho_ref - f + t * phi_tilde


def _solve_bending_t(bg: Background, theta: Array, f: Array, ref_state,
                     t: float, guess: Array, *, picard_iters: int = 50,
                     newton_iters: int = 40, tol: float = 1e-11):
    """Solve the bending equation at fixed t > 0 from a warm start.

    Returns (phi_tilde, state, iterations, residual) or raises SolverError.
    """
    log_rho_ref = ref_state.log_rho
    phi = guess.copy()
    iters = 0
    beta = 0.5
    prev_step = np.inf
    for _ in range(picard_iters):
        iters += 1
        density = np.exp(f + log_rho_ref - t * phi)
        density *= bg.volume / float(bg.ref_measure @ density)
        total = potential_from_density(bg, density)
        candidate = total - theta
        # re-attach the constant the mass normalization absorbed
        mass = float(bg.ref_measure @ (np.exp(f - t * candidate) * ref_state.rho))
        candidate = candidate + np.log(mass / bg.volume) / t
        step = float(np.abs(candidate - phi).max())
        if step > prev_step:
            beta = max(0.05, 0.5 * beta)
        prev_step = step
        phi = (1.0 - beta) * phi + beta * candidate
        if step < 1e-4:
            break

    state = None
    for _ in range(newton_iters):
        try:
            state = make_metric(bg, theta + phi)
        except NotKahlerError as exc:
            raise SolverError(f"left the admissible cone during solve: {exc}", t=t)
        R = _bending_residual(bg, state, phi, f, log_rho_ref, t)
        res = float(np.abs(R).max())
        if res <= tol:
            return phi, state, iters, res
        iters += 1
        J = laplacian_matrix(state) + t * np.eye(bg.size)
        if t > 0.995:
            delta = np.linalg.lstsq(J, -R, rcond=1e-10)[0]
        else:
            delta = np.linalg.solve(J, -R)
        # backtrack if the full step leaves the admissible cone
        scale = 1.0
        for _ in range(8):
            try:
                make_metric(bg, theta + phi + scale * delta)
                break
            except NotKahlerError:
                scale *= 0.5
        else:
            raise SolverError("Newton step cannot stay admissible", t=t, residual=res)
        phi = phi + scale * delta

    raise SolverError("Newton did not converge", t=t, residual=res)


def solve_aubin_path(bg: Background, ref, t_max: float = 1.0, dt: float = 0.02,
                     min_substep: float = 1e-4) -> PathTrajectory:
    """March the bending path over a uniform reported grid in t.

    Internal substeps (not reported) bridge hard stretches; if progress
    stalls below `min_substep` the trajectory is returned truncated with a
    stall record.
    """
    theta = np.asarray(ref, dtype=float)
    ref_state = make_metric(bg, theta)
    f_pot, _ = ricci_potential(ref_state)
    f = f_pot.values
    rho_ref = ref_state.rho

    traj = PathTrajectory("bending", bg, theta, f)

    # t = 0: direct inversion; the constant is fixed by smooth continuation
    # (zero weighted mean of the exact potential against e^f w^n)
    density0 = np.exp(f) * rho_ref
    total0 = potential_from_density(bg, density0, polish=1)
    phi0 = total0 - theta
    phi0 = phi0 - _ref_mean(bg, phi0, rho_ref)
    weight = bg.ref_measure * np.exp(f) * rho_ref
    c0 = -float(weight @ phi0) / float(weight.sum())
    state0 = make_metric(bg, theta + phi0)
    traj.points.append(PathPoint(0.0, phi0, c0, state0))

    steps = int(round(t_max / dt))
    # (t_a, tilde_a) is the most recent solved point, (t_b, tilde_b) the one
    # before it; both feed the linear warm-start extrapolation
    t_a, tilde_a = 0.0, phi0 + c0
    t_b = tilde_b = None
    for i in range(1, steps + 1):
        t_target = i * dt
        sub = t_target - t_a
        while t_a < t_target - 1e-12:
            t_try = min(t_a + sub, t_target)
            if tilde_b is not None:
                slope = (tilde_a - tilde_b) / (t_a - t_b)
                guess = tilde_a + slope * (t_try - t_a)
            else:
                guess = tilde_a
            try:
                tilde_new, state, iters, res = _solve_bending_t(
                    bg, theta, f, ref_state, t_try, guess)
            except SolverError as exc:
                sub *= 0.5
                if sub < min_substep:
                    traj.termination = Termination(
                        "stalled", traj.points[-1].t,
                        f"no progress past t = {t_a:.6f}: {exc}")
                    return traj
                continue
            t_b, tilde_b = t_a, tilde_a
            t_a, tilde_a = t_try, tilde_new

        c_t = _ref_mean(bg, tilde_a, rho_ref)
        phi = tilde_a - c_t
        traj.points.append(PathPoint(t_target, phi, float(c_t), state, iters, res))

    traj.termination = Termination("completed", traj.points[-1].t)
    return traj


# ---------------------------------------------------------------------------
# positivity transport


def ricci_positive_generator(bg: Background, theta, alpha: float = 1.0) -> Array:
    """Push a potential toward positive Ricci curvature.

    One prescribed-volume step of size alpha turns the metric of `theta`
    into one whose Ricci form is the convex combination
    (1 - alpha) Ric(old) + alpha old-metric; at alpha = 1 the output Ricci
    form IS the input metric, hence strictly positive for any admissible
    input.  Raises GeneratorError if positivity unexpectedly degrades.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    state = make_metric(bg, np.asarray(theta, dtype=float))
    f_pot, _ = ricci_potential(state)
    density = np.exp(alpha * f_pot.values) * state.rho
    out = potential_from_density(bg, density, polish=2)
    out_state = make_metric(bg, out)
    before = state.min_ricci
    after = out_state.min_ricci
    if before >= 0.0 and after <= 0.0:
        raise GeneratorError("positivity was lost by the transport step", after)
    if alpha == 1.0 and after <= 0.0:
        raise GeneratorError("full step failed to reach positive curvature", after)
    return out


# ---------------------------------------------------------------------------
# monitors


def path_monitors(traj: PathTrajectory, ks=None) -> list[dict]:
    """Per-point scalar diagnostics: energies, I, J, first eigenvalue,
    curvature minimum.  Energies are relative to the path's own reference."""
    bg = traj.bg
    if ks is None:
        ks = range(bg.n + 1)
    rows = []
    for p in traj.points:
        row = {"t": p.t, "c_t": p.c_t}
        for k in ks:
            row[f"E_{k}"] = e_k_closed(bg, p.phi, k, ref=traj.ref)
        i_val, j_val, imj = i_and_j(bg, p.phi, ref=traj.ref)
        row["I"] = i_val
        row["J"] = j_val
        row["I_minus_J"] = imj
        row["lambda1_radial"] = lambda1_radial(p.state)
        row["min_ricci"] = p.state.min_ricci
        rows.append(row)
    return rows


def _simpson_uniform(values, dt: float) -> float:
    from scipy.integrate import simpson
    return float(simpson(np.asarray(values, dtype=float), dx=dt))


# ---------------------------------------------------------------------------
# verification suites


def check_lemma_3_4(bg: Background, traj: PathTrajectory, ks=None, *,
                    eq_rate_tol: float = 1e-5, eq_ricci_tol: float = 1e-6,
                    lambda1_slack: float = 1e-6, identity_tol: float = 1e-5,
                    monitors: list[dict] | None = None) -> list[CheckItem]:
    """Structural checks along the bending path.

    Covers the differentiated equation, the bent Ricci identity, the
    eigenvalue lower bound, the sign of the pairing integral, monotonicity
    of I - J, and the endpoint energy identity and inequality (the latter
    two only on a completed path).
    """
    if traj.kind != "bending":
        raise ParameterError("this suite applies to the bending path")
    if ks is None:
        ks = range(bg.n + 1)
    items: list[CheckItem] = []
    if monitors is None:
        monitors = path_monitors(traj, ks)
    ts = traj.ts
    dt = traj.dt
    tilde = traj.stacked_exact()
    rate = traj.exact_rate()

    # differentiated equation:  Lap (d/dt phi) = -t d/dt phi - phi.
    # The time derivative is exact to O(dt^4) but carries the solver's
    # per-point noise floor in its top coefficients; the rate of an
    # analytic-in-t path is smooth, so truncating the tail before the
    # Laplacian removes that noise without touching the identity.
    worst = 0.0
    for idx, p in enumerate(traj.points):
        smooth = bg.lowpass(rate[idx], min(64, bg.size // 2))
        lhs = laplacian(p.state, smooth)
        rhs = -p.t * smooth - tilde[idx]
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    items.append(CheckItem.identity(
        "rate_equation", "time derivative of the path equation",
        worst, 0.0, eq_rate_tol))

    # bent Ricci identity:  Ric_t = t w_t + (1-t) w, compared at the level
    # of the curvature moment map (one derivative below the eigenvalues,
    # where the solver residual is not amplified by differentiation)
    ref_state = make_metric(bg, traj.ref)
    worst = 0.0
    for p in traj.points:
        res_r = p.state.G - (p.t * p.state.m + (1.0 - p.t) * ref_state.m)
        worst = max(worst, float(np.abs(res_r).max()))
        if bg.n > 1:
            res_s = p.state.G_over_x - (
                p.t * p.state.m_over_x + (1.0 - p.t) * ref_state.m_over_x)
            worst = max(worst, float(np.abs(res_s).max()))
    items.append(CheckItem.identity(
        "bent_ricci_identity", "interpolated curvature along the path",
        worst, 0.0, eq_ricci_tol))

    # eigenvalue bound lambda_1 >= t
    lam_margin = min(row["lambda1_radial"] - row["t"] for row in monitors)
    items.append(CheckItem.lower_bound(
        "eigenvalue_bound", "first eigenvalue dominates the path parameter",
        lam_margin, 0.0, lambda1_slack))

    # pairing integral nonpositive:  (1/V) int phi (Lap d/dt phi) <= 0
    worst_pair = -np.inf
    for idx, p in enumerate(traj.points):
        lap_rate = laplacian(p.state, rate[idx])
        val = bg.integrate(tilde[idx] * lap_rate * p.state.rho) / bg.volume
        worst_pair = max(worst_pair, val)
    items.append(CheckItem.upper_bound(
        "pairing_sign", "nonpositive pairing of potential with its rate",
        worst_pair, 0.0, 1e-8))

    # I - J nondecreasing
    imj = np.array([row["I_minus_J"] for row in monitors])
    items.append(CheckItem.lower_bound(
        "i_minus_j_monotone", "I - J nondecreasing along the path",
        float(np.diff(imj).min()) if len(imj) > 1 else 0.0, 0.0, 1e-9))

    if traj.completed and abs(ts[-1] - 1.0) < 1e-12:
        # endpoint energy identity, one row per k
        for k in ks:
            e_start = e_k_closed(bg, traj.points[0].phi, k, ref=traj.ref)
            e_end = e_k_closed(bg, traj.points[-1].phi, k, ref=traj.ref)
            lhs = e_end - e_start

            integrand = np.empty(len(traj.points))
            for idx, p in enumerate(traj.points):
                lap_rate = laplacian(p.state, rate[idx])
                integrand[idx] = (1.0 - p.t) * bg.integrate(
                    tilde[idx] * lap_rate * p.state.rho)
            time_term = (k + 1) / bg.volume * _simpson_uniform(integrand, dt)

            p0 = traj.points[0]
            w_ref_slot = slot_metric(make_metric(bg, traj.ref))
            w_phi0 = slot_metric(p0.state)
            grad0 = slot_gradsq(bg, p0.phi)
            boundary = 0.0
            for i in range(k):
                slots = [grad0] + [w_ref_slot] * i + [w_phi0] * (bg.n - i - 1)
                boundary += (k - i) * bg.integrate(wedge_density(bg, slots))
            rhs = time_term - boundary / bg.volume

            scale = max(abs(e_start), abs(e_end))
            items.append(CheckItem.identity(
                f"endpoint_identity_k{k}",
                "energy drop equals weighted pairing integral minus start-point "
                "gradient terms",
                lhs, rhs, identity_tol, relative_to=scale))
            items.append(CheckItem.upper_bound(
                f"endpoint_monotone_k{k}",
                "energy at the far end does not exceed the start",
                e_end, e_start, identity_tol))
    else:
        items.append(CheckItem.info(
            "endpoint_identity_skipped", "path did not complete; endpoint "
            "rows need the full parameter range",
            traj.points[-1].t, note="stalled" if not traj.completed else "partial"))
    return items


def check_lemma_4_1(bg: Background, traj: PathTrajectory, ks=None, *,
                    eq_rate_tol: float = 1e-5, identity_tol: float = 1e-5,
                    endpoint_slack: float = 1e-7) -> list[CheckItem]:
    """Endpoint energy identity for the prescribed-volume path.

    The energy of the endpoint splits into two nonpositive gradient sums,
    a nonpositive squared-rate integral, and a reference-only term; for
    k = 1 the reference term is nonpositive too, giving the sign of the
    endpoint energy.
    """
    if traj.kind != "prescribed":
        raise ParameterError("this suite applies to the prescribed-volume path")
    if ks is None:
        ks = [k for k in (1, 2) if k <= bg.n]
    items: list[CheckItem] = []
    n = bg.n
    dt = traj.dt
    rate = traj.exact_rate()
    c_rate = spectral.fd_derivative(np.array([p.c_t for p in traj.points]), dt)

    # differentiated equation:  Lap (d/dt psi) = f + d/dt c_t (the rate is
    # tail-truncated before the Laplacian for the same reason as on the
    # bending path: the top coefficients carry only inversion noise)
    worst = 0.0
    for idx, p in enumerate(traj.points):
        smooth = bg.lowpass(rate[idx], min(64, bg.size // 2))
        lhs = laplacian(p.state, smooth)
        rhs = traj.f + c_rate[idx]
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    items.append(CheckItem.identity(
        "rate_equation", "time derivative of the prescribed-volume equation",
        worst, 0.0, eq_rate_tol))

    ref_state = make_metric(bg, traj.ref)
    w_ref = slot_metric(ref_state)
    f_hess = slot_hessian(bg, traj.f)
    end = traj.points[-1]
    w_end = slot_metric(end.state)
    grad_end = slot_gradsq(bg, end.phi)

    # squared-rate time integral (shared by every k)
    sq = np.empty(len(traj.points))
    for idx, p in enumerate(traj.points):
        lap_rate = laplacian(p.state, rate[idx])
        sq[idx] = (1.0 - p.t) * bg.integrate(lap_rate * lap_rate * p.state.rho)
    sq_integral = _simpson_uniform(sq, dt)

    q_end = []
    for i in range(n):
        slots = [grad_end] + [w_ref] * i + [w_end] * (n - i - 1)
        q_end.append(bg.integrate(wedge_density(bg, slots)))

    for k in ks:
        lhs = e_k_closed(bg, end.phi, k, ref=traj.ref)

        t1 = -sum((n - k) * (i + 1) / (n + 1) * q_end[i] for i in range(k))
        t2 = -sum((k + 1) * (n - i) / (n + 1) * q_end[i] for i in range(k, n))
        t3 = -(k + 1) * sq_integral
        t4 = 0.0
        for i in range(1, k + 1):
            slots = [f_hess] * i + [w_ref] * (n - i)
            t4 += comb(k + 1, i + 1) * bg.integrate(
                traj.f * wedge_density(bg, slots))
        rhs = (t1 + t2 + t3 + t4) / bg.volume

        items.append(CheckItem.identity(
            f"endpoint_identity_k{k}",
            "endpoint energy equals gradient sums plus squared-rate integral "
            "plus reference term",
            lhs, rhs, identity_tol, relative_to=lhs))
        if k == 1:
            items.append(CheckItem.upper_bound(
                "endpoint_sign_k1", "endpoint energy nonpositive at k = 1",
                lhs, 0.0, endpoint_slack))
    return items


def check_section5(bg: Background, theta, aubin: PathTrajectory,
                   yau: PathTrajectory, *, identity_tol: float = 1e-5,
                   bound_slack: float = 1e-7, t_pair=(0.2, 0.8),
                   monitors: list[dict] | None = None) -> list[CheckItem]:
    """Growth-control suite built on both paths from the same reference.

    Includes the exact two-time energy identity, the bridge identity
    expressing the background-relative energy of the reference potential
    through both paths, lower/upper growth bounds along the way, and the
    boundedness monitor for the k = 1 energy.
    """
    theta = np.asarray(theta, dtype=float)
    items: list[CheckItem] = []
    n = bg.n
    if monitors is None:
        monitors = path_monitors(aubin, ks=[1])
    ts = aubin.ts
    dt = aubin.dt
    imj = np.array([row["I_minus_J"] for row in monitors])
    e1_path = np.array([row["E_1"] for row in monitors])

    items.append(CheckItem.lower_bound(
        "path_reach", "bending path advances beyond t = 0.9",
        float(ts[-1]), 0.9, 0.0))

    # gradient-square boundary quantity (1/V) int gradsq(phi_t) ^ w_t^{n-1}
    def grad_term(p: PathPoint) -> float:
        slots = [slot_gradsq(bg, p.phi)] + [slot_metric(p.state)] * (n - 1)
        return bg.integrate(wedge_density(bg, slots)) / bg.volume

    # two-time identity for the k = 1 energy
    i1 = int(round(t_pair[0] / dt))
    i2 = int(round(t_pair[1] / dt))
    if i2 < len(aubin.points):
        pa, pb = aubin.points[i1], aubin.points[i2]
        lhs = e1_path[i2] - e1_path[i1]
        rhs = (-2.0 * (1.0 - pb.t) * imj[i2] + 2.0 * (1.0 - pa.t) * imj[i1]
               - 2.0 * _simpson_uniform(imj[i1:i2 + 1], dt)
               + (1.0 - pb.t) ** 2 * grad_term(pb)
               - (1.0 - pa.t) ** 2 * grad_term(pa))
        items.append(CheckItem.identity(
            "two_time_identity",
            "energy increment between two path times matches its closed form",
            lhs, rhs, identity_tol, relative_to=max(abs(lhs), abs(e1_path[i2]))))
    else:
        items.append(CheckItem.info(
            "two_time_identity_skipped",
            "path too short for the requested time pair", float(ts[-1])))

    # lower bound by the accumulated I - J integral (valid on any range)
    e1_theta = e_k_closed(bg, theta, 1)
    partial = _simpson_uniform(imj, dt)
    items.append(CheckItem.lower_bound(
        "energy_vs_accumulated_imj",
        "background-relative energy dominates twice the accumulated I - J",
        e1_theta, 2.0 * partial, bound_slack,
        note="" if aubin.completed else "partial range (valid: integrand >= 0)"))
    items.append(CheckItem.info(
        "accumulated_imj", "value of the accumulated I - J integral", partial))

    # bridge identity through both paths (needs the complete bending path)
    if aubin.completed and abs(ts[-1] - 1.0) < 1e-12:
        rate = yau.exact_rate()
        sq = np.empty(len(yau.points))
        for idx, p in enumerate(yau.points):
            lap_rate = laplacian(p.state, rate[idx])
            sq[idx] = (1.0 - p.t) * bg.integrate(lap_rate * lap_rate * p.state.rho)
        sq_integral = _simpson_uniform(sq, yau.dt)

        ref_state = make_metric(bg, theta)
        w_ref = slot_metric(ref_state)
        f_hess = slot_hessian(bg, yau.f)
        d_term = 0.0
        for i in range(1, 2):
            slots = [f_hess] * i + [w_ref] * (n - i)
            d_term += comb(2, i + 1) * bg.integrate(
                yau.f * wedge_density(bg, slots))
        rhs = 2.0 * partial + 2.0 * sq_integral / bg.volume - d_term / bg.volume
        items.append(CheckItem.identity(
            "bridge_identity",
            "background-relative energy through both paths",
            e1_theta, rhs, identity_tol, relative_to=max(1.0, abs(e1_theta))))

        # decay bound from a late time onward, and oscillation control
        end = aubin.points[-1]
        imj_end = imj[-1]
        worst_decay = -np.inf
        worst_tail = -np.inf
        ratio = 0.0
        for idx, p in enumerate(aubin.points):
            if p.t < 0.5 - 1e-12:
                continue
            # E_1 between the endpoint metric and the time-t metric
            e_between = e_k_closed(bg, p.phi - end.phi, 1,
                                   ref=theta + end.phi)
            tail = 2.0 * _simpson_uniform(imj[idx:], dt) if idx < len(imj) - 1 else 0.0
            worst_tail = max(worst_tail, e_between - tail)
            worst_decay = max(
                worst_decay,
                e_between - 2.0 * n * (1.0 - p.t) * imj_end)
            o = osc(p.phi_exact - end.phi_exact)
            j_between = i_and_j(bg, p.phi - end.phi, ref=theta + end.phi)[1]
            ratio = max(ratio, o / (1.0 + j_between))
        items.append(CheckItem.upper_bound(
            "late_energy_vs_tail",
            "late-time energy to the endpoint bounded by the tail integral",
            worst_tail, 0.0, bound_slack))
        items.append(CheckItem.upper_bound(
            "late_energy_decay",
            "late-time energy to the endpoint decays linearly in 1 - t",
            worst_decay, 0.0, bound_slack))
        items.append(CheckItem.info(
            "oscillation_ratio",
            "largest oscillation of the gap over 1 + J of the gap", ratio))
        items.append(CheckItem.info(
            "endpoint_imj_vs_reference_j",
            "I - J at the endpoint minus J of the reference potential "
            "(drift diagnostic)",
            imj_end - i_and_j(bg, theta)[1]))

        # accumulated integral versus endpoint I - J and oscillation
        worst_gap = -np.inf
        full = _simpson_uniform(imj, dt)
        for idx, p in enumerate(aubin.points):
            o = osc(p.phi_exact - end.phi_exact)
            bound = (1.0 - p.t) * imj_end - 2.0 * n * (1.0 - p.t) * o
            worst_gap = max(worst_gap, bound - full)
        items.append(CheckItem.upper_bound(
            "integral_vs_endpoint",
            "accumulated I - J dominates its endpoint lower bound",
            worst_gap, 0.0, bound_slack))
    else:
        items.append(CheckItem.info(
            "bridge_identity_skipped",
            "bending path did not complete; bridge rows need the endpoint",
            float(ts[-1])))

    # boundedness monitor for the k = 1 energy along the path
    p0 = aubin.points[0]
    cap0 = e1_path[0] + 2.0 * imj[0] - grad_term(p0)
    worst_cap = -np.inf
    for idx in range(len(aubin.points)):
        running = _simpson_uniform(imj[:idx + 1], dt) if idx > 0 else 0.0
        worst_cap = max(worst_cap, e1_path[idx] - (cap0 - 2.0 * running))
    items.append(CheckItem.upper_bound(
        "energy_bounded_above",
        "k = 1 energy stays under its start-time cap along the path",
        worst_cap, 0.0, bound_slack))
    return items
