"""First-order finite-volume simulator for the 1-D moment systems.

Transport uses upwind kinetic flux splitting built from half-Gaussian
moments; collisions use the exact exponential relaxation per cell.  The
public per-cell operations (`kinetic_flux_*`, `collision_step`) are the
reference implementations; the run loop dispatches to private vectorized
kernels that are cross-checked against them in the test suite.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.special import erfc

from .errors import DomainError, RealizabilityError
from .inversion import EqmomState, NodeSet
from .polykit import gaussian_moment, half_gaussian_moment
from .stability import MacroState, macro_from_moments, maxwellian_moments


@dataclass(frozen=True)
class SimConfig:
    """Riemann-problem run description; mirrors the flat JSON config schema."""

    closure: str = "eqmom"  # "eqmom" or "qmom"
    n: int = 2
    x_lo: float = -1.0
    x_hi: float = 1.0
    cells: int = 1000
    cfl: float = 0.45
    t_end: float = 0.1
    kappa: float = 0.0  # collision strength, nu = kappa * rho; inf allowed
    rho_l: float = 1.0
    u_l: float = 1.0
    theta_l: float = 1.0 / 3.0
    rho_r: float = 1.0
    u_r: float = -1.0
    theta_r: float = 1.0 / 3.0
    snapshots: int = 1  # evenly spaced snapshot times up to t_end
    output_dir: str = "out"
    label: str = "riemann"

    def __post_init__(self):
        if self.closure not in ("eqmom", "qmom"):
            raise DomainError(f"closure must be 'eqmom' or 'qmom', got {self.closure!r}")
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.cells < 2:
            raise DomainError("cells must be >= 2")
        if not (0.0 < self.cfl < 1.0):
            raise DomainError("cfl must lie in (0, 1)")
        if self.x_hi <= self.x_lo:
            raise DomainError("x_hi must exceed x_lo")
        if self.t_end < 0:
            raise DomainError("t_end must be nonnegative")
        if self.kappa < 0:
            raise DomainError("kappa must be nonnegative")
        if self.snapshots < 1:
            raise DomainError("snapshots must be >= 1")

    @property
    def k_max(self) -> int:
        """Index of the highest transported moment."""
        return 2 * self.n if self.closure == "eqmom" else 2 * self.n - 1

    @property
    def left(self) -> MacroState:
        return MacroState(self.rho_l, self.u_l, self.theta_l)

    @property
    def right(self) -> MacroState:
        return MacroState(self.rho_r, self.u_r, self.theta_r)

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.kappa):
            d["kappa"] = "inf"
        return d

    @staticmethod
    def from_dict(data: dict) -> "SimConfig":
        data = dict(data)
        if str(data.get("kappa", 0)).lower() in ("inf", "infinity"):
            data["kappa"] = math.inf
        known = set(SimConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return SimConfig(**data)

    @staticmethod
    def from_file(path, overrides: dict | None = None) -> "SimConfig":
        with open(path) as f:
            data = json.load(f)
        if overrides:
            data.update(overrides)
        return SimConfig.from_dict(data)


@dataclass
class FieldState:
    """Cell-centered moment field at one instant."""

    x: np.ndarray  # cell centers, shape (cells,)
    moments: np.ndarray  # shape (cells, k_max + 1)
    time: float


@dataclass
class RunResult:
    snapshots: list  # of FieldState
    manifest: dict
    csv_paths: list = field(default_factory=list)
    manifest_path: str | None = None

    @property
    def final(self) -> FieldState:
        return self.snapshots[-1]


# ---------------------------------------------------------------------------
# Reference (per-cell) operations
# ---------------------------------------------------------------------------

def kinetic_flux_eqmom(state: EqmomState, k_max: int):
    """Split flux moments of the Gaussian mixture about velocity zero.

    Returns (F_minus, F_plus): F_plus_j integrates xi^{j+1} f over xi > 0,
    F_minus over xi < 0, so their sum is the full flux moment M_{j+1}.
    """
    if state.sigma2 <= 0:
        raise DomainError("kinetic flux requires positive variance")
    w = state.nodes.weights
    u = state.nodes.abscissas
    f_plus = np.array(
        [
            sum(wi * half_gaussian_moment(j + 1, ui, state.sigma2, 0.0, "above") for wi, ui in zip(w, u))
            for j in range(k_max + 1)
        ]
    )
    f_minus = np.array(
        [
            sum(wi * half_gaussian_moment(j + 1, ui, state.sigma2, 0.0, "below") for wi, ui in zip(w, u))
            for j in range(k_max + 1)
        ]
    )
    return f_minus, f_plus


def kinetic_flux_qmom(ns: NodeSet, k_max: int):
    """Split flux moments of the delta mixture about velocity zero.

    A node exactly at zero is assigned to the plus flux (where it
    contributes nothing anyway since the integrand carries xi^{j+1}).
    """
    w = np.asarray(ns.weights)
    u = np.asarray(ns.abscissas)
    up = u >= 0.0
    f_plus = np.array([np.sum(w[up] * u[up] ** (j + 1)) for j in range(k_max + 1)])
    f_minus = np.array([np.sum(w[~up] * u[~up] ** (j + 1)) for j in range(k_max + 1)])
    return f_minus, f_plus


def collision_step(m, nu: float, dt: float) -> np.ndarray:
    """Exact exponential relaxation toward the local Maxwellian moments.

    M(t+dt) = E + exp(-nu*dt) (M - E); conserves M_0, M_1, M_2 exactly.
    """
    m = np.asarray(m, dtype=float)
    if nu < 0 or dt < 0:
        raise DomainError("nu and dt must be nonnegative")
    mac = macro_from_moments(m)
    e = maxwellian_moments(mac.rho, mac.U, mac.theta, len(m) - 1)
    decay = 0.0 if math.isinf(nu) or math.isinf(dt) else math.exp(-nu * dt)
    out = e + decay * (m - e)
    out[:3] = m[:3]
    return out


def free_streaming_reference(x: float, t: float, left: MacroState, right: MacroState) -> MacroState:
    """Exact collisionless solution of the two-Maxwellian Riemann problem.

    Particles travel ballistically, so the distribution at (t, x) is the left
    Maxwellian restricted to xi > x/t plus the right one restricted to
    xi < x/t; the first four moments convert back to macroscopic fields.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    if t == 0.0:
        return left if x < 0 else right
    cut = x / t
    m = np.array(
        [
            left.rho * half_gaussian_moment(j, left.U, left.theta, cut, "above")
            + right.rho * half_gaussian_moment(j, right.U, right.theta, cut, "below")
            for j in range(4)
        ]
    )
    return macro_from_moments(m)


def free_streaming_density(x, t: float, left: MacroState, right: MacroState) -> np.ndarray:
    """Density of the free-streaming solution on an array of positions."""
    x = np.asarray(x, dtype=float)
    if t == 0.0:
        return np.where(x < 0, left.rho, right.rho)
    cut = x / t
    above = _half_moment_batch(0, np.full_like(cut, left.U), left.theta, cut)[0]
    below = 1.0 - _half_moment_batch(0, np.full_like(cut, right.U), right.theta, cut)[0]
    return left.rho * above + right.rho * below


def delta_shock_metric(fields: FieldState, left: MacroState, right: MacroState) -> float:
    """Peak cell density relative to the exact collisionless density there."""
    rho = fields.moments[:, 0]
    i = int(np.argmax(rho))
    ref = free_streaming_reference(float(fields.x[i]), fields.time, left, right)
    return float(rho[i] / ref.rho)


# ---------------------------------------------------------------------------
# Vectorized kernels (cell axis first); cross-checked against the scalar
# reference implementations in the test suite.
# ---------------------------------------------------------------------------

def _gaussian_moment_batch(j_max: int, u: np.ndarray, sigma2) -> np.ndarray:
    """Moments 0..j_max of Gaussians; output shape (j_max+1,) + u.shape."""
    out = np.empty((j_max + 1,) + u.shape)
    out[0] = 1.0
    if j_max >= 1:
        out[1] = u
    for j in range(2, j_max + 1):
        out[j] = u * out[j - 1] + (j - 1) * sigma2 * out[j - 2]
    return out


def _half_moment_batch(j_max: int, u: np.ndarray, sigma2, cut) -> np.ndarray:
    """Half moments over xi > cut, orders 0..j_max; shape (j_max+1,) + u.shape."""
    sigma2 = np.broadcast_to(np.asarray(sigma2, dtype=float), u.shape)
    cut = np.broadcast_to(np.asarray(cut, dtype=float), u.shape)
    sigma = np.sqrt(sigma2)
    z = (cut - u) / (sigma * math.sqrt(2.0))
    i0 = 0.5 * erfc(z)
    phi = np.exp(-((cut - u) ** 2) / (2.0 * sigma2)) / (sigma * math.sqrt(2.0 * math.pi))
    out = np.empty((j_max + 1,) + u.shape)
    out[0] = i0
    prev, cur = np.zeros_like(i0), i0
    for k in range(j_max):
        prev, cur = cur, u * cur + sigma2 * cut**k * phi + k * sigma2 * prev
        out[k + 1] = cur
    return out


def _deconvolve_batch(m: np.ndarray, sigma2: np.ndarray) -> np.ndarray:
    """Per-cell Gaussian deblur of moment rows; m (C, J+1), sigma2 (C,)."""
    j_top = m.shape[1] - 1
    out = np.empty_like(m)
    half = -0.5 * sigma2
    for j in range(j_top + 1):
        acc = np.zeros(m.shape[0])
        coeff = 1.0
        power = np.ones(m.shape[0])
        for k in range(j // 2 + 1):
            if k > 0:
                coeff *= (j - 2 * k + 2) * (j - 2 * k + 1) / k
                power *= half
            acc += coeff * power * m[:, j - 2 * k]
        out[:, j] = acc
    return out


def _wheeler_batch(m: np.ndarray, n: int, need_defect: bool = False):
    """Vectorized moment-to-recurrence (Chebyshev) construction.

    m has shape (C, >= 2n); returns (alpha, beta, ok) with shapes (C, n),
    (C, n), (C,).  With need_defect (requires 2n+1 moments) also returns the
    squared norm of the n-th monic orthogonal polynomial, which equals the
    gap between the true and quadrature-predicted moment of order 2n.
    """
    cells = m.shape[0]
    width = 2 * n + 1 if need_defect else 2 * n
    sigma_prev = np.zeros((cells, width))
    sigma_cur = np.array(m[:, :width], dtype=float)
    alpha = np.zeros((cells, n))
    beta = np.zeros((cells, n))
    ok = m[:, 0] > 0
    m0 = np.where(ok, m[:, 0], 1.0)
    alpha[:, 0] = m[:, 1] / m0
    beta[:, 0] = m[:, 0]
    k_top = n + 1 if need_defect else n
    defect = None
    for k in range(1, k_top):
        nxt = np.zeros((cells, width))
        lo, hi = k, width - k
        nxt[:, lo:hi] = (
            sigma_cur[:, lo + 1 : hi + 1]
            - alpha[:, k - 1 : k] * sigma_cur[:, lo:hi]
            - beta[:, k - 1 : k] * sigma_prev[:, lo:hi]
        )
        if k == n:
            defect = nxt[:, n].copy()
            break
        pivot_ok = (nxt[:, k] > 0) & np.isfinite(nxt[:, k])
        ok &= pivot_ok
        safe_pivot = np.where(pivot_ok, nxt[:, k], 1.0)
        safe_prev = np.where(ok, sigma_cur[:, k - 1], 1.0)
        alpha[:, k] = np.where(ok, nxt[:, k + 1] / safe_pivot - sigma_cur[:, k] / safe_prev, 0.0)
        beta[:, k] = np.where(ok, safe_pivot / safe_prev, 0.0)
        sigma_prev, sigma_cur = sigma_cur, nxt
    if need_defect:
        return alpha, beta, ok, defect
    return alpha, beta, ok


def _nodes_from_recurrence(m0: np.ndarray, alpha: np.ndarray, beta: np.ndarray):
    """Batched Golub-Welsch: weights and abscissas from Jacobi matrices."""
    cells, n = alpha.shape
    if n == 1:
        return m0[:, None].copy(), alpha.copy()
    off = np.sqrt(np.maximum(beta[:, 1:], 0.0))
    J = np.zeros((cells, n, n))
    idx = np.arange(n)
    J[:, idx, idx] = alpha
    J[:, idx[:-1], idx[1:]] = off
    J[:, idx[1:], idx[:-1]] = off
    vals, vecs = np.linalg.eigh(J)
    weights = m0[:, None] * vecs[:, 0, :] ** 2
    return weights, vals


def _qmom_invert_batch(m: np.ndarray):
    """Vectorized delta-mixture inversion; m (C, 2N). Returns (w, u, ok)."""
    n = m.shape[1] // 2
    alpha, beta, ok = _wheeler_batch(m, n)
    w, u = _nodes_from_recurrence(np.where(ok, m[:, 0], 1.0), alpha, beta)
    ok &= np.all(w > 0, axis=1)
    return w, u, ok


def _eqmom_invert_batch(m: np.ndarray, iters: int = 70):
    """Vectorized Gaussian-mixture inversion of moment rows (C, 2N+1).

    The shared variance is found per cell with fixed-iteration bisection on
    the closure defect over [0, theta]; the defect is read directly off the
    Chebyshev sigma-table of the deconvolved moments, and nonrealizable
    deconvolutions count as overshooting.  Returns (w, u, sigma2, ok).
    """
    cells, width = m.shape
    n = (width - 1) // 2
    theta = m[:, 2] / m[:, 0] - (m[:, 1] / m[:, 0]) ** 2
    ok = (m[:, 0] > 0) & (theta > 0)
    theta_safe = np.where(ok, theta, 1.0)

    if n == 1:
        w = m[:, :1].copy()
        u = (m[:, 1] / m[:, 0])[:, None]
        return w, u, theta_safe, ok

    def defect_sign(sigma2):
        star = _deconvolve_batch(m, sigma2)
        _, _, realizable, defect = _wheeler_batch(star, n, need_defect=True)
        # nonpositive defect or a broken pivot means sigma2 is too large
        return realizable & (defect > 0)

    lo = np.zeros(cells)
    hi = theta_safe.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        grow = defect_sign(mid)
        lo = np.where(grow, mid, lo)
        hi = np.where(grow, hi, mid)
    sigma2 = lo
    star = _deconvolve_batch(m, sigma2)
    alpha, beta, realizable = _wheeler_batch(star[:, : 2 * n], n)
    w, u = _nodes_from_recurrence(np.where(ok, m[:, 0], 1.0), alpha, beta)

    # Cells whose variance landed on the upper endpoint are equilibrium
    # states: coincident centers, equal weights (the canonical boundary
    # representation; the Jacobi route is ill-conditioned there).
    # Rounding noise in the defect limits the bisection to ~1e-8 relative,
    # so snap anything within 1e-6 of the endpoint to the boundary form.
    at_boundary = theta_safe - sigma2 <= 1e-6 * theta_safe
    if np.any(at_boundary):
        mean_u = m[:, 1] / np.where(m[:, 0] > 0, m[:, 0], 1.0)
        w = np.where(at_boundary[:, None], m[:, :1] / n, w)
        u = np.where(at_boundary[:, None], mean_u[:, None], u)
        sigma2 = np.where(at_boundary, theta_safe, sigma2)
        realizable = realizable | at_boundary
    # eigh weights are nonnegative by construction; the >= catches NaNs
    ok &= realizable & np.all(w >= 0, axis=1)
    return w, u, sigma2, ok


def _split_flux_batch(w: np.ndarray, u: np.ndarray, sigma2, k_max: int):
    """Vectorized kinetic flux splitting; returns (F_minus, F_plus), (C, k_max+1)."""
    if np.isscalar(sigma2) and sigma2 == 0.0:
        up = u >= 0.0
        powers = u[None, :, :] ** (np.arange(1, k_max + 2)[:, None, None])
        f_plus = np.einsum("ci,jci->cj", w * up, powers)
        f_minus = np.einsum("ci,jci->cj", w * ~up, powers)
        return f_minus, f_plus
    s2 = np.broadcast_to(np.asarray(sigma2, dtype=float)[:, None], u.shape)
    half = _half_moment_batch(k_max + 1, u, s2, 0.0)  # (k_max+2, C, n)
    full = _gaussian_moment_batch(k_max + 1, u, s2)
    f_plus = np.einsum("ci,jci->cj", w, half[1:])
    f_minus = np.einsum("ci,jci->cj", w, full[1:] - half[1:])
    return f_minus, f_plus


def _char_poly_batch(w: np.ndarray, u: np.ndarray, sigma2: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomials of the Gaussian-mixture system.

    Returns ascending coefficients, shape (C, 2N+2).  Built as the
    node factorization (squared center factors times the collapsed-center
    root) unsmoothed by the shared variance.
    """
    cells, n = u.shape
    # weighted average of centers with squared-separation weights
    num = np.zeros(cells)
    den = np.zeros(cells)
    for i in range(n):
        prod = np.ones(cells)
        for j in range(n):
            if j != i:
                prod *= (u[:, j] - u[:, i]) ** 2
        num += w[:, i] * u[:, i] * prod
        den += w[:, i] * prod
    mean_u = np.sum(w * u, axis=1) / np.sum(w, axis=1)
    u_t = np.where(den > 0, num / np.where(den > 0, den, 1.0), mean_u)

    deg = 2 * n + 1
    g = np.zeros((cells, deg + 1))
    g[:, 0] = 1.0
    top = 0
    roots = [u[:, i] for i in range(n) for _ in range(2)] + [u_t]
    for r in roots:
        g[:, 1 : top + 2] = g[:, : top + 1].copy()
        g[:, 0] = 0.0
        g[:, : top + 1] -= r[:, None] * np.roll(g, -1, axis=1)[:, : top + 1]
        top += 1
    # unsmooth: c = sum_k (-sigma2/2)^k / k! * g^(2k)
    c = g.copy()
    term = g
    factor = np.ones(cells)
    for k in range(1, deg // 2 + 1):
        d2 = np.zeros_like(term)
        j_idx = np.arange(2, deg + 1)
        d2[:, : deg - 1] = term[:, 2:] * (j_idx * (j_idx - 1))[None, :]
        term = d2
        factor *= -0.5 * sigma2 / k
        c += factor[:, None] * term
    return c


def _spectral_radius_batch(coeffs: np.ndarray) -> np.ndarray:
    """Largest |eigenvalue| per cell from monic ascending coefficient rows."""
    cells, width = coeffs.shape
    d = width - 1
    A = np.zeros((cells, d, d))
    idx = np.arange(d - 1)
    A[:, idx, idx + 1] = 1.0
    A[:, -1, :] = -coeffs[:, :d]
    return np.abs(np.linalg.eigvals(A)).max(axis=1)


def _collision_batch(m: np.ndarray, kappa: float, dt: float) -> np.ndarray:
    """Exact exponential relaxation for every cell; nu = kappa * rho."""
    rho = m[:, 0]
    U = m[:, 1] / rho
    theta = m[:, 2] / rho - U**2
    e = rho[:, None] * _gaussian_moment_batch(m.shape[1] - 1, U, theta).T
    if math.isinf(kappa):
        out = e
    else:
        decay = np.exp(-kappa * rho * dt)[:, None]
        out = e + decay * (m - e)
    out[:, :3] = m[:, :3]
    return out


# ---------------------------------------------------------------------------
# Run loop
# ---------------------------------------------------------------------------

def _initial_field(cfg: SimConfig) -> FieldState:
    dx = (cfg.x_hi - cfg.x_lo) / cfg.cells
    x = cfg.x_lo + dx * (np.arange(cfg.cells) + 0.5)
    m = np.empty((cfg.cells, cfg.k_max + 1))
    m_l = maxwellian_moments(cfg.rho_l, cfg.u_l, cfg.theta_l, cfg.k_max)
    m_r = maxwellian_moments(cfg.rho_r, cfg.u_r, cfg.theta_r, cfg.k_max)
    m[x < 0] = m_l
    m[x >= 0] = m_r
    return FieldState(x=x, moments=m, time=0.0)


def _macro_columns(m: np.ndarray):
    rho = m[:, 0]
    U = m[:, 1] / rho
    theta = m[:, 2] / rho - U**2
    if m.shape[1] >= 4:
        q = 0.5 * (m[:, 3] - rho * (U**3 + 3 * U * theta))
    else:
        q = np.zeros_like(rho)
    return rho, U, theta, q


def _check_realizable(ok: np.ndarray, fields: FieldState):
    if not np.all(ok):
        i = int(np.argmin(ok))
        raise RealizabilityError(
            f"realizability lost in cell {i} (x={fields.x[i]:.6g}) at t={fields.time:.6g}: "
            f"moments {fields.moments[i].tolist()}",
            index=i,
            value=float(fields.time),
        )


def _check_macro(fields: FieldState):
    rho, _, theta, _ = _macro_columns(fields.moments)
    bad = ~((rho > 0) & (theta > 0) & np.isfinite(theta))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise RealizabilityError(
            f"nonpositive density/temperature in cell {i} (x={fields.x[i]:.6g}) "
            f"at t={fields.time:.6g}: moments {fields.moments[i].tolist()}",
            index=i,
            value=float(fields.time),
        )


def _fluxes_and_radius(cfg: SimConfig, fields: FieldState):
    m = fields.moments
    if cfg.closure == "eqmom":
        w, u, sigma2, ok = _eqmom_invert_batch(m)
        _check_realizable(ok, fields)
        f_minus, f_plus = _split_flux_batch(w, u, sigma2, cfg.k_max)
        radius = _spectral_radius_batch(_char_poly_batch(w, u, sigma2))
    else:
        w, u, ok = _qmom_invert_batch(m)
        _check_realizable(ok, fields)
        f_minus, f_plus = _split_flux_batch(w, u, 0.0, cfg.k_max)
        radius = np.abs(u).max(axis=1)
    return f_minus, f_plus, float(radius.max())


def _write_snapshot(path: Path, fields: FieldState):
    rho, U, theta, q = _macro_columns(fields.moments)
    k = fields.moments.shape[1] - 1
    header = "x," + ",".join(f"M_{j}" for j in range(k + 1)) + ",rho,U,theta,q"
    data = np.column_stack([fields.x, fields.moments, rho, U, theta, q])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def run_riemann(cfg: SimConfig, write_outputs: bool = True) -> RunResult:
    """First-order finite-volume run of the configured Riemann problem.

    Transport (upwind split kinetic fluxes) then exact collision relaxation
    per cell each step; dt satisfies the CFL bound against the instantaneous
    spectral radius of the closure.  Writes one CSV per snapshot plus a JSON
    manifest when ``write_outputs`` is set.
    """
    t0 = time.perf_counter()
    fields = _initial_field(cfg)
    dx = (cfg.x_hi - cfg.x_lo) / cfg.cells
    snap_times = [cfg.t_end * (i + 1) / cfg.snapshots for i in range(cfg.snapshots)]
    snapshots = []
    steps = 0
    max_radius_seen = 0.0

    for target in snap_times:
        while fields.time < target - 1e-15:
            _check_macro(fields)
            f_minus, f_plus, radius = _fluxes_and_radius(cfg, fields)
            max_radius_seen = max(max_radius_seen, radius)
            dt = cfg.cfl * dx / radius if radius > 0 else target - fields.time
            dt = min(dt, target - fields.time)
            # interface flux i+1/2 uses upwinding: plus-flux from the left
            # cell, minus-flux from the right cell; zero-gradient ghosts
            fp = np.vstack([f_plus[:1], f_plus])
            fm = np.vstack([f_minus, f_minus[-1:]])
            interface = fp + fm  # shape (cells+1, k+1)
            fields.moments -= (dt / dx) * (interface[1:] - interface[:-1])
            if cfg.kappa > 0:
                _check_macro(fields)
                fields.moments = _collision_batch(fields.moments, cfg.kappa, dt)
            fields.time += dt
            steps += 1
        snapshots.append(FieldState(fields.x.copy(), fields.moments.copy(), fields.time))

    wall = time.perf_counter() - t0
    final = snapshots[-1]
    diagnostics = {
        "steps": steps,
        "wall_time_s": wall,
        "max_spectral_radius": max_radius_seen,
        "final_time": final.time,
        "max_density": float(final.moments[:, 0].max()),
    }
    if cfg.kappa == 0:
        ref_rho = free_streaming_density(final.x, final.time, cfg.left, cfg.right)
        diagnostics["l1_error_rho"] = float(np.mean(np.abs(final.moments[:, 0] - ref_rho)))
        diagnostics["delta_shock_metric"] = delta_shock_metric(final, cfg.left, cfg.right)

    manifest = {"config": cfg.to_dict(), "diagnostics": diagnostics, "snapshots": []}
    result = RunResult(snapshots=snapshots, manifest=manifest)

    if write_outputs:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, snap in enumerate(snapshots):
            path = out / f"{cfg.label}-snapshot-{i:03d}.csv"
            _write_snapshot(path, snap)
            manifest["snapshots"].append({"time": snap.time, "csv": path.name})
            result.csv_paths.append(str(path))
        mpath = out / f"{cfg.label}-manifest.json"
        with open(mpath, "w") as f:
            json.dump(manifest, f, indent=2)
        result.manifest_path = str(mpath)
    return result
