"""Collision source terms and structural stability verification.

Implements the BGK and Shakhov relaxation sources for the Gaussian-mixture
moment system, the equilibrium manifold, and numerical checks of the three
structural stability conditions (source diagonalizability, symmetrizable
hyperbolicity, and the equilibrium dissipation inequality).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closure import closure_coeffs_eqmom, companion_matrix
from .errors import DomainError, UnsupportedInputError
from .inversion import EqmomState, eqmom_forward, equilibrium_nodes
from .spectral import analyze_eqmom
from .polykit import gaussian_moment


@dataclass(frozen=True)
class MacroState:
    rho: float
    U: float
    theta: float
    q: float = 0.0

    def __post_init__(self):
        if self.rho <= 0:
            raise DomainError(f"density must be positive, got {self.rho}")
        if self.theta <= 0:
            raise DomainError(f"temperature must be positive, got {self.theta}")


@dataclass(frozen=True)
class SourceModel:
    """Collision model: plain relaxation (bgk) or heat-flux corrected (shakhov)."""

    kind: str = "bgk"
    nu: float = 1.0
    pr: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bgk", "shakhov"):
            raise DomainError(f"unknown source model {self.kind!r}")
        if self.nu < 0:
            raise DomainError("collision frequency must be nonnegative")
        if not (0 < self.pr <= 1):
            raise DomainError("Prandtl number must lie in (0, 1]")


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StabilityReport:
    cond_i: ConditionReport
    cond_ii: ConditionReport
    cond_iii: ConditionReport

    @property
    def passed(self) -> bool:
        return self.cond_i.passed and self.cond_ii.passed and self.cond_iii.passed


def macro_from_moments(m) -> MacroState:
    """Density, bulk velocity, temperature and heat flux from M_0..M_3."""
    m = np.asarray(m, dtype=float)
    if m[0] <= 0:
        raise DomainError(f"M_0 must be positive, got {m[0]}")
    rho = m[0]
    U = m[1] / rho
    theta = m[2] / rho - U**2
    if theta <= 0:
        raise DomainError(f"temperature must be positive, got {theta}")
    q = 0.0
    if len(m) >= 4:
        q = 0.5 * (m[3] - rho * (U**3 + 3 * U * theta))
    return MacroState(rho, U, theta, q)


def equilibrium_state(rho: float, U: float, theta: float, n: int) -> EqmomState:
    """Canonical equal-weight Gaussian-mixture state on the equilibrium manifold."""
    if rho <= 0 or theta <= 0:
        raise DomainError("equilibrium requires positive density and temperature")
    return EqmomState(equilibrium_nodes(rho, U, n), theta)


def maxwellian_moments(rho: float, U: float, theta: float, k_max: int) -> np.ndarray:
    return np.array([rho * gaussian_moment(j, U, theta) for j in range(k_max + 1)])


def bgk_source(m) -> np.ndarray:
    """Relaxation source: Maxwellian moments minus the current moments.

    The first three components vanish identically (collision invariants).
    """
    m = np.asarray(m, dtype=float)
    mac = macro_from_moments(m)
    s = maxwellian_moments(mac.rho, mac.U, mac.theta, len(m) - 1) - m
    s[0] = s[1] = s[2] = 0.0
    return s


def shakhov_source(m, pr: float) -> np.ndarray:
    """Heat-flux corrected relaxation source; reduces to BGK at Pr = 1."""
    m = np.asarray(m, dtype=float)
    mac = macro_from_moments(m)
    s = bgk_source(m)
    for j in range(3, len(m)):
        s[j] += math.comb(j, 3) * (1.0 - pr) * (2.0 * mac.q) * gaussian_moment(
            j - 3, mac.U, mac.theta
        )
    return s


def _macro_gradients(m):
    """Gradients of (rho, U, theta) with respect to (M_0, M_1, M_2)."""
    mac = macro_from_moments(m)
    rho, U, theta = mac.rho, mac.U, mac.theta
    drho = np.array([1.0, 0.0, 0.0])
    dU = np.array([-U / rho, 1.0 / rho, 0.0])
    dtheta = np.array([(U**2 - theta) / rho, -2.0 * U / rho, 1.0 / rho])
    return rho, U, theta, drho, dU, dtheta


def _chi_matrix(m, size: int) -> np.ndarray:
    """Analytic derivatives of the Maxwellian moments w.r.t. M_0, M_1, M_2.

    Row i (3 <= i < size) holds d(rho*Delta_i(U,theta))/dM_j for j = 0,1,2.
    """
    rho, U, theta, drho, dU, dtheta = _macro_gradients(m)
    chi = np.zeros((size, 3))
    for i in range(size):
        d_i = gaussian_moment(i, U, theta)
        dd_du = i * gaussian_moment(i - 1, U, theta) if i >= 1 else 0.0
        dd_dth = (i * (i - 1) / 2.0) * gaussian_moment(i - 2, U, theta) if i >= 2 else 0.0
        chi[i, :] = drho * d_i + rho * dU * dd_du + rho * dtheta * dd_dth
    return chi


def is_equilibrium(m, rtol: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=float)
    return float(np.linalg.norm(bgk_source(m))) <= rtol * float(np.linalg.norm(m))


def source_jacobian(m, model: SourceModel) -> np.ndarray:
    """Jacobian of the collision source with respect to the moments.

    BGK has the exact block structure [0 0; chi-hat -I] everywhere; the
    Shakhov Jacobian is only implemented on the equilibrium manifold, where
    the heat-flux correction linearizes cleanly.
    """
    m = np.asarray(m, dtype=float)
    size = len(m)
    chi = _chi_matrix(m, size)
    S = np.zeros((size, size))
    S[3:, 0:3] = chi[3:, :]
    S[3:, 3:] -= np.eye(size - 3)
    if model.kind == "bgk" or model.pr == 1.0:
        return S
    if not is_equilibrium(m):
        raise UnsupportedInputError(
            "Shakhov source Jacobian is only defined on the equilibrium manifold"
        )
    mac = macro_from_moments(m)
    corr = np.eye(size)
    for i in range(3, size):
        corr[i, 3] -= (1.0 - model.pr) * math.comb(i, 3) * gaussian_moment(
            i - 3, mac.U, mac.theta
        )
    return corr @ S


def diagonalizer(m, model: SourceModel) -> tuple[np.ndarray, np.ndarray]:
    """Matrix P and diagonal D with P @ S_M = D @ P on the equilibrium manifold."""
    m = np.asarray(m, dtype=float)
    size = len(m)
    chi = _chi_matrix(m, size)
    P = np.eye(size)
    P[3:, 0:3] = -chi[3:, :]
    diag = np.zeros(size)
    diag[3:] = -1.0
    if model.kind == "shakhov" and model.pr != 1.0:
        mac = macro_from_moments(m)
        # invert the correction factor directly: it only touches column 4
        Pinv = np.linalg.inv(P)
        for i in range(4, size):
            Pinv[i, 3] += math.comb(i, 3) * gaussian_moment(i - 3, mac.U, mac.theta)
        P = np.linalg.inv(Pinv)
        diag[3] = -model.pr
    return P, np.diag(diag)


def left_eigenmatrix(state: EqmomState, gap_tol: float | None = None) -> np.ndarray:
    """Rows are left eigenvectors of the coefficient matrix, last entry 1.

    Built as the eigenvalue Vandermonde times the unit lower-triangular
    matrix of negated closure coefficients.
    """
    if state.sigma2 <= 0:
        raise DomainError("left eigenmatrix requires positive variance")
    rep = analyze_eqmom(state, gap_tol=gap_tol)
    lams = np.asarray(rep.eigenvalues)
    n2 = len(lams)  # 2N+1
    a = np.asarray(closure_coeffs_eqmom(state).a)
    a_full = np.append(a, -1.0)
    L = np.zeros((n2, n2))
    for col in range(n2):
        j = col + 1  # 1-based component index
        # r^(j) = -sum_{k=j}^{2N+1} a_k lam^(k-j)
        for k in range(j, n2 + 1):
            L[:, col] -= a_full[k] * lams ** (k - j)
    return L


def symmetrizer(state: EqmomState, lam_diag=None) -> np.ndarray:
    """Symmetrizer A_0 = L^T Lambda L; Lambda defaults to the identity."""
    L = left_eigenmatrix(state)
    if lam_diag is None:
        return L.T @ L
    lam_diag = np.asarray(lam_diag, dtype=float)
    if np.any(lam_diag <= 0):
        raise DomainError("Lambda must be positive")
    return L.T @ (lam_diag[:, None] * L)


def check_condition_i(m, model: SourceModel, rtol: float = 1e-10) -> ConditionReport:
    """Source diagonalizability at equilibrium: || P S_M - D P || small."""
    m = np.asarray(m, dtype=float)
    S = source_jacobian(m, model)
    P, D = diagonalizer(m, model)
    resid = np.linalg.norm(P @ S - D @ P)
    scale = max(np.linalg.norm(P @ S), 1e-30)
    passed = resid <= rtol * max(1.0, scale)
    return ConditionReport(
        passed,
        {
            "residual": float(resid),
            "relative_residual": float(resid / scale),
            "diagonal": tuple(np.diag(D)),
        },
    )


def check_condition_ii(state: EqmomState, rtol: float = 1e-8) -> ConditionReport:
    """Symmetrizable hyperbolicity: A_0 A symmetric, A_0 positive definite."""
    A = companion_matrix(closure_coeffs_eqmom(state))
    A0 = symmetrizer(state)
    prod = A0 @ A
    sym_resid = np.linalg.norm(prod - prod.T) / max(np.linalg.norm(prod), 1e-30)
    min_eig = float(np.linalg.eigvalsh(0.5 * (A0 + A0.T)).min())
    passed = sym_resid <= rtol and min_eig > 0
    return ConditionReport(
        passed,
        {"symmetry_residual": float(sym_resid), "min_eig_A0": min_eig},
    )


def check_condition_iii(
    m,
    model: SourceModel,
    block_rtol: float = 1e-8,
    eps_lo: float = 1e-12,
    eps_hi: float = 1e6,
) -> ConditionReport:
    """Dissipation coupling at equilibrium.

    Checks (a) block-diagonality of K = (L P^-1)^T (L P^-1) between the
    conserved and relaxing components, and (b) existence of a block scaling
    eps > 0 for which A_0 S_M + S_M^T A_0 + eps^2 P^T diag(0, I_r) P is
    negative semidefinite.
    """
    m = np.asarray(m, dtype=float)
    size = len(m)
    n = (size - 1) // 2
    mac = macro_from_moments(m)
    state = equilibrium_state(mac.rho, mac.U, mac.theta, n)

    S = source_jacobian(m, model)
    P, _ = diagonalizer(m, model)
    Pinv = np.linalg.inv(P)
    L = left_eigenmatrix(state)
    B = L @ Pinv
    K = B.T @ B
    off = np.linalg.norm(K[0:3, 3:])
    k_norm = np.linalg.norm(K)
    block_ok = off <= block_rtol * k_norm

    A0 = L.T @ L
    G = A0 @ S + S.T @ A0
    D_low = np.zeros((size, size))
    D_low[3:, 3:] = np.eye(size - 3)
    Q = P.T @ D_low @ P  # eps-scaled penalty acts on the relaxing block
    gscale = np.linalg.norm(G)
    psd_tol = 1e-10 * max(gscale, 1.0)

    def max_eig(eps: float) -> float:
        return float(np.linalg.eigvalsh(G + eps**2 * Q).max())

    # eps = 1 may fail; bisect downward for the largest power-of-two eps
    # that certifies the inequality
    eps_found = None
    eps = 1.0
    while eps >= eps_lo:
        if max_eig(eps) <= psd_tol:
            eps_found = eps
            break
        eps *= 0.5
    if eps_found is not None:
        # try to grow it back up for a sharper certificate
        while eps_found * 2 <= eps_hi and max_eig(eps_found * 2) <= psd_tol:
            eps_found *= 2
    passed = bool(block_ok) and eps_found is not None
    return ConditionReport(
        passed,
        {
            "off_block_norm": float(off),
            "k_norm": float(k_norm),
            "epsilon": eps_found,
            "max_eig": max_eig(eps_found) if eps_found is not None else None,
            "relaxing_block_size": size - 3,
        },
    )


def stability_report(
    rho: float, U: float, theta: float, n: int, model: SourceModel
) -> StabilityReport:
    """Full structural-stability audit at the given equilibrium."""
    state = equilibrium_state(rho, U, theta, n)
    m = eqmom_forward(state, 2 * n)
    return StabilityReport(
        cond_i=check_condition_i(m, model),
        cond_ii=check_condition_ii(state),
        cond_iii=check_condition_iii(m, model),
    )
