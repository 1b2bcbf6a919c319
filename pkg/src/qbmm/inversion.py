"""Forward moment maps and their inverses for delta and Gaussian mixtures.

The forward maps are weighted power sums / Gaussian moments; the inverse
problems are solved with the Jacobi-matrix (Golub-Welsch) construction for
the delta mixture and a scalar root-find in the shared variance for the
Gaussian mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InversionError, RealizabilityError
from .polykit import gaussian_moment

# Node collision threshold for flagging near-degenerate quadratures.
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class NodeSet:
    """N positive-weight nodes, abscissas kept sorted ascending."""

    weights: tuple
    abscissas: tuple

    def __init__(self, weights, abscissas):
        w = np.asarray(weights, dtype=float)
        u = np.asarray(abscissas, dtype=float)
        if w.shape != u.shape or w.ndim != 1 or w.size == 0:
            raise DomainError("weights and abscissas must be equal-length 1-D sequences")
        if np.any(w <= 0):
            raise DomainError("all weights must be positive")
        order = np.argsort(u, kind="stable")
        object.__setattr__(self, "weights", tuple(float(x) for x in w[order]))
        object.__setattr__(self, "abscissas", tuple(float(x) for x in u[order]))

    @property
    def n(self) -> int:
        return len(self.weights)

    def min_gap(self) -> float:
        u = self.abscissas
        if len(u) < 2:
            return math.inf
        return min(b - a for a, b in zip(u, u[1:]))

    def is_degenerate(self, tol: float = DEGENERACY_TOL) -> bool:
        scale = 1.0 + max(abs(x) for x in self.abscissas)
        return self.min_gap() <= tol * scale


@dataclass(frozen=True)
class EqmomState:
    """NodeSet plus the shared Gaussian variance."""

    nodes: NodeSet
    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise DomainError(f"negative variance: {self.sigma2}")

    @property
    def n(self) -> int:
        return self.nodes.n

    def is_interior(self, tol: float = DEGENERACY_TOL) -> bool:
        """All centers distinct and positive variance."""
        return self.sigma2 > 0 and not self.nodes.is_degenerate(tol)

    def is_equilibrium_boundary(self, tol: float = DEGENERACY_TOL) -> bool:
        """All centers coincident and positive variance."""
        u = self.nodes.abscissas
        scale = 1.0 + max(abs(x) for x in u)
        return self.sigma2 > 0 and (u[-1] - u[0]) <= tol * scale


def qmom_forward(ns: NodeSet, k_max: int) -> np.ndarray:
    """Moments M_0..M_{k_max} of the delta mixture: weighted power sums."""
    w = np.asarray(ns.weights)
    u = np.asarray(ns.abscissas)
    return np.array([np.sum(w * u**j) for j in range(k_max + 1)])


def eqmom_forward(state: EqmomState, k_max: int) -> np.ndarray:
    """Moments M_0..M_{k_max} of the Gaussian mixture."""
    w = np.asarray(state.nodes.weights)
    u = np.asarray(state.nodes.abscissas)
    return np.array(
        [np.sum(w * [gaussian_moment(j, ui, state.sigma2) for ui in u]) for j in range(k_max + 1)]
    )


def deconvolve(m, sigma2: float) -> np.ndarray:
    """Remove a variance-``sigma2`` Gaussian blur from a moment sequence.

    Maps mixture moments back to the weighted power sums of the centers.
    """
    if sigma2 < 0:
        raise DomainError(f"negative variance: {sigma2}")
    m = np.asarray(m, dtype=float)
    out = np.empty_like(m)
    for j in range(len(m)):
        s = 0.0
        for k in range(j // 2 + 1):
            s += (
                math.factorial(j)
                / (math.factorial(k) * math.factorial(j - 2 * k))
                * (-sigma2 / 2.0) ** k
                * m[j - 2 * k]
            )
        out[j] = s
    return out


def _recurrence_from_moments(m: np.ndarray, n: int):
    """Three-term recurrence coefficients from moments m_0..m_{2n-1}.

    Classical moment-to-recurrence (Chebyshev/Wheeler) construction; the
    off-diagonal coefficients are ratios of Hankel determinants, so a
    nonpositive one certifies a realizability failure.
    """
    if m[0] <= 0:
        raise RealizabilityError(f"M_0 must be positive, got {m[0]}", index=0, value=float(m[0]))
    sigma_prev = np.zeros(2 * n)
    sigma_cur = np.array(m, dtype=float)
    alpha = np.zeros(n)
    beta = np.zeros(n)
    alpha[0] = m[1] / m[0]
    beta[0] = m[0]
    for k in range(1, n):
        nxt = np.zeros(2 * n)
        for l in range(k, 2 * n - k):
            nxt[l] = (
                sigma_cur[l + 1]
                - alpha[k - 1] * sigma_cur[l]
                - beta[k - 1] * sigma_prev[l]
            )
        if nxt[k] <= 0 or not np.isfinite(nxt[k]):
            raise RealizabilityError(
                f"Hankel positivity lost at order {k}: pivot {nxt[k]}",
                index=k,
                value=float(nxt[k]),
            )
        alpha[k] = nxt[k + 1] / nxt[k] - sigma_cur[k] / sigma_cur[k - 1]
        beta[k] = nxt[k] / sigma_cur[k - 1]
        sigma_prev, sigma_cur = sigma_cur, nxt
    return alpha, beta


def qmom_invert(m) -> NodeSet:
    """Recover the N-node delta mixture from its first 2N moments.

    Builds the Jacobi matrix from the moment-derived recurrence coefficients
    and takes its eigendecomposition; requires strict Hankel positivity.
    """
    m = np.asarray(m, dtype=float)
    if len(m) % 2 != 0 or len(m) == 0:
        raise DomainError(f"need an even number of moments (2N), got {len(m)}")
    n = len(m) // 2
    alpha, beta = _recurrence_from_moments(m, n)
    if n == 1:
        return NodeSet([m[0]], [alpha[0]])
    J = np.diag(alpha) + np.diag(np.sqrt(beta[1:]), 1) + np.diag(np.sqrt(beta[1:]), -1)
    vals, vecs = np.linalg.eigh(J)
    weights = m[0] * vecs[0, :] ** 2
    return NodeSet(weights, vals)


def _theta_of(m) -> float:
    """Central second moment (per unit density) of a moment vector."""
    if m[0] <= 0:
        raise DomainError(f"M_0 must be positive, got {m[0]}")
    return m[2] / m[0] - (m[1] / m[0]) ** 2


def _variance_residual(m: np.ndarray, sigma2: float, n: int) -> float:
    """Closure defect of the candidate variance.

    Deconvolves the first 2N moments, inverts the resulting delta mixture,
    and returns the mismatch in the deconvolved top moment.  Nonrealizable
    deconvolutions count as overshooting (negative residual).
    """
    star = deconvolve(m, sigma2)
    try:
        ns = qmom_invert(star[: 2 * n])
    except (RealizabilityError, DomainError):
        # degenerate pivots can also surface as zero weights downstream
        return -math.inf
    predicted = float(np.sum(np.asarray(ns.weights) * np.asarray(ns.abscissas) ** (2 * n)))
    return float(star[2 * n] - predicted)


def equilibrium_nodes(m0: float, u: float, n: int) -> NodeSet:
    """Canonical equal-weight node set for coincident centers."""
    return NodeSet([m0 / n] * n, [u] * n)


def eqmom_invert(m, residual_rtol: float = 1e-9) -> EqmomState:
    """Recover the Gaussian-mixture state from its first 2N+1 moments.

    The shared variance is located by a bracketed scalar root-find on
    [0, theta]; the centers and weights then follow from the delta-mixture
    inversion of the deconvolved moments.  Inputs whose root sits at the
    upper endpoint are returned as the canonical equal-weight boundary state.
    """
    m = np.asarray(m, dtype=float)
    if len(m) % 2 != 1 or len(m) < 3:
        raise DomainError(f"need an odd number of moments (2N+1, N>=1), got {len(m)}")
    n = (len(m) - 1) // 2
    theta = _theta_of(m)
    if theta <= 0:
        raise RealizabilityError(
            f"central second moment must be positive, got {theta}", index=1, value=theta
        )
    scale = abs(m[2 * n]) + (m[0] * theta ** n) + 1.0

    boundary_tol = 1e-7 * theta

    def make_state(sigma2: float) -> EqmomState:
        star = deconvolve(m, sigma2)
        ns = qmom_invert(star[: 2 * n])
        return EqmomState(ns, sigma2)

    # Upper endpoint: variance == theta forces coincident centers.
    if n == 1:
        return EqmomState(equilibrium_nodes(m[0], m[1] / m[0], 1), theta)

    f_lo = _variance_residual(m, 0.0, n)
    if abs(f_lo) <= residual_rtol * scale:
        return make_state(0.0)
    if f_lo < 0:
        raise InversionError(
            "negative closure defect at zero variance: moments outside the forward image",
            residual=f_lo,
            bracket=(0.0, theta),
        )

    # The defect is positive at 0 and nonpositive at theta (a realizability
    # barrier counts as overshooting), so [0, theta] always brackets the root.
    # Bisection with a guarded secant step; converges to the boundary when
    # the root sits at theta itself.
    lo, f_l = 0.0, f_lo
    hi, f_h = theta, _variance_residual(m, theta, n)
    for it in range(200):
        mid = 0.5 * (lo + hi)
        # secant refinement on alternate iterations so bisection still
        # guarantees geometric bracket shrinkage
        if it % 2 and np.isfinite(f_h) and f_l != f_h:
            sec = lo - f_l * (hi - lo) / (f_h - f_l)
            if lo < sec < hi:
                mid = sec
        f_m = _variance_residual(m, mid, n)
        if f_m > 0:
            lo, f_l = mid, f_m
        else:
            hi, f_h = mid, f_m
        if hi - lo <= 1e-16 * theta:
            break
    sigma2 = lo if f_l == 0.0 else 0.5 * (lo + hi)

    def residual_of(state: EqmomState) -> float:
        achieved = eqmom_forward(state, 2 * n)
        return float(np.max(np.abs(achieved - m)))

    # The defect root is tangential at the equilibrium boundary, so sign
    # bisection only resolves it to ~sqrt(machine eps); accept the canonical
    # boundary state whenever it actually reproduces the moments.
    if theta - sigma2 <= boundary_tol:
        boundary = EqmomState(equilibrium_nodes(m[0], m[1] / m[0], n), theta)
        if residual_of(boundary) <= residual_rtol * scale:
            return boundary

    state = _newton_refine(make_state(sigma2), m)
    resid = residual_of(state)
    if resid > residual_rtol * scale:
        raise InversionError(
            f"inversion residual {resid:.3e} exceeds tolerance",
            residual=resid,
            bracket=(0.0, theta),
        )
    return state


def _gaussian_moments_ld(j: int, u: np.ndarray, sigma2) -> np.ndarray:
    """Vector of j-th Gaussian moments in extended precision."""
    one = np.ones_like(u)
    if j <= 0:
        return one
    prev, cur = one, u.copy()
    for k in range(2, j + 1):
        prev, cur = cur, u * cur + (k - 1) * sigma2 * prev
    return cur


def _newton_refine(state: EqmomState, m: np.ndarray, iters: int = 10) -> EqmomState:
    """Polish an inverted state with Newton steps on the full forward map.

    Residuals are evaluated in extended precision so the iteration converges
    to the exact inverse of the (rounded) input moments; the remaining error
    against the generating state is then purely the float64 information
    floor, which is the best any inversion can do.
    """
    n = state.n
    w = np.array(state.nodes.weights, dtype=np.longdouble)
    u = np.array(state.nodes.abscissas, dtype=np.longdouble)
    s2 = np.longdouble(state.sigma2)
    m_ld = np.asarray(m, dtype=np.longdouble)
    def resid_ld(wv, uv, s2v):
        f = np.array(
            [np.sum(wv * _gaussian_moments_ld(j, uv, s2v)) for j in range(2 * n + 1)],
            dtype=np.longdouble,
        )
        return float(np.max(np.abs(f - m_ld)))

    best = state
    best_res = resid_ld(w, u, s2)

    for _ in range(iters):
        moms = [_gaussian_moments_ld(j, u, s2) for j in range(2 * n + 1)]
        fwd = np.array([np.sum(w * moms[j]) for j in range(2 * n + 1)], dtype=np.longdouble)
        resid = (fwd - m_ld).astype(np.float64)
        J = np.zeros((2 * n + 1, 2 * n + 1))
        for j in range(2 * n + 1):
            J[j, 0:2 * n:2] = moms[j].astype(np.float64)
            if j >= 1:
                J[j, 1:2 * n:2] = j * (w * moms[j - 1]).astype(np.float64)
            if j >= 2:
                J[j, 2 * n] = (j * (j - 1) / 2.0) * float(fwd[j - 2])
        try:
            step = np.linalg.solve(J, resid)
        except np.linalg.LinAlgError:
            break
        damp = 1.0
        while damp > 1e-3 and (
            np.any(w - damp * step[0:2 * n:2] <= 0) or s2 - damp * step[2 * n] < 0
        ):
            damp *= 0.5
        w2 = w - damp * step[0:2 * n:2]
        s22 = s2 - np.longdouble(damp * step[2 * n])
        if np.any(w2 <= 0) or s22 < 0:
            break
        w, u, s2 = w2, u - damp * step[1:2 * n:2], s22
        try:
            cand = EqmomState(
                NodeSet(w.astype(np.float64), u.astype(np.float64)), float(s2)
            )
        except DomainError:
            break
        res = resid_ld(w, u, s2)
        if res <= best_res:
            best, best_res = cand, res
        if np.max(np.abs(step)) < 1e-18:
            break
    return best


def forward_jacobian(state: EqmomState) -> np.ndarray:
    """Jacobian of the Gaussian-mixture forward map.

    Columns ordered (w_1, u_1, ..., w_N, u_N, sigma2); rows are moments
    M_0..M_{2N}.
    """
    n = state.n
    w = state.nodes.weights
    u = state.nodes.abscissas
    s2 = state.sigma2
    m = eqmom_forward(state, 2 * n)
    J = np.zeros((2 * n + 1, 2 * n + 1))
    for j in range(2 * n + 1):
        for i in range(n):
            J[j, 2 * i] = gaussian_moment(j, u[i], s2)
            J[j, 2 * i + 1] = j * w[i] * gaussian_moment(j - 1, u[i], s2) if j >= 1 else 0.0
        J[j, 2 * n] = (j * (j - 1) / 2.0) * m[j - 2] if j >= 2 else 0.0
    return J


def forward_jacobian_det(state: EqmomState) -> float:
    """Closed-form determinant of :func:`forward_jacobian`."""
    n = state.n
    w = np.asarray(state.nodes.weights)
    u = np.asarray(state.nodes.abscissas)
    prod_w = float(np.prod(w))
    mid = 0.0
    for i in range(n):
        prod = 1.0
        for j in range(n):
            if j != i:
                prod *= (u[i] - u[j]) ** 2
        mid += w[i] * prod
    quartic = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            quartic *= (u[i] - u[j]) ** 4
    return prod_w * mid * quartic
