"""Univariate polynomial algebra and Gaussian moment utilities.

Everything here is pure and stateless: polynomials are immutable value
objects and the moment helpers are plain functions, so all of it is safe
to call from concurrent parameter sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import DomainError, RootFindingError

# Absolute threshold below which trailing coefficients are trimmed; keeps
# the coefficient tuple canonical so equality tests are meaningful.
TRIM_TOL = 1e-300


def _trim(coeffs):
    c = list(coeffs)
    while len(c) > 1 and abs(c[-1]) <= TRIM_TOL:
        c.pop()
    return tuple(float(x) for x in c)


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial, coefficients in ascending degree order."""

    coeffs: tuple

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0.0:
            return -1  # zero polynomial
        return len(self.coeffs) - 1

    def __call__(self, u):
        acc = 0.0 * np.asarray(u)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def derivative(self, order: int = 1) -> "Polynomial":
        c = np.asarray(self.coeffs, dtype=float)
        for _ in range(order):
            if len(c) == 1:
                return Polynomial((0.0,))
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(c)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        return Polynomial(np.asarray(self.coeffs) * float(other))

    __rmul__ = __mul__

    def __add__(self, other):
        a, b = list(self.coeffs), list(other.coeffs)
        n = max(len(a), len(b))
        a += [0.0] * (n - len(a))
        b += [0.0] * (n - len(b))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        return self + (-1.0) * other

    def is_monic(self, tol: float = 0.0) -> bool:
        return abs(self.coeffs[-1] - 1.0) <= tol

    @staticmethod
    def from_roots(roots) -> "Polynomial":
        p = Polynomial((1.0,))
        for r in roots:
            p = p * Polynomial((-float(r), 1.0))
        return p

    @staticmethod
    def monomial(j: int) -> "Polynomial":
        return Polynomial((0.0,) * j + (1.0,))


@dataclass(frozen=True)
class GaussianKernel:
    """Gaussian kernel with center ``u`` and variance ``sigma2 >= 0``."""

    u: float
    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise DomainError(f"negative variance: {self.sigma2}")


def gaussian_moment(j: int, u: float, sigma2: float) -> float:
    """j-th raw moment of the Gaussian with mean ``u`` and variance ``sigma2``.

    Uses the three-term recursion m_j = u*m_{j-1} + (j-1)*sigma2*m_{j-2}.
    """
    if j < 0:
        raise DomainError(f"moment order must be nonnegative, got {j}")
    if sigma2 < 0:
        raise DomainError(f"negative variance: {sigma2}")
    prev, cur = 1.0, u
    if j == 0:
        return 1.0
    for k in range(2, j + 1):
        prev, cur = cur, u * cur + (k - 1) * sigma2 * prev
    return cur


def gaussian_moment_explicit(j: int, u: float, sigma2: float) -> float:
    """Explicit-sum form of :func:`gaussian_moment`; used as a test oracle."""
    if sigma2 < 0:
        raise DomainError(f"negative variance: {sigma2}")
    total = 0.0
    for k in range(j // 2 + 1):
        total += (
            math.factorial(j)
            / (math.factorial(k) * math.factorial(j - 2 * k))
            * (sigma2 / 2.0) ** k
            * u ** (j - 2 * k)
        )
    return total


def smooth(p: Polynomial, theta: float) -> Polynomial:
    """Apply the variance-``theta`` Gaussian smoothing operator to ``p``.

    The operator sends u^j to the j-th Gaussian moment as a polynomial in u;
    negative ``theta`` gives the inverse of the positive-``theta`` operator.
    """
    out = Polynomial((0.0,))
    term = p
    k = 0
    while term.degree >= 0:
        out = out + (theta / 2.0) ** k / math.factorial(k) * term
        term = term.derivative(2)
        k += 1
    return out


def half_gaussian_moment(j: int, u: float, sigma2: float, cut: float, side: str) -> float:
    """Moment of the Gaussian restricted to one side of ``cut``.

    ``side`` is "above" (integrate over xi > cut) or "below".  Closed-form
    recurrence seeded by erfc and the density value at the cut; no quadrature.
    """
    if j < 0:
        raise DomainError(f"moment order must be nonnegative, got {j}")
    if sigma2 <= 0:
        raise DomainError(f"variance must be positive: {sigma2}")
    if side not in ("above", "below"):
        raise DomainError(f"side must be 'above' or 'below', got {side!r}")
    sigma = math.sqrt(sigma2)
    z = (cut - u) / (sigma * math.sqrt(2.0))
    i0 = 0.5 * erfc(z)
    phi = math.exp(-((cut - u) ** 2) / (2.0 * sigma2)) / (sigma * math.sqrt(2.0 * math.pi))
    # I_{k+1} = u I_k + sigma2 * cut^k * phi + k sigma2 I_{k-1}
    prev, cur = 0.0, i0
    for k in range(j):
        prev, cur = cur, u * cur + sigma2 * cut**k * phi + k * sigma2 * prev
    if side == "above":
        return cur
    return gaussian_moment(j, u, sigma2) - cur


def newton_power_sums(p: Polynomial, k_max: int):
    """Power sums of the roots of monic ``p``, from its coefficients only."""
    if not p.is_monic(tol=0.0) or p.degree < 1:
        raise DomainError("newton_power_sums requires a monic polynomial of degree >= 1")
    d = p.degree
    c = p.coeffs  # c[d] == 1
    sums = [float(d)]
    for k in range(1, k_max + 1):
        if k <= d:
            s = -k * c[d - k]
            for i in range(1, k):
                s -= c[d - i] * sums[k - i]
        else:
            s = 0.0
            for i in range(1, d + 1):
                s -= c[d - i] * sums[k - i]
        sums.append(s)
    return sums


def companion_matrix_of(p: Polynomial) -> np.ndarray:
    """Companion matrix (superdiagonal ones, coefficient last row) of monic ``p``."""
    d = p.degree
    if d < 1:
        raise DomainError("companion matrix requires degree >= 1")
    c = np.asarray(p.coeffs, dtype=float)
    c = c / c[-1]
    A = np.zeros((d, d))
    A[np.arange(d - 1), np.arange(1, d)] = 1.0
    A[-1, :] = -c[:-1]
    return A


def _balance_scale(p: Polynomial) -> float:
    # Crude root-magnitude scale from the Cauchy bound; keeps the companion
    # eigenproblem well conditioned for wide-magnitude coefficients.
    c = np.asarray(p.coeffs, dtype=float)
    c = c / c[-1]
    mags = np.abs(c[:-1])
    if not mags.any():
        return 1.0
    return max(1.0, 2.0 * mags.max() ** (1.0 / (len(c) - 1)))


def real_roots(p: Polynomial, tol: float | None = None):
    """All real roots of ``p`` as sorted (root, multiplicity) pairs.

    Roots come from the eigenvalues of the companion matrix; clusters closer
    than ``tol`` are merged into a single multiple root and polished with
    Newton's method applied to the appropriate derivative.
    """
    d = p.degree
    if d < 0:
        raise DomainError("zero polynomial has no well-defined root set")
    if d == 0:
        return []
    c = np.asarray(p.coeffs, dtype=float) / p.coeffs[-1]
    scale = _balance_scale(p)
    # Solve for the scaled variable u/scale to tame coefficient spread.
    cs = c * scale ** np.arange(len(c))
    cs = cs / cs[-1]
    eigs = np.linalg.eigvals(companion_matrix_of(Polynomial(cs))) * scale

    if tol is None:
        # multiple roots split the companion eigenvalues by about the square
        # root of the (conditioning-amplified) backward error, which can
        # approach 1e-6 relative; cluster accuracy is recovered by the polish
        tol = 1e-6 * (1.0 + np.abs(eigs).max())

    # Greedy union of eigenvalues within tol of each other (complex metric):
    # defective real roots show up as tight conjugate pairs and must merge.
    points = list(eigs)
    clusters: list[list[complex]] = []
    for z in sorted(points, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            if abs(z - np.mean(cl)) <= tol:
                cl.append(z)
                break
        else:
            clusters.append([z])

    out = []
    residuals = []
    for cl in clusters:
        mean = complex(np.mean(cl))
        mult = len(cl)
        if abs(mean.imag) > tol:
            continue  # genuinely complex pair, not a real root
        root = mean.real
        # Newton polish on p^(mult-1), where the root is simple.
        q = p.derivative(mult - 1)
        dq = q.derivative()
        for _ in range(3):
            den = dq(root)
            if den == 0.0:
                break
            root -= q(root) / den
        res = abs(q(root))
        qscale = max(abs(x) for x in q.coeffs) * max(1.0, abs(root)) ** max(q.degree, 0)
        if res > 1e-6 * qscale:
            residuals.append((root, res))
            continue
        out.append((float(root), mult))
    if residuals:
        raise RootFindingError(
            f"root polishing failed for {len(residuals)} candidate(s)",
            residuals=residuals,
        )
    out.sort(key=lambda t: t[0])
    return out
