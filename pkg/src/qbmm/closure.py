"""Moment closures and the coefficient matrices of the moment systems.

For the delta mixture the closure is the next weighted power sum; for the
Gaussian mixture the closure polynomial is obtained by unsmoothing the
node factorization, which gives the closure coefficients in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .inversion import EqmomState, NodeSet
from .polykit import Polynomial, gaussian_moment, smooth


@dataclass(frozen=True)
class ClosureCoefficients:
    """Last-row coefficients a_0..a_top of the moment-system matrix.

    The characteristic polynomial is u^(top+1) - sum_j a_j u^j, i.e. the
    implicit top coefficient is -1.
    """

    a: tuple

    def __init__(self, a):
        object.__setattr__(self, "a", tuple(float(x) for x in a))

    def characteristic_polynomial(self) -> Polynomial:
        return Polynomial(tuple(-x for x in self.a) + (1.0,))


def u_tilde(ns: NodeSet) -> float:
    """Weighted average of abscissas with squared-separation weights.

    Collapses to the plain mean of coincident abscissas, which extends the
    formula continuously to the equilibrium boundary.
    """
    u = np.asarray(ns.abscissas)
    w = np.asarray(ns.weights)
    n = len(u)
    if n == 1 or u[-1] == u[0]:
        return float(u[0])
    num = 0.0
    den = 0.0
    for i in range(n):
        prod = 1.0
        for j in range(n):
            if j != i:
                prod *= (u[j] - u[i]) ** 2
        num += w[i] * u[i] * prod
        den += w[i] * prod
    if den == 0.0:
        # partially coincident nodes: every product vanishes; fall back to
        # the weighted mean, callers must treat such states as out of domain
        return float(np.sum(w * u) / np.sum(w))
    return float(num / den)


def g_polynomial(state: EqmomState) -> Polynomial:
    """Smoothed characteristic polynomial: squared node factors times (u - Utilde)."""
    roots = []
    for ui in state.nodes.abscissas:
        roots += [ui, ui]
    roots.append(u_tilde(state.nodes))
    return Polynomial.from_roots(roots)


def char_poly_eqmom(state: EqmomState) -> Polynomial:
    """Characteristic polynomial of the Gaussian-mixture moment system."""
    return smooth(g_polynomial(state), -state.sigma2)


def closure_coeffs_eqmom(state: EqmomState) -> ClosureCoefficients:
    """Closure coefficients a_j = d(closed moment)/d(M_j), in closed form."""
    c = char_poly_eqmom(state)
    coeffs = list(c.coeffs)
    coeffs += [0.0] * (2 * state.n + 2 - len(coeffs))
    return ClosureCoefficients([-x for x in coeffs[: 2 * state.n + 1]])


def closed_moment_eqmom(state: EqmomState) -> float:
    """The first unclosed moment M_{2N+1} of the Gaussian mixture."""
    w = state.nodes.weights
    u = state.nodes.abscissas
    return float(
        sum(wi * gaussian_moment(2 * state.n + 1, ui, state.sigma2) for wi, ui in zip(w, u))
    )


def char_poly_qmom(ns: NodeSet) -> Polynomial:
    """Characteristic polynomial of the delta-mixture moment system."""
    roots = []
    for ui in ns.abscissas:
        roots += [ui, ui]
    return Polynomial.from_roots(roots)


def closure_coeffs_qmom(ns: NodeSet) -> ClosureCoefficients:
    c = char_poly_qmom(ns)
    coeffs = list(c.coeffs)
    return ClosureCoefficients([-x for x in coeffs[: 2 * ns.n]])


def closed_moment_qmom(ns: NodeSet) -> float:
    """The first unclosed moment M_{2N} of the delta mixture."""
    w = np.asarray(ns.weights)
    u = np.asarray(ns.abscissas)
    return float(np.sum(w * u ** (2 * ns.n)))


def companion_matrix(a: ClosureCoefficients) -> np.ndarray:
    """Coefficient matrix of the moment system: superdiagonal ones, last row a."""
    n = len(a.a)
    if n < 1:
        raise DomainError("need at least one coefficient")
    A = np.zeros((n, n))
    A[np.arange(n - 1), np.arange(1, n)] = 1.0
    A[-1, :] = a.a
    return A
