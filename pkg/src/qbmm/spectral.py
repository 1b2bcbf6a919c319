"""Hyperbolicity audits of the moment-system coefficient matrices.

The Gaussian-mixture system is certified strictly hyperbolic (distinct real
eigenvalues); the delta-mixture system is certified defective (double
eigenvalues with one-dimensional eigenspaces).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .closure import (
    char_poly_eqmom,
    char_poly_qmom,
    closure_coeffs_eqmom,
    closure_coeffs_qmom,
    companion_matrix,
)
from .errors import DomainError
from .inversion import EqmomState, NodeSet
from .polykit import real_roots


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple
    min_gap: float
    strictly_hyperbolic: bool
    # (eigenvalue, algebraic multiplicity, geometric multiplicity) for every
    # eigenvalue whose eigenspace is deficient
    defects: tuple = field(default_factory=tuple)


def default_gap_tol(eigenvalues) -> float:
    radius = max(abs(x) for x in eigenvalues) if len(eigenvalues) else 0.0
    return 1e-9 * (1.0 + radius)


def geometric_multiplicity(A: np.ndarray, lam: float, tol: float = 1e-9) -> int:
    """Null-space dimension of A - lam*I via singular-value thresholding."""
    s = np.linalg.svd(A - lam * np.eye(A.shape[0]), compute_uv=False)
    cutoff = tol * (s[0] if s[0] > 0 else 1.0)
    return int(np.sum(s <= cutoff))


def analyze_eqmom(state: EqmomState, gap_tol: float | None = None) -> SpectralReport:
    """Eigenstructure of the Gaussian-mixture coefficient matrix."""
    if state.sigma2 <= 0:
        raise DomainError("spectral audit requires positive variance")
    c = char_poly_eqmom(state)
    roots = real_roots(c)
    eigs = []
    for r, mult in roots:
        eigs += [r] * mult
    eigs.sort()
    if gap_tol is None:
        gap_tol = default_gap_tol(eigs)
    gaps = np.diff(eigs)
    min_gap = float(gaps.min()) if len(gaps) else np.inf
    complete = len(eigs) == c.degree
    strictly = complete and min_gap > gap_tol
    defects = []
    if not strictly:
        A = companion_matrix(closure_coeffs_eqmom(state))
        for r, mult in roots:
            geo = geometric_multiplicity(A, r)
            if geo < mult:
                defects.append((r, mult, geo))
    return SpectralReport(tuple(eigs), min_gap, strictly, tuple(defects))


def analyze_qmom(ns: NodeSet, gap_tol: float | None = None) -> SpectralReport:
    """Eigenstructure of the delta-mixture coefficient matrix.

    The characteristic polynomial has each abscissa as a double root, so
    the system is never strictly (or strongly) hyperbolic; the report
    records the algebraic/geometric multiplicity mismatch per eigenvalue.
    """
    c = char_poly_qmom(ns)
    roots = real_roots(c)
    A = companion_matrix(closure_coeffs_qmom(ns))
    eigs = []
    defects = []
    for r, mult in roots:
        eigs += [r] * mult
        geo = geometric_multiplicity(A, r)
        if geo < mult:
            defects.append((r, mult, geo))
    eigs.sort()
    gaps = np.diff(eigs)
    min_gap = float(gaps.min()) if len(gaps) else np.inf
    if gap_tol is None:
        gap_tol = default_gap_tol(eigs)
    return SpectralReport(tuple(eigs), min_gap, False, tuple(defects))
