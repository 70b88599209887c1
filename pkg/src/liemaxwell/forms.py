"""Two-form algebra: Hodge star, self-dual splitting, co-closedness.

A 2-form is a vector of six coefficients in the fixed order
``e^12, e^13, e^14, e^23, e^24, e^34``.  The star is defined by
``F ^ *G = <F, G>_g vol_g`` with ``vol_g = sign * sqrt(det g) * e^1234`` and
``<F, G> = (1/2) F_ij G^ij``; it is realized by raising both indices with
``g^{-1}`` and contracting with the Levi-Civita symbol.
"""

from __future__ import annotations

from collections import namedtuple
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import _smallmat
from .lie_algebra import DIM, PAIRS, LieAlgebra, d_two_form, two_form_coeffs, two_form_matrix
from .metric_geometry import _match_dtypes


def _levi_civita_symbol() -> np.ndarray:
    eps = np.zeros((DIM,) * 4, dtype=int)
    for perm in permutations(range(DIM)):
        sign = 1
        p = list(perm)
        for i in range(DIM):
            for j in range(i + 1, DIM):
                if p[i] > p[j]:
                    sign = -sign
        eps[perm] = sign
    return eps


LEVI4 = _levi_civita_symbol()

CoclosednessCheck = namedtuple("CoclosednessCheck", ["ok", "residual"])


def _check_orientation(orientation: int) -> int:
    if orientation not in (1, -1):
        raise ValueError(f"orientation must be +1 or -1, got {orientation}")
    return orientation


def _raised(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """F^{mn} as a matrix: both indices of the 2-form raised with g^{-1}."""
    g_inv = _smallmat.inverse(g)
    return g_inv @ two_form_matrix(a, dtype=g.dtype) @ g_inv


def inner_product(g: np.ndarray, a: np.ndarray, b: np.ndarray):
    """<F, G> = (1/2) F_ij G^ij."""
    arrs = _match_dtypes(np.asarray(g), np.asarray(a), np.asarray(b))
    g, a, b = arrs
    fu = _raised(g, a)
    gm = two_form_matrix(b, dtype=g.dtype)
    return np.einsum("ij,ij->", gm, fu) / 2


def norm_sq(g: np.ndarray, a: np.ndarray):
    return inner_product(g, a, a)


def volume_coefficient(g: np.ndarray, orientation: int = 1) -> float:
    """Coefficient of e^1234 in vol_g; errors on non-positive det."""
    _check_orientation(orientation)
    det = _smallmat.determinant(np.asarray(g))
    if not det > 0:
        raise ValueError(f"metric determinant must be positive, got {float(det)}")
    return orientation * float(np.sqrt(float(det)))


def hodge_star(g: np.ndarray, a: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Star of a 2-form: (*F)_kl = (sign sqrt(det g)/2) eps_{klmn} F^{mn}."""
    g = np.asarray(g, dtype=float)
    a = np.asarray(a, dtype=float)
    vol = volume_coefficient(g, orientation)
    fu = _raised(g, a)
    mat = np.einsum("klmn,mn->kl", LEVI4, fu) / 2
    return vol * two_form_coeffs(mat)


def hodge_star_exact(g: np.ndarray, a: np.ndarray,
                     orientation: int = 1) -> tuple[np.ndarray, Fraction]:
    """Exact star for rational data: returns (coefficients, root).

    The star equals ``coefficients * sqrt(root)``.  When det g is a perfect
    rational square the radical is absorbed and root is 1; otherwise root is
    det g itself, the single radical the closed-form fixtures need.
    """
    _check_orientation(orientation)
    g, a = _match_dtypes(np.asarray(g), np.asarray(a))
    det = _smallmat.determinant(g)
    if not det > 0:
        raise ValueError(f"metric determinant must be positive, got {float(det)}")
    fu = _raised(g, a)
    mat = np.einsum("klmn,mn->kl", _as_exact_eps(), fu) / 2
    coeffs = two_form_coeffs(mat) * Fraction(orientation)
    root = _smallmat.sqrt_fraction(det)
    if root is not None:
        return coeffs * root, Fraction(1)
    return coeffs, det


_EPS_EXACT: np.ndarray | None = None


def _as_exact_eps() -> np.ndarray:
    global _EPS_EXACT
    if _EPS_EXACT is None:
        out = np.empty(LEVI4.shape, dtype=object)
        flat, src = out.reshape(-1), LEVI4.reshape(-1)
        for idx in range(src.size):
            flat[idx] = Fraction(int(src[idx]))
        _EPS_EXACT = out
    return _EPS_EXACT


def sd_asd_split(g: np.ndarray, a: np.ndarray,
                 orientation: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(F+, F-) with F+- = (F +- *F)/2; *F+ = F+ and *F- = -F-."""
    star = hodge_star(g, a, orientation)
    a = np.asarray(a, dtype=float)
    return (a + star) / 2, (a - star) / 2


def is_coclosed(L: LieAlgebra, g: np.ndarray, a: np.ndarray, orientation: int = 1,
                tol: float = 1e-10) -> CoclosednessCheck:
    """d(*F) = 0 check; returns the residual 3-form alongside the verdict."""
    residual = d_two_form(L, hodge_star(g, a, orientation))
    return CoclosednessCheck(ok=bool(np.abs(residual).max() <= tol), residual=residual)


def wedge_two_two(a: np.ndarray, b: np.ndarray):
    """Coefficient of e^1234 in F ^ G (metric-free pairing of 2-forms)."""
    fm = two_form_matrix(np.asarray(a))
    gm = two_form_matrix(np.asarray(b), dtype=fm.dtype)
    eps = _as_exact_eps() if fm.dtype == object else LEVI4
    return np.einsum("ijkl,ij,kl->", eps, fm, gm) / 4


def two_form(**coeffs) -> np.ndarray:
    """Convenience constructor: two_form(e12=1.0, e34=-2.0)."""
    labels = {f"e{i + 1}{j + 1}": p for p, (i, j) in enumerate(PAIRS)}
    out = np.zeros(6)
    for key, val in coeffs.items():
        if key not in labels:
            raise ValueError(f"unknown 2-form coefficient {key!r}")
        out[labels[key]] = val
    return out
