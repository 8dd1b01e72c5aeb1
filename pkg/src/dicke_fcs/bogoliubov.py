"""Diagonalization of the two-mode quadratic fluctuation Hamiltonian.

In position coordinates the Hamiltonian of either phase reduces to kinetic
terms plus the stiffness form

    K = [[omega^2,                2 Lambda sqrt(omega Omega0)],
         [2 Lambda sqrt(omega Omega0),  Omega0 (Omega0 + 4 M)]]

A plane rotation by gamma diagonalizes K; the normal-mode frequencies are
the square roots of its eigenvalues, and re-expressing the original ladder
operators in terms of the normal-mode ones gives one Bogoliubov coefficient
quadruple per row:

    a1 = A d1 + B d1^dag + G d2 + D d2^dag
    a2 = A2 d1 + B2 d1^dag + G2 d2 + D2 d2^dag

The closed forms (`frame_coefficients`) and a generic numeric route through
``numpy.linalg.eigh`` (`numeric_diagonalize`) must agree; the latter exists
purely as an oracle for the former.

Labeling convention: eps_minus is always the soft mode (the one that closes
at the phase boundaries) and 2*gamma = atan2(2 K12, K22 - K11) in [0, pi],
single-valued over the whole phase diagram.  No case split on omega0 vs
omega is needed with this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CriticalSingularity, UnstableRegion
from .model import EffectiveQuadratic

__all__ = [
    "BogoliubovFrame",
    "eigenenergies",
    "mixing_angle",
    "frame_coefficients",
    "numeric_diagonalize",
    "stiffness_matrix",
    "quadratic_form",
    "frame_matrix",
]

#: below this soft-mode frequency the A1-type coefficients overflow
DEFAULT_EPS_TOL = 1e-9


@dataclass(frozen=True)
class BogoliubovFrame:
    eps_minus: float
    eps_plus: float
    gamma_angle: float
    A: float
    B: float
    G: float
    D: float
    A2: float
    B2: float
    G2: float
    D2: float


def stiffness_matrix(eq: EffectiveQuadratic) -> np.ndarray:
    k12 = 2.0 * eq.Lambda_eff * math.sqrt(eq.omega_c * eq.Omega0)
    k22 = eq.Omega0 * (eq.Omega0 + 4.0 * eq.M_squeeze)
    return np.array([[eq.omega_c ** 2, k12], [k12, k22]])


def eigenenergies(eq: EffectiveQuadratic) -> tuple[float, float]:
    """Normal-mode frequencies (eps_minus, eps_plus), soft mode first.

    eps_plus^2 = (tr K + S)/2 is evaluated directly; eps_minus^2 = det K /
    eps_plus^2 to avoid the catastrophic cancellation of (tr K - S)/2 near
    the critical points (needed for probing 1e-9 from the boundary).
    """
    K = stiffness_matrix(eq)
    k11, k22, k12 = K[0, 0], K[1, 1], K[0, 1]
    det = k11 * k22 - k12 * k12
    if det < 0.0:
        raise UnstableRegion(
            f"negative squared eigenenergy (det K = {det:g}): inside the gap")
    s = math.hypot(k22 - k11, 2.0 * k12)
    eps_plus_sq = 0.5 * (k11 + k22 + s)
    eps_minus_sq = det / eps_plus_sq if eps_plus_sq > 0.0 else 0.0
    return math.sqrt(eps_minus_sq), math.sqrt(eps_plus_sq)


def mixing_angle(eq: EffectiveQuadratic) -> float:
    """Rotation angle gamma in [0, pi/2] decoupling the two position modes."""
    K = stiffness_matrix(eq)
    if K[0, 0] * K[1, 1] - K[0, 1] ** 2 < 0.0:
        raise UnstableRegion("no real normal modes inside the gap")
    return 0.5 * math.atan2(2.0 * K[0, 1], K[1, 1] - K[0, 0])


def _squeeze_row(scale: float, bare: float, eps: float) -> tuple[float, float]:
    """Coefficients of (d, d^dag) in a ladder operator of bare frequency
    ``bare`` expressed through a normal mode of frequency ``eps``, times the
    rotation entry ``scale``."""
    root = 2.0 * math.sqrt(bare * eps)
    return scale * (bare + eps) / root, scale * (bare - eps) / root


def _coefficients(eq: EffectiveQuadratic, eps_minus: float, eps_plus: float,
                  cos_g: float, sin_g: float) -> BogoliubovFrame:
    A, B = _squeeze_row(cos_g, eq.omega_c, eps_minus)
    G, D = _squeeze_row(sin_g, eq.omega_c, eps_plus)
    A2, B2 = _squeeze_row(-sin_g, eq.Omega0, eps_minus)
    G2, D2 = _squeeze_row(cos_g, eq.Omega0, eps_plus)
    gamma = math.atan2(sin_g, cos_g)
    return BogoliubovFrame(eps_minus, eps_plus, gamma,
                           A, B, G, D, A2, B2, G2, D2)


def frame_coefficients(eq: EffectiveQuadratic,
                       eps_tol: float = DEFAULT_EPS_TOL) -> BogoliubovFrame:
    """Closed-form Bogoliubov frame.

    Raises CriticalSingularity when the soft mode sits below ``eps_tol``:
    the coefficients diverge like eps_minus^(-1/2) at the boundaries, and a
    frame built there would poison every downstream quantity.
    """
    eps_minus, eps_plus = eigenenergies(eq)
    if eps_minus < eps_tol:
        raise CriticalSingularity(
            f"soft mode eps_minus = {eps_minus:g} < {eps_tol:g}")
    gamma = mixing_angle(eq)
    return _coefficients(eq, eps_minus, eps_plus,
                         math.cos(gamma), math.sin(gamma))


def numeric_diagonalize(eq: EffectiveQuadratic,
                        eps_tol: float = DEFAULT_EPS_TOL) -> BogoliubovFrame:
    """Oracle route: eigendecompose the stiffness matrix numerically.

    Uses LAPACK (numpy.linalg.eigh) instead of the closed-form angle and
    eigenvalue expressions, then applies the same sign convention: the soft
    eigenvector is (cos g, -sin g) with cos g >= 0.
    """
    K = stiffness_matrix(eq)
    vals, vecs = np.linalg.eigh(K)
    if vals[0] < 0.0:
        raise UnstableRegion(
            f"negative stiffness eigenvalue {vals[0]:g}: inside the gap")
    eps_minus, eps_plus = math.sqrt(vals[0]), math.sqrt(vals[1])
    if eps_minus < eps_tol:
        raise CriticalSingularity(
            f"soft mode eps_minus = {eps_minus:g} < {eps_tol:g}")
    v0 = vecs[:, 0]
    if v0[0] < 0.0 or (v0[0] == 0.0 and v0[1] > 0.0):
        v0 = -v0
    cos_g, sin_g = v0[0], -v0[1]
    return _coefficients(eq, eps_minus, eps_plus, cos_g, sin_g)


# ---------------------------------------------------------------------------
# verification helpers: quadratic forms as symmetric matrices over
# xi = (a1, a1^dag, a2, a2^dag) so that H = (1/2) xi^T S xi + const.
# ---------------------------------------------------------------------------

def quadratic_form(eq: EffectiveQuadratic) -> np.ndarray:
    """Symmetric matrix of the fluctuation Hamiltonian over (a1,a1+,a2,a2+)."""
    S = np.zeros((4, 4))
    S[0, 1] = S[1, 0] = eq.omega_c
    S[2, 3] = S[3, 2] = eq.Omega0 + 2.0 * eq.M_squeeze
    S[2, 2] = S[3, 3] = 2.0 * eq.M_squeeze
    for i in (0, 1):
        for j in (2, 3):
            S[i, j] = S[j, i] = eq.Lambda_eff
    return S


def frame_matrix(frame: BogoliubovFrame) -> np.ndarray:
    """Linear map T with (a1, a1^dag, a2, a2^dag)^T = T (d1, d1^dag, d2, d2^dag)^T."""
    f = frame
    return np.array([
        [f.A, f.B, f.G, f.D],
        [f.B, f.A, f.D, f.G],
        [f.A2, f.B2, f.G2, f.D2],
        [f.B2, f.A2, f.D2, f.G2],
    ])


def diagonal_form(frame: BogoliubovFrame) -> np.ndarray:
    """Symmetric matrix of eps_- d1^dag d1 + eps_+ d2^dag d2."""
    S = np.zeros((4, 4))
    S[0, 1] = S[1, 0] = frame.eps_minus
    S[2, 3] = S[3, 2] = frame.eps_plus
    return S
