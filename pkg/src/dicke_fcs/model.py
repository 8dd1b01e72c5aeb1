"""Mean-field layer of the lossy Dicke model in the thermodynamic limit.

Conventions
-----------
The collective spin of N = 2j atoms is bosonized, so at leading order in 1/N
the system is two coupled oscillators: the cavity mode at frequency
``omega`` and the atomic mode at ``omega0``, coupled with strength ``lam``,
with cavity photon loss at rate ``gamma_loss``.  All frequencies share one
reference unit (setting gamma_loss = 1 measures time in photon lifetimes).

Displacement amplitudes scale with N, so they are stored *intensively*:
``sqrt_alpha_intensive`` is the photon amplitude divided by sqrt(2j) and
``beta_intensive`` the atomic occupation divided by 2j.  Multiply by the
appropriate power of 2j only at reporting boundaries.

Three couplings order the phase diagram::

    lambda1 = sqrt(omega*omega0)/2                       soft mode closes
    lambda2 = sqrt((gamma^2 + 4 omega^2) omega0/(16 omega))   displaced branch opens
    lambda3 = sqrt((gamma^2 + 4 omega^2)^(3/2) omega0/(32 omega^2))
                                                          displaced frame restabilizes

For ``gamma_loss = 0`` all three coincide.  Between lambda1 and lambda3
(boundaries included) no stable quadratic expansion exists: points there are
classified ``Phase.GAP`` and frame-dependent quantities refuse to evaluate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import InconsistentMeanField, InvalidParams

__all__ = [
    "ModelParams",
    "CriticalCouplings",
    "Phase",
    "MeanField",
    "EffectiveQuadratic",
    "critical_couplings",
    "classify_phase",
    "solve_displacements",
    "effective_parameters",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs.

    ``lam`` is the atom-field coupling (called lambda throughout the
    literature; renamed here only because of the Python keyword).
    ``j_atoms`` = N/2 scales extensive outputs and nothing else; the default
    j = 1/2 makes extensive and intensive quantities coincide.
    """

    omega0: float
    omega: float
    lam: float
    gamma_loss: float
    j_atoms: float = 0.5

    def __post_init__(self):
        if not (self.omega0 > 0 and math.isfinite(self.omega0)):
            raise InvalidParams(f"omega0 must be positive, got {self.omega0}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise InvalidParams(f"omega must be positive, got {self.omega}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise InvalidParams(f"lam must be nonnegative, got {self.lam}")
        if not (self.gamma_loss >= 0 and math.isfinite(self.gamma_loss)):
            raise InvalidParams(
                f"gamma_loss must be nonnegative, got {self.gamma_loss}")
        if not (self.j_atoms > 0 and math.isfinite(self.j_atoms)):
            raise InvalidParams(f"j_atoms must be positive, got {self.j_atoms}")

    def with_lam(self, lam: float) -> "ModelParams":
        return replace(self, lam=lam)


@dataclass(frozen=True)
class CriticalCouplings:
    lambda1: float
    lambda2: float
    lambda3: float


class Phase(enum.Enum):
    NORMAL = "normal"
    GAP = "gap"
    SUPERRADIANT = "superradiant"


@dataclass(frozen=True)
class MeanField:
    """Intensive mean-field displacements.

    ``sqrt_alpha_intensive`` already carries ``sign_branch``; the atomic
    amplitude is ``sign_branch * sqrt(beta_intensive)`` (the Z2 symmetry
    flips both together — flipping only one breaks the fixed point).
    """

    sqrt_alpha_intensive: complex
    beta_intensive: float
    sign_branch: int = +1


@dataclass(frozen=True)
class EffectiveQuadratic:
    """Parameters of the quadratic fluctuation Hamiltonian.

    omega_c * c^dag c + Omega0 * d^dag d + Lambda_eff (c^dag + c)(d^dag + d)
    + M_squeeze (d^dag + d)^2, with ``k_intensive`` = k/(2j) the residual
    bosonization weight of the atomic mode.
    """

    omega_c: float
    Omega0: float
    Lambda_eff: float
    M_squeeze: float
    k_intensive: float


def critical_couplings(params: ModelParams) -> CriticalCouplings:
    """The three phase-boundary couplings (lambda1 <= lambda2 <= lambda3).

    All three are expressed as lambda1 times a power of the common factor
    1 + (gamma_loss / 2 omega)^2, so in the closed-system limit they
    coincide exactly (bit-for-bit), and dissipation splits them strictly.
    """
    w, w0, g = params.omega, params.omega0, params.gamma_loss
    lambda1 = math.sqrt(w * w0) / 2.0
    damping = 1.0 + (g / (2.0 * w)) ** 2
    lambda2 = lambda1 * damping ** 0.5
    lambda3 = lambda1 * damping ** 0.75
    return CriticalCouplings(lambda1, lambda2, lambda3)


def classify_phase(params: ModelParams) -> Phase:
    """Normal below lambda1, Superradiant above lambda3, Gap in between.

    The boundaries themselves classify as Gap: the soft mode vanishes there
    and the transformation coefficients are singular.
    """
    cc = critical_couplings(params)
    if params.lam < cc.lambda1:
        return Phase.NORMAL
    if params.lam > cc.lambda3:
        return Phase.SUPERRADIANT
    return Phase.GAP


def solve_displacements(params: ModelParams, sign_branch: int = +1) -> MeanField:
    """Solve the mean-field fixed point.

    For lam <= lambda2 only the trivial solution exists.  Above lambda2 the
    displaced branch has

        beta/(2j)        = (1 - (lambda2/lam)^2) / 2
        sqrt(alpha)/sqrt(2j) = sign * 2 lam sqrt(1 - (lambda2/lam)^4)
                                / (-i gamma + 2 omega)

    Both branches (sign = +-1) satisfy the three stationarity equations; the
    residuals are checked in the test suite at the 1e-12 level.
    """
    if sign_branch not in (+1, -1):
        raise InvalidParams(f"sign_branch must be +1 or -1, got {sign_branch}")
    lam2 = critical_couplings(params).lambda2
    if params.lam <= lam2:
        return MeanField(0.0 + 0.0j, 0.0, sign_branch)
    q2 = (lam2 / params.lam) ** 2
    beta = 0.5 * (1.0 - q2)
    sqrt_alpha = (
        sign_branch
        * 2.0
        * params.lam
        * math.sqrt(1.0 - q2 * q2)
        / (-1j * params.gamma_loss + 2.0 * params.omega)
    )
    return MeanField(sqrt_alpha, beta, sign_branch)


def effective_parameters(params: ModelParams, mf: MeanField) -> EffectiveQuadratic:
    """Quadratic-expansion parameters around the given mean field.

    With zero displacement this is just the bare model (omega, omega0, lam,
    no squeezing, full weight k = 2j).  Around the displaced solution the
    closed forms are

        Omega0 = omega0/2 + 8 lam^2 omega / (gamma^2 + 4 omega^2)
        Lambda = sqrt(2) lambda2^2 / sqrt(lam^2 + lambda2^2)
        M      = 4 lam^2 omega/(gamma^2 + 4 omega^2) * b(2-b)/(1-b),  b = beta/(2j)

    which are algebraically identical to the longer printed forms (the test
    suite checks both routes).  All fields are branch-independent because
    they involve only (sqrt(alpha) + c.c.) * sqrt(beta).
    """
    lam2 = critical_couplings(params).lambda2
    if mf.beta_intensive == 0.0:
        if abs(mf.sqrt_alpha_intensive) != 0.0:
            raise InconsistentMeanField(
                "zero beta with nonzero photon displacement")
        return EffectiveQuadratic(params.omega, params.omega0, params.lam, 0.0, 1.0)
    if params.lam <= lam2:
        raise InconsistentMeanField(
            f"displaced mean field supplied at lam={params.lam} <= lambda2={lam2}")
    b_expected = 0.5 * (1.0 - (lam2 / params.lam) ** 2)
    if abs(mf.beta_intensive - b_expected) > 1e-10 * max(1.0, b_expected):
        raise InconsistentMeanField(
            f"beta_intensive {mf.beta_intensive} is not the fixed point "
            f"{b_expected} of these parameters")
    w, g, lam = params.omega, params.gamma_loss, params.lam
    g4w2 = g * g + 4.0 * w * w
    b = mf.beta_intensive
    Omega0 = 0.5 * params.omega0 + 8.0 * lam * lam * w / g4w2
    Lambda_eff = math.sqrt(2.0) * lam2 * lam2 / math.sqrt(lam * lam + lam2 * lam2)
    M_squeeze = (4.0 * lam * lam * w / g4w2) * b * (2.0 - b) / (1.0 - b)
    return EffectiveQuadratic(w, Omega0, Lambda_eff, M_squeeze, 1.0 - b)
