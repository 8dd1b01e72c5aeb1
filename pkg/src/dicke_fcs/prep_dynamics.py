"""Gaussian P-function dynamics of the fluctuation modes with counting field.

In the diagonal (Bogoliubov) frame the counting-field master equation for
the fluctuations couples the two normal modes to effective thermal baths.
Expanding the density operator over coherent states |g1, g2> with a Gaussian
ansatz

    P(g1, g2, t) = exp[ -a - sum_i ( d_i |g_i|^2 - b_i g_i - c_i g_i* ) ]

closes the equation of motion into seven coupled ODEs for (a, b1, b2, c1,
c2, d1, d2).  Every coefficient is valued in a truncated power series
(:class:`~dicke_fcs.jets.CountingJet`) in s = i*chi, so a single integration
carries all counting cumulants up to the jet order.

The rates entering the ODEs are

    U = (G/2) (A^2 + B^2 (1 - 2 e^s))      W = G B^2 e^s
    V = (G/2) (G^2 + D^2 (1 - 2 e^s))      T = G D^2 e^s

with (A, B) the photon-row coefficients of the soft mode and (G, D) those of
the stiff mode, G the photon loss rate.  The macroscopic emission channel
enters only through the additive Poisson rate ``drive_rate`` = G|alpha|(1-e^s),
which consumers add to the fluctuation part when assembling the full
generating function; it never feeds back into the seven ODEs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bogoliubov import BogoliubovFrame
from .errors import BranchAmbiguity, InvalidParams, NonConvergence
from .jets import CountingJet, seq_mul, seq_reciprocal, seq_sqrt

__all__ = [
    "CountingJet",
    "OdeCoefficients",
    "PState",
    "GaussianIC",
    "ode_coefficients",
    "initial_state",
    "ode_rhs",
    "steady_state",
    "steady_a_rate",
    "evolve",
    "log_gaussian_mass",
]


@dataclass(frozen=True)
class OdeCoefficients:
    """Jet-valued rates of the seven-ODE system plus bookkeeping constants."""

    U_bar: CountingJet
    V_bar: CountingJet
    W_bar: CountingJet
    T_bar: CountingJet
    #: Poisson rate of the macroscopic channel, G*|alpha|*(1 - e^s)
    drive_rate: CountingJet
    #: G*(1 - e^s); prefactor of the width sources in the d equations
    counting_loss: CountingJet
    #: source constants A^2+B^2 and G^2+D^2 of the two d equations
    src1: float
    src2: float
    #: squared heating coefficients B^2, D^2
    b_sq: float
    d_sq: float
    gamma_loss: float
    order: int


@dataclass(frozen=True)
class PState:
    """The seven Gaussian-ansatz coefficients at one instant.

    All fields are jets in s = i*chi.  For derivative objects returned by
    :func:`ode_rhs` the fields hold d/dt values and ``time`` is carried
    through unchanged.
    """

    a: CountingJet
    b1: CountingJet
    b2: CountingJet
    c1: CountingJet
    c2: CountingJet
    d1: CountingJet
    d2: CountingJet
    time: float


@dataclass(frozen=True)
class GaussianIC:
    """Isotropic Gaussian of width epsilon displaced to (gamma1_0, gamma2_0)."""

    epsilon_width: float
    gamma1_0: complex = 0.0
    gamma2_0: complex = 0.0

    def __post_init__(self):
        if not (self.epsilon_width > 0 and math.isfinite(self.epsilon_width)):
            raise InvalidParams(
                f"epsilon_width must be positive, got {self.epsilon_width}")


def ode_coefficients(frame: BogoliubovFrame, gamma_loss: float,
                     alpha_abs: float = 0.0, order: int = 6) -> OdeCoefficients:
    """Assemble the jet-valued ODE rates for a given frame and loss rate.

    ``alpha_abs`` is the extensive macroscopic photon number |alpha| (zero in
    the normal phase); it only sets ``drive_rate``.
    """
    if gamma_loss < 0:
        raise InvalidParams(f"gamma_loss must be nonnegative, got {gamma_loss}")
    if order < 0:
        raise InvalidParams(f"jet order must be nonnegative, got {order}")
    e_s = CountingJet.variable(order).exp() if order >= 1 \
        else CountingJet.constant(1.0, 0)
    one = CountingJet.constant(1.0, order)
    A2, B2 = frame.A ** 2, frame.B ** 2
    G2, D2 = frame.G ** 2, frame.D ** 2
    U = 0.5 * gamma_loss * (A2 + B2 * (one - 2.0 * e_s))
    V = 0.5 * gamma_loss * (G2 + D2 * (one - 2.0 * e_s))
    W = gamma_loss * B2 * e_s
    T = gamma_loss * D2 * e_s
    counting_loss = gamma_loss * (one - e_s)
    return OdeCoefficients(
        U_bar=U, V_bar=V, W_bar=W, T_bar=T,
        drive_rate=alpha_abs * counting_loss,
        counting_loss=counting_loss,
        src1=A2 + B2, src2=G2 + D2,
        b_sq=B2, d_sq=D2,
        gamma_loss=gamma_loss, order=order,
    )


def initial_state(ic: GaussianIC, order: int = 6) -> PState:
    """Map a displaced Gaussian to the ansatz coefficients at t = 0.

    The normalization constant is chosen so the total P-mass is exactly one:
    a(0) = ln((pi*eps)^2) + (|g1|^2 + |g2|^2)/eps.  All jets are constant in
    s (the initial state carries no counting phase).
    """
    eps = ic.epsilon_width
    a0 = math.log((math.pi * eps) ** 2) \
        + (abs(ic.gamma1_0) ** 2 + abs(ic.gamma2_0) ** 2) / eps
    const = lambda z: CountingJet.constant(z, order)
    return PState(
        a=const(a0),
        b1=const(np.conj(ic.gamma1_0) / eps),
        b2=const(np.conj(ic.gamma2_0) / eps),
        c1=const(ic.gamma1_0 / eps),
        c2=const(ic.gamma2_0 / eps),
        d1=const(1.0 / eps),
        d2=const(1.0 / eps),
        time=0.0,
    )


# ---------------------------------------------------------------------------
# right-hand side
#
# The integrator works on a flat real view of the stacked coefficient rows
# (a, b1, b2, c1, c2, d1, d2); _rhs_rows is the hot path and stays on raw
# arrays, ode_rhs is the jet-typed wrapper.
# ---------------------------------------------------------------------------

def _rhs_rows(z: np.ndarray, co: OdeCoefficients) -> np.ndarray:
    a, b1, b2, c1, c2, d1, d2 = z
    U = co.U_bar.coefficients
    V = co.V_bar.coefficients
    W = co.W_bar.coefficients
    T = co.T_bar.coefficients
    loss = co.counting_loss.coefficients
    out = np.empty_like(z)
    out[0] = (-seq_mul(W, seq_mul(c1, b1) - d1)
              - seq_mul(T, seq_mul(c2, b2) - d2)
              - 2.0 * (U + V)
              + loss * (co.b_sq + co.d_sq))
    out[1] = seq_mul(U, b1) - seq_mul(W, seq_mul(b1, d1))
    out[2] = seq_mul(V, b2) - seq_mul(T, seq_mul(b2, d2))
    out[3] = seq_mul(U, c1) - seq_mul(W, seq_mul(c1, d1))
    out[4] = seq_mul(V, c2) - seq_mul(T, seq_mul(c2, d2))
    out[5] = 2.0 * seq_mul(U, d1) - seq_mul(W, seq_mul(d1, d1)) + loss * co.src1
    out[6] = 2.0 * seq_mul(V, d2) - seq_mul(T, seq_mul(d2, d2)) + loss * co.src2
    return out


def _state_rows(state: PState) -> np.ndarray:
    return np.array([state.a.coefficients, state.b1.coefficients,
                     state.b2.coefficients, state.c1.coefficients,
                     state.c2.coefficients, state.d1.coefficients,
                     state.d2.coefficients])


def _rows_state(z: np.ndarray, time: float) -> PState:
    return PState(a=CountingJet(z[0]), b1=CountingJet(z[1]),
                  b2=CountingJet(z[2]), c1=CountingJet(z[3]),
                  c2=CountingJet(z[4]), d1=CountingJet(z[5]),
                  d2=CountingJet(z[6]), time=time)


def ode_rhs(state: PState, coeffs: OdeCoefficients) -> PState:
    """Time derivatives of all seven coefficients (pure algebra, no errors)."""
    return _rows_state(_rhs_rows(_state_rows(state), coeffs), state.time)


def _riccati_root(rate2, cross, loss, src):
    """Steady root (rate + sqrt(rate^2 - cross*G*(e^s-1)*src)) / cross of the
    width Riccati equation, principal branch anchored at s=0."""
    # cross*G*(e^s-1)*src = -cross*counting_loss*src
    arg = seq_mul(rate2, rate2) + seq_mul(cross, loss) * src
    if arg[0].real <= 0.0:
        raise BranchAmbiguity(
            f"square-root argument has nonpositive constant term {arg[0]:g}")
    return seq_mul(rate2 + seq_sqrt(arg), seq_reciprocal(cross))


def steady_state(coeffs: OdeCoefficients) -> PState:
    """Long-time attractor of the seven ODEs.

    b and c vanish; the widths take the counting-dependent closed form
    d_i = (rate_i + sqrt(rate_i^2 + cross_i * counting_loss * src_i))/cross_i.
    The constant ``a`` has no attractor (it grows linearly at
    :func:`steady_a_rate`), so the returned state carries a = 0 and
    time = inf.
    """
    n = coeffs.order + 1
    zero = CountingJet(np.zeros(n, dtype=complex))
    loss = coeffs.counting_loss.coefficients
    d1 = _riccati_root(coeffs.U_bar.coefficients, coeffs.W_bar.coefficients,
                       loss, coeffs.src1)
    d2 = _riccati_root(coeffs.V_bar.coefficients, coeffs.T_bar.coefficients,
                       loss, coeffs.src2)
    return PState(a=zero, b1=zero, b2=zero, c1=zero, c2=zero,
                  d1=CountingJet(d1), d2=CountingJet(d2), time=math.inf)


def steady_a_rate(coeffs: OdeCoefficients) -> CountingJet:
    """Asymptotic linear growth rate of the ansatz constant a.

    Equals minus the fluctuation part of the counting generating-function
    rate (the Poisson ``drive_rate`` is not included here).
    """
    U = coeffs.U_bar.coefficients
    V = coeffs.V_bar.coefficients
    loss = coeffs.counting_loss.coefficients
    arg1 = seq_mul(U, U) + seq_mul(coeffs.W_bar.coefficients, loss) * coeffs.src1
    arg2 = seq_mul(V, V) + seq_mul(coeffs.T_bar.coefficients, loss) * coeffs.src2
    if arg1[0].real <= 0.0 or arg2[0].real <= 0.0:
        raise BranchAmbiguity("square-root argument has nonpositive constant term")
    rate = -U - V + seq_sqrt(arg1) + seq_sqrt(arg2) \
        + loss * (coeffs.b_sq + coeffs.d_sq)
    return CountingJet(rate)


def log_gaussian_mass(state: PState) -> CountingJet:
    """ln of the total P-mass: -a + sum_i [ln(pi/d_i) + b_i c_i / d_i].

    At s = 0 and with a normalized initial state this is the conserved
    log-trace (identically zero along exact trajectories).
    """
    total = -state.a.coefficients.copy()
    for b, c, d in ((state.b1, state.c1, state.d1),
                    (state.b2, state.c2, state.d2)):
        dc = d.coefficients
        rec = seq_reciprocal(dc)
        total += CountingJet(math.pi * rec).log().coefficients
        total += seq_mul(seq_mul(b.coefficients, c.coefficients), rec)
    return CountingJet(total)


def _check_frame_consistency(coeffs: OdeCoefficients, frame: BogoliubovFrame):
    g = coeffs.gamma_loss
    pairs = (
        (coeffs.U_bar.coefficients[0], 0.5 * g * (frame.A ** 2 - frame.B ** 2)),
        (coeffs.V_bar.coefficients[0], 0.5 * g * (frame.G ** 2 - frame.D ** 2)),
        (coeffs.W_bar.coefficients[0], g * frame.B ** 2),
        (coeffs.T_bar.coefficients[0], g * frame.D ** 2),
    )
    for got, want in pairs:
        if abs(got - want) > 1e-9 * max(1.0, abs(want)):
            raise InvalidParams(
                "ode coefficients do not belong to the supplied frame")


def evolve(ic: GaussianIC, coeffs: OdeCoefficients, t_final: float,
           frame: BogoliubovFrame, t_eval=None,
           rtol: float = 1e-10, atol: float = 1e-12) -> list[PState]:
    """Integrate the seven jet ODEs from a Gaussian initial condition.

    Returns the state at each requested time (default: 201 uniform samples
    including the endpoints).  ``frame`` is cross-checked against ``coeffs``
    to catch mismatched inputs early.
    """
    if t_final < 0:
        raise InvalidParams(f"t_final must be nonnegative, got {t_final}")
    _check_frame_consistency(coeffs, frame)
    state0 = initial_state(ic, coeffs.order)
    if t_eval is None:
        t_eval = np.linspace(0.0, t_final, 201) if t_final > 0 else [0.0]
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    if t_eval.size and (t_eval[0] < 0 or t_eval[-1] > t_final):
        raise InvalidParams("t_eval must lie within [0, t_final]")
    if t_final == 0.0:
        return [state0]

    n = coeffs.order + 1
    shape = (7, n)

    def rhs(_t, y):
        z = np.ascontiguousarray(y).view(complex).reshape(shape)
        return _rhs_rows(z, coeffs).reshape(-1).view(float)

    y0 = _state_rows(state0).reshape(-1).view(float).copy()
    sol = solve_ivp(rhs, (0.0, t_final), y0, method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise NonConvergence(f"ODE integration failed: {sol.message}")
    states = []
    for i, t in enumerate(sol.t):
        z = np.ascontiguousarray(sol.y[:, i]).view(complex).reshape(shape)
        states.append(_rows_state(z.copy(), float(t)))
    return states
