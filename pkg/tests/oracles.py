"""Independent reference computations used by the test-suite.

Nothing here calls into the code paths it is used to check.
"""

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

from optoent.params import PhysicalParams, default_params


def _symbolic_jacobian():
    q, p, X, Y = sp.symbols("q p X Y", real=True)
    wm, gam, G, R, E, k1, kap, Delta = sp.symbols("omega_m gamma G R E kappa1 kappa Delta",
                                                  real=True)
    a = (X + sp.I * Y) / sp.sqrt(2)
    ad = sp.conjugate(a)
    qdot = wm * p
    pdot = -wm * q - gam * p + G * ad * a - sp.I * R / sp.sqrt(2 * k1) * E * (ad - a)
    adot = (-sp.I * Delta * a - (kap + R * q) * a + sp.I * G * q * a
            + (sp.sqrt(2 * k1) + R * q / sp.sqrt(2 * k1)) * E)
    Xdot = sp.sqrt(2) * sp.re(sp.expand(adot))
    Ydot = sp.sqrt(2) * sp.im(sp.expand(adot))
    field = sp.Matrix([qdot, sp.expand(pdot), Xdot, Ydot])
    J = field.jacobian([q, p, X, Y])
    J = J.applyfunc(sp.simplify)
    syms = (q, p, X, Y, wm, gam, G, R, E, k1, kap, Delta)
    return sp.lambdify(syms, J, "numpy")


_JAC = None


def linearized_drift(rates, ss):
    """Jacobian of the classical Langevin vector field at the steady state."""
    global _JAC
    if _JAC is None:
        _JAC = _symbolic_jacobian()
    gamma = 0.0 if rates.drop_gamma_in_drift else rates.gamma_m
    # bare detuning so that Delta - G q_s equals the effective detuning
    delta_bare = ss.delta_s + rates.D_norm * ss.q_s
    J = _JAC(ss.q_s, 0.0, ss.X_s, 0.0, rates.omega_m, gamma, rates.D_norm, rates.R_norm,
             rates.drive_E, rates.kappa1, rates.kappa, delta_bare)
    return np.array(J, dtype=float)


def integrate_covariance(M, N, scale, *, tol=1e-12, chunk=50.0, t_max=1e6):
    """Integrate dV/dt = M V + V M^T + N from the vacuum until it stops moving.

    Time is measured in units of 1/scale. Explicit adaptive Runge-Kutta,
    continued chunk by chunk until ||dV/dt|| < tol * ||N||.
    """
    Ms = M / scale
    Ns = N / scale
    n = M.shape[0]

    def rhs(_, v):
        V = v.reshape(n, n)
        return (Ms @ V + V @ Ms.T + Ns).ravel()

    v = (0.5 * np.eye(n)).ravel()
    t = 0.0
    norm_n = np.abs(Ns).max()
    while t < t_max:
        sol = solve_ivp(rhs, (t, t + chunk), v, method="DOP853", rtol=1e-12, atol=1e-14)
        v = sol.y[:, -1]
        t += chunk
        if np.abs(rhs(t, v)).max() < tol * norm_n:
            V = v.reshape(n, n)
            return 0.5 * (V + V.T), t
    raise RuntimeError("covariance did not settle")


def random_params(rng) -> PhysicalParams:
    """Random operating point spread over the physically interesting region."""
    base = default_params()
    return base.replace(
        coupling_ratio=float(rng.uniform(0.05, 2.0)),
        temperature_T=float(10 ** rng.uniform(-3, 3)),
        mech_Q=float(10 ** rng.uniform(2, 7)),
        input_power_P=float(10 ** rng.uniform(-3, -0.5)),
        rc_scale=float(rng.choice([0.0, 1.0, rng.uniform(0, 60)])),
        dc_scale=float(rng.uniform(0.0, 1.5)),
        detuning_s=float(rng.uniform(-1.0, 4.0)) * base.mech_freq_omega_m,
    )
