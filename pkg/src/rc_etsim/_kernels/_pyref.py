"""Pure-numpy reference kernels (fallback when the compiled core is absent).

State layout: (ρ₁₁, ρ₂₂, ρ₁₂, ρ₂₁, η) with η̇ = 2Γρ₂₂ integrated alongside
the density matrix so trace + η is conserved to integrator accuracy.  The
equations of motion (site-energy difference e, coupling element V/2):

    ρ̇₁₁ = -i(V/2)(ρ₂₁ - ρ₁₂)
    ρ̇₂₂ = +i(V/2)(ρ₂₁ - ρ₁₂) - 2Γρ₂₂
    ρ̇₁₂ = -(ie + Γ)ρ₁₂ - i(V/2)(ρ₂₂ - ρ₁₁)
    ρ̇₂₁ = +(ie - Γ)ρ₂₁ + i(V/2)(ρ₂₂ - ρ₁₁)

Classical RK4, fixed step; the noise term enters through e(t) = ε + δ·ξ(t)
held constant across each grid cell (the telegraph process is piecewise
constant, so sample-and-hold at the cell start is exact up to event
rounding).
"""

import numpy as np

BACKEND = "python"


def _generator(eps, v, gamma):
    c = 0.5j * v
    a = np.zeros((5, 5), dtype=complex)
    a[0, 2] = c
    a[0, 3] = -c
    a[1, 1] = -2.0 * gamma
    a[1, 2] = -c
    a[1, 3] = c
    a[2, 0] = c
    a[2, 1] = -c
    a[2, 2] = -(1j * eps + gamma)
    a[3, 0] = -c
    a[3, 1] = c
    a[3, 3] = 1j * eps - gamma
    a[4, 1] = 2.0 * gamma
    return a


def propagate_const_rk4(eps, v, gamma, rho0, dt, n_steps, record_every):
    """Constant-Hamiltonian propagation via the one-step RK4 matrix.

    The RK4 update of a linear autonomous system is itself linear, so one
    step is a fixed 5x5 matrix; ``record_every`` steps are composed into a
    single recording matrix.

    Returns (rho11, rho22, rho12, rho21, eta) arrays at recorded points.
    """
    a = _generator(eps, v, gamma) * dt
    m = np.eye(5, dtype=complex)
    term = np.eye(5, dtype=complex)
    for k in range(1, 5):
        term = term @ a / k
        m = m + term
    m_rec = np.linalg.matrix_power(m, record_every)
    n_rec = n_steps // record_every
    y = np.array([rho0[0], rho0[1], rho0[2], rho0[3], 0.0], dtype=complex)
    out = np.empty((n_rec + 1, 5), dtype=complex)
    out[0] = y
    for k in range(1, n_rec + 1):
        y = m_rec @ y
        out[k] = y
    return (
        out[:, 0].real.copy(),
        out[:, 1].real.copy(),
        out[:, 2].copy(),
        out[:, 3].copy(),
        out[:, 4].real.copy(),
    )


def propagate_noise_rk4(eps, v, gamma, delta, xi, rho0, dt, record_every):
    """Batch RK4 propagation under per-trajectory gap noise.

    Parameters
    ----------
    xi : (m, n_steps) array
        Noise value per trajectory and grid cell (sample-and-hold).
    rho0 : 4-tuple of complex
        Initial (ρ₁₁, ρ₂₂, ρ₁₂, ρ₂₁), shared by all trajectories.

    Returns
    -------
    (rho11, rho22, rho12, rho21, eta) arrays of shape (m, n_rec + 1).
    """
    xi = np.asarray(xi, dtype=float)
    m, n_steps = xi.shape
    n_rec = n_steps // record_every
    c = 0.5j * v
    g2 = 2.0 * gamma
    ig = 1j * eps + gamma

    r11 = np.full(m, rho0[0], dtype=complex)
    r22 = np.full(m, rho0[1], dtype=complex)
    r12 = np.full(m, rho0[2], dtype=complex)
    r21 = np.full(m, rho0[3], dtype=complex)
    eta = np.zeros(m)

    o11 = np.empty((m, n_rec + 1))
    o22 = np.empty((m, n_rec + 1))
    o12 = np.empty((m, n_rec + 1), dtype=complex)
    o21 = np.empty((m, n_rec + 1), dtype=complex)
    oeta = np.empty((m, n_rec + 1))
    o11[:, 0] = r11.real
    o22[:, 0] = r22.real
    o12[:, 0] = r12
    o21[:, 0] = r21
    oeta[:, 0] = eta

    def deriv(y11, y22, y12, y21, iedk):
        # iedk = i·e(t) + Γ per trajectory
        d11 = -c * (y21 - y12)
        d22 = -d11 - g2 * y22
        pump = c * (y22 - y11)
        d12 = -iedk * y12 - pump
        d21 = (iedk - g2) * y21 + pump
        return d11, d22, d12, d21, g2 * y22.real

    sixth = dt / 6.0
    half = 0.5 * dt
    for k in range(n_steps):
        iedk = 1j * (eps + delta * xi[:, k]) + gamma
        k1 = deriv(r11, r22, r12, r21, iedk)
        k2 = deriv(r11 + half * k1[0], r22 + half * k1[1],
                   r12 + half * k1[2], r21 + half * k1[3], iedk)
        k3 = deriv(r11 + half * k2[0], r22 + half * k2[1],
                   r12 + half * k2[2], r21 + half * k2[3], iedk)
        k4 = deriv(r11 + dt * k3[0], r22 + dt * k3[1],
                   r12 + dt * k3[2], r21 + dt * k3[3], iedk)
        r11 = r11 + sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        r22 = r22 + sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        r12 = r12 + sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        r21 = r21 + sixth * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
        eta = eta + sixth * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4])
        if (k + 1) % record_every == 0:
            j = (k + 1) // record_every
            o11[:, j] = r11.real
            o22[:, j] = r22.real
            o12[:, j] = r12
            o21[:, j] = r21
            oeta[:, j] = eta
    return o11, o22, o12, o21, oeta
