"""Special functions used by the transfer-rate formulas.

Two functions are provided with documented accuracy, plus the scaled variant
of the complementary error function that the rate formulas actually need:

- ``exp_integral_e1``: E1(x) = ∫_x^∞ e^(-t)/t dt for x > 0, relative error
  below 1e-12.
- ``erfc_complex`` / ``erfcx_complex``: erfc(z) and e^(z²)·erfc(z) for complex
  z, relative error below 1e-10 on the working range |Re z|, |Im z| <= 1e6
  (values representable in double precision).

Everything here is a pure function of its arguments; no module state.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["exp_integral_e1", "erfc_complex", "erfcx_complex"]

_EULER_GAMMA = 0.57721566490153286060651209008240243
_SQRT_PI = math.sqrt(math.pi)

# erfc(z) magnitude is ~ e^(Im²-Re²); past this the result overflows a double.
_ERFC_LOG_OVERFLOW = 709.0
_WORKING_RANGE = 1.0e6


# ---------------------------------------------------------------------------
# exponential integral E1
# ---------------------------------------------------------------------------

def _e1_series(x):
    # E1(x) = -gamma - ln x + sum_k (-1)^(k+1) x^k / (k k!), for x < 1.5
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 40):
        term = term * (-x) / k
        total = total - term / k
    return -_EULER_GAMMA - np.log(x) + total


def _e1_confrac(x):
    # Modified Lentz evaluation of E1(x) = e^(-x) / (x+1 - 1/(x+3 - 4/(...))),
    # convergent for x >= 1.5.
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 200):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return np.exp(-x) * h


def exp_integral_e1(x):
    """Exponential integral E1(x) = ∫_x^∞ e^(-t)/t dt for x > 0.

    Power series with the Euler–Mascheroni constant below x = 1.5 and a
    continued fraction above; the two branches agree to ~1e-13 at the seam.

    Parameters
    ----------
    x : float or ndarray
        Argument(s), strictly positive.

    Returns
    -------
    float or ndarray
        E1(x), relative error <= 1e-12.

    Raises
    ------
    ValueError
        If any argument is not finite and strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("exp_integral_e1 requires finite x > 0")
    out = np.empty_like(arr)
    small = arr < 1.5
    if np.any(small):
        out[small] = _e1_series(arr[small])
    if np.any(~small):
        out[~small] = _e1_confrac(arr[~small])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# complex complementary error function
# ---------------------------------------------------------------------------

def _erf_series(z):
    # Maclaurin series of erf; cancellation-safe for |Re z| <= 2 (any Im z
    # that keeps the result in double range).  Intermediate terms reach
    # ~e^(|z|²); rescale when that would overflow.
    zsq = z * z
    r2 = abs(zsq)
    scale = 0.0
    if r2 > 620.0:
        scale = r2 - 620.0
    term = z * math.exp(-scale)
    total = term
    # Terms peak near n = |z|² and then decay like a Gaussian of width ~|z|.
    nmax = int(r2 + 12.0 * math.sqrt(r2)) + 80
    for n in range(1, nmax):
        term = term * (-zsq) / n
        total += term / (2 * n + 1)
        if abs(term) < 1e-18 * abs(total):
            break
    return (2.0 / _SQRT_PI) * total * math.exp(scale)


def _dawson(y):
    # Rybicki's exponentially convergent sum for the Dawson function F(y);
    # accuracy ~e^(-(pi/(2h))²) with h = 0.25.
    if y == 0.0:
        return 0.0
    h = 0.25
    n0 = 2 * int(round(0.5 * y / h))  # even center
    ns = np.arange(n0 - 30, n0 + 32, 2) + 1  # odd offsets
    xs = y - ns * h
    return float(np.sum(np.exp(-xs * xs) / ns)) / _SQRT_PI


def _faddeeva_midpoint(zeta):
    # Midpoint-rule evaluation of w(zeta) = (i/pi)∫ e^(-t²)/(zeta-t) dt for
    # Im(zeta) > 0, with the image-pole correction required for
    # Im(zeta) < pi/h.  Uniform absolute error ~e^(-(pi/h)²) ≈ 7e-18.
    h = 0.5
    k = int(math.ceil((abs(zeta.real) + 7.0) / h))
    taus = (np.arange(-k, k) + 0.5) * h
    s = np.sum(np.exp(-taus * taus) / (zeta - taus))
    w = (1j * h / math.pi) * s
    if zeta.imag < math.pi / h:
        q = np.exp(2j * math.pi * zeta / h)
        w = w + 2.0 * np.exp(-zeta * zeta) * q / (1.0 + q)
    return complex(w)


def _erfcx_asymptotic(z):
    # erfcx(z) ~ (1/(z sqrt(pi))) * sum_k (-1)^k (2k-1)!!/(2z²)^k, |z| >= 100
    u = 1.0 / (2.0 * z * z)
    term = 1.0
    total = 1.0
    for k in range(1, 8):
        term *= -(2 * k - 1) * u
        total += term
    return total / (z * _SQRT_PI)


def _erfcx_upper_quadrant(z):
    # erfcx on {Re z >= 0, Im z >= 0}, all magnitudes O(1)..O(e^(Re²-Im²))
    # handled without intermediate overflow.
    x, y = z.real, z.imag
    if x == 0.0:
        # erfcx(iy) = e^(-y²) - (2i/sqrt(pi)) F(y) with F the Dawson function
        return complex(math.exp(-y * y), -2.0 / _SQRT_PI * _dawson(y))
    if abs(z) >= 100.0:
        return _erfcx_asymptotic(z)
    if x <= 2.0 and y <= 6.0:
        return complex(np.exp(z * z) * (1.0 - _erf_series(z)))
    return _faddeeva_midpoint(1j * z)


def _validate_arg(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("erfc argument must be finite")
    if abs(z.real) > _WORKING_RANGE or abs(z.imag) > _WORKING_RANGE:
        raise OverflowError(
            "erfc argument outside working range |Re z|, |Im z| <= 1e6"
        )
    return z


def erfcx_complex(z):
    """Scaled complementary error function erfcx(z) = e^(z²) erfc(z).

    Free of the e^(-z²) overflow/underflow of erfc itself, so it is the form
    the damped-rate formulas use directly.  Same working range and accuracy
    as ``erfc_complex``; additionally requires Re(z)² - Im(z)² <= 709 when
    Re z < 0 (there erfcx(z) = 2 e^(z²) - erfcx(-z) genuinely overflows).
    """
    z = _validate_arg(z)
    if z.imag < 0.0:
        return complex(np.conj(erfcx_complex(np.conj(z))))
    if z.real < 0.0:
        zz = z * z
        if zz.real > _ERFC_LOG_OVERFLOW:
            raise OverflowError("erfcx overflows for this argument")
        return complex(2.0 * np.exp(zz) - erfcx_complex(-z))
    return _erfcx_upper_quadrant(z)


def erfc_complex(z):
    """Complementary error function erfc(z) = 1 - erf(z) for complex z.

    Maclaurin series for |Re z| <= 2, a midpoint-rule Faddeeva sum in the
    middle region, and the large-|z| asymptotic series beyond |z| = 100;
    the branch seams agree to ~1e-13.  Satisfies erfc(conj z) = conj(erfc z)
    and erfc(-z) = 2 - erfc(z) by construction.

    Parameters
    ----------
    z : complex
        Argument with |Re z|, |Im z| <= 1e6 (documented working range).

    Returns
    -------
    complex
        erfc(z), relative error <= 1e-10 wherever the value is representable
        in double precision; graceful underflow to 0 for Re z >> 27.

    Raises
    ------
    OverflowError
        Outside the working range, or when |erfc(z)| ~ e^(Im²-Re²) exceeds
        the double range.
    ValueError
        For non-finite arguments.
    """
    z = _validate_arg(z)
    if z.imag < 0.0:
        return complex(np.conj(erfc_complex(np.conj(z))))
    if z.real < 0.0:
        return complex(2.0 - erfc_complex(-z))
    x, y = z.real, z.imag
    if y * y - x * x > _ERFC_LOG_OVERFLOW:
        raise OverflowError("erfc magnitude overflows double precision")
    if x == 0.0:
        # erfc(iy) = 1 - (2i/sqrt(pi)) e^(y²) F(y)
        return complex(1.0, -2.0 / _SQRT_PI * math.exp(y * y) * _dawson(y))
    if x <= 2.0:
        return complex(1.0 - _erf_series(z))
    return complex(np.exp(-z * z) * _erfcx_upper_quadrant(z))
