"""Pure-NumPy reference implementations of the hot numeric kernels.

``abkit.backend`` prefers the compiled ``abkit._fast`` twins of these
functions when the extension is importable; this module is the always
available fallback and the ground truth the extension is tested against.

Conventions: ``nu`` is a real order >= 0, ``alpha0`` a flux reduced to
[-1/2, 1/2], ``delta`` enters through cos/sin of (delta + pi).
"""

from __future__ import annotations

import math

import numpy as np

_LOG_TINY = -575.0  # exp() underflow guard


def jnu_series_batch(nu: float, x: np.ndarray, terms: int = 90) -> np.ndarray:
    """Power series for J_nu on the safe region (x small or nu dominant)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    logpref = nu * np.log(xp / 2.0) - math.lgamma(nu + 1.0)
    ok = logpref > _LOG_TINY
    t = np.zeros_like(xp)
    t[ok] = np.exp(logpref[ok])
    acc = t.copy()
    q = -0.25 * xp * xp
    for m in range(1, terms):
        t = t * q / (m * (m + nu))
        acc += t
    out[pos] = acc
    if nu == 0.0:
        out[~pos] = 1.0
    return out


def jnu_asym_batch(nu: float, x: np.ndarray, kmax: int = 40) -> np.ndarray:
    """Hankel large-argument expansion; caller guarantees admissibility."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    live = np.ones_like(x, dtype=bool)
    prev = np.full_like(x, np.inf)
    for k in range(1, 2 * kmax):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = np.abs(term)
        live &= mag < prev
        prev = mag
        upd = live & (mag > 1e-19)
        sgn = -1.0 if (k // 2) % 2 == 1 else 1.0
        if k % 2 == 1:
            q[upd] += sgn * term[upd]
        else:
            p[upd] += sgn * term[upd]
        if not np.any(upd):
            break
    chi = x - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def jnu_miller_batch(nu: float, x: np.ndarray) -> np.ndarray:
    """Backward recurrence through the transition zone x ~ nu.

    Seeds a decaying chain above each x's turning point, recurses down to
    the fractional order nu0 = nu - floor(nu), and rescales by a
    least-squares match against J_{nu0} and J_{nu0+1} from the
    large-argument expansion (valid there since nu0 + 1 < 2 and the zone
    has x > 12; the two anchors are never both near zeros of J).
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return np.zeros_like(x)
    nfloor = int(math.floor(nu))
    nu0 = nu - nfloor
    # per-column seed order index above the Airy turning point
    m_seed = np.ceil(np.maximum(x, nu) + 10.5 * np.cbrt(x) + 26.0 - nu0).astype(int)
    m_top = int(np.max(m_seed))
    cur = np.zeros(x.size)          # j at order nu0 + m
    up = np.zeros(x.size)           # j at order nu0 + m + 1
    out_unscaled = np.zeros(x.size)
    bot0 = np.zeros(x.size)
    bot1 = np.zeros(x.size)
    # growth can exceed float range; rescale and track the factor applied
    # after the target row was captured
    post_factor = np.ones(x.size)
    for m in range(m_top, -1, -1):
        nxt = (2.0 * (nu0 + m + 1) / x) * cur - up
        up = cur
        cur = nxt
        seed_here = m_seed == m
        if np.any(seed_here):
            cur[seed_here] = 1.0
            up[seed_here] = 0.0
        big = np.abs(cur) > 1e100
        if np.any(big):
            cur[big] *= 1e-200
            up[big] *= 1e-200
            if m < nfloor:
                post_factor[big] *= 1e-200
        if m == nfloor:
            out_unscaled = cur.copy()
        if m == 1:
            bot1 = cur.copy()
        if m == 0:
            bot0 = cur.copy()
    ref0 = jnu_asym_batch(nu0, x)
    ref1 = jnu_asym_batch(nu0 + 1.0, x)
    scale = (ref0 * bot0 + ref1 * bot1) / (bot0 * bot0 + bot1 * bot1)
    return out_unscaled * post_factor * scale


def inu_series_batch(nu: float, z: np.ndarray, terms: int = 120) -> np.ndarray:
    """Power series for I_nu; valid for real or complex z (principal branch)."""
    z = np.asarray(z)
    out = np.zeros(z.shape, dtype=complex)
    pos = np.abs(z) > 0
    zp = z[pos].astype(complex)
    logpref = nu * np.log(zp / 2.0) - math.lgamma(nu + 1.0)
    t = np.exp(np.where(logpref.real > _LOG_TINY, logpref, _LOG_TINY))
    acc = t.copy()
    q = 0.25 * zp * zp
    for m in range(1, terms):
        t = t * q / (m * (m + nu))
        acc += t
    out[pos] = acc
    if nu == 0.0:
        out[~pos] = 1.0
    if np.isrealobj(z):
        return out.real
    return out


def b_alpha_batch(
    alpha0: float, cosd: float, sind: float, s: np.ndarray
) -> np.ndarray:
    """Diffractive angular density B on a real s >= 0 grid.

    ``cosd``/``sind`` are cos/sin of (delta + pi); alpha0 is the flux
    reduced to [-1/2, 1/2], for which the formula decays in s.
    """
    s = np.asarray(s, dtype=float)
    aa = abs(alpha0)
    sh = np.sinh(0.5 * s)
    # cosh s - cos(delta+pi) without cancellation near (0, 0).
    den = 2.0 * sh * sh + (1.0 - cosd)
    ems = np.exp(-s)
    num_re = (ems - cosd) * np.sinh(alpha0 * s)
    num_im = -sind * np.cosh(alpha0 * s)
    ratio = np.empty(s.shape, dtype=complex)
    zero = den == 0.0
    ratio[~zero] = (num_re[~zero] + 1j * num_im[~zero]) / den[~zero]
    ratio[zero] = -2.0 * alpha0
    return -(math.sin(aa * math.pi) * np.exp(-aa * s) + math.sin(alpha0 * math.pi) * ratio)


def b_alpha_contour_batch(
    alpha0: float, cosd: float, sind: float, w: np.ndarray
) -> np.ndarray:
    """B along the rotated contour cosh s = 1 + w^2, including the measure
    factor 2/sqrt(2 + w^2), so that

        int_0^inf e^{-c cosh s} B(s) ds  =  int_ray e^{-c(1+w^2)} (this) dw.

    The w-substitution removes the sqrt endpoint singularity and keeps all
    branch points (v <= 1 in v = cosh s) off the integration ray.
    """
    w = np.asarray(w, dtype=complex)
    root = np.sqrt(w * w + 2.0)
    q = 1.0 + w * w - w * root          # e^{-s}, |q| <= 1 off the cut
    aa = abs(alpha0)
    qa = q**alpha0
    qma = q**(-alpha0)
    qabs = q**aa
    sinh_a = 0.5 * (qma - qa)
    cosh_a = 0.5 * (qma + qa)
    den = w * w + (1.0 - cosd)
    num = (q - cosd) * sinh_a - 1j * sind * cosh_a
    ratio = np.empty(w.shape, dtype=complex)
    zero = den == 0.0
    ratio[~zero] = num[~zero] / den[~zero]
    ratio[zero] = -2.0 * alpha0
    b = -(math.sin(aa * math.pi) * qabs + math.sin(alpha0 * math.pi) * ratio)
    return b * (2.0 / root)
