"""Independent integral-representation evaluations of J_nu and I_nu.

These are the dual route for the Bessel implementations: straightforward
quadrature of

    J_nu(x) = (x/2)^nu / (Gamma(nu+1/2) Gamma(1/2))
              * int_{-pi/2}^{pi/2} cos(x sin phi) cos^{2 nu}(phi) dphi

(the Poisson form of the standard [-1,1] representation, substituted to
remove the endpoint singularity at nu < 1/2) and

    I_nu(z) = (1/pi) int_0^pi e^{z cos s} cos(nu s) ds
              - sin(nu pi)/pi int_0^inf e^{-z cosh s - nu s} ds.

They are deliberately slow and share no code with abkit.specfun.bessel.
Well-conditioned only while (x/2)^nu / Gamma(nu+1/2) stays moderate.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import gl_refine, quad_semi_infinite, tanh_sinh


def j_integral_oracle(nu: float, x: float, tol: float = 1e-12) -> float:
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    pref = math.exp(nu * math.log(x / 2.0) - math.lgamma(nu + 0.5)) / math.sqrt(math.pi)
    # tanh-sinh handles the cos^{2 nu} endpoint power for nu < 1/2
    val, _ = tanh_sinh(
        lambda p: np.cos(x * np.sin(p)) * np.cos(p) ** (2.0 * nu),
        -math.pi / 2.0,
        math.pi / 2.0,
        tol,
        max_level=9,
    )
    return pref * float(np.real(val))


def i_integral_oracle(nu: float, z: float, tol: float = 1e-12) -> float:
    first, _ = gl_refine(
        lambda s: np.exp(z * np.cos(s)) * np.cos(nu * s),
        0.0,
        math.pi,
        tol,
        n0=max(64, int(4 * abs(z))),
    )
    value = float(np.real(first)) / math.pi
    if nu != round(nu):
        scale = 1.0 / max(nu + max(z, 0.3), 1.0)
        second, _ = quad_semi_infinite(
            lambda s: np.exp(-z * np.cosh(s) - nu * s), scale, tol
        )
        value -= math.sin(nu * math.pi) / math.pi * float(np.real(second))
    return value
