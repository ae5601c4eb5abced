"""The angular phase factor A and diffractive density B of the kernel split.

Branch convention for A: the mode sum defining the kernel is 2 pi periodic
in delta = theta - thetabar, which forces

    A_alpha(delta) = exp(i alpha wrap(delta)),   wrap(delta) in (-pi, pi],

i.e. the 2 pi shift enters with the sign of delta.  This is confirmed
numerically against the truncated mode sums (see abkit.kernel.modesum and
the factor tests).

Fluxes outside [-1/2, 1/2] are reduced: shifting alpha by an integer m
re-indexes the mode sum and multiplies the whole kernel by e^{i m delta},
so A and B both carry that phase while the reduced formula keeps B
integrable on [0, inf).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .. import backend
from ..errors import AccuracyError
from ..geometry import TWO_PI, FluxParam
from ..specfun.quadrature import gauss_legendre, panel_nodes


@dataclass(frozen=True)
class AngleDiff:
    """Signed angle difference in (-2 pi, 2 pi) with its branch indicator."""

    delta: float

    def __post_init__(self):
        if not -TWO_PI < self.delta < TWO_PI:
            raise ValueError("angle difference must lie in (-2 pi, 2 pi)")

    @property
    def wrapped(self) -> float:
        """Representative of delta mod 2 pi in (-pi, pi]."""
        w = math.remainder(self.delta, TWO_PI)
        if w <= -math.pi:
            w += TWO_PI
        return w

    @property
    def outer_branch(self) -> bool:
        """True when pi < |delta| < 2 pi."""
        return abs(self.delta) > math.pi

    @property
    def on_boundary(self) -> bool:
        return abs(abs(self.delta) - math.pi) < 1e-13


def _as_delta(delta) -> AngleDiff:
    return delta if isinstance(delta, AngleDiff) else AngleDiff(float(delta))


def boundary_snapped_trig(delta: float) -> tuple[float, float]:
    """cos/sin of (delta + pi) with exact-boundary float noise removed.

    At |delta| = pi the true sin is 0; the rounding residue of sin(2 pi)
    would otherwise blow up against the resolved near-pole denominators.
    """
    arg = delta + math.pi
    cosd, sind = math.cos(arg), math.sin(arg)
    if abs(sind) < 1e-12 and cosd > 0.0:
        return 1.0, 0.0
    return cosd, sind


def angular_factor_A(flux: FluxParam, delta) -> complex:
    """Unit-modulus geometric phase e^{i alpha wrap(delta)}."""
    d = _as_delta(delta)
    return cmath.exp(1j * flux.alpha * d.wrapped)


def diffractive_factor_B(flux: FluxParam, s, delta) -> complex | np.ndarray:
    """Diffractive density B_alpha(s, delta); identically 0 at integer flux.

    Decays like exp(-min(|a|, 1-|a|) s) with a the reduced flux, which is
    what makes int_0^inf |B| ds finite.
    """
    d = _as_delta(delta)
    if flux.is_integer:
        out = np.zeros(np.shape(s), dtype=complex)
        return out if np.ndim(s) else complex(out)
    cosd, sind = boundary_snapped_trig(d.delta)
    vals = backend.b_alpha_batch(
        flux.reduced, cosd, sind, np.atleast_1d(np.asarray(s, float))
    )
    vals = vals * cmath.exp(1j * flux.shift * d.delta)
    return vals if np.ndim(s) else complex(vals[0])


def b_decay_rate(flux: FluxParam) -> float:
    """Slowest exponential decay rate of |B| in s."""
    a = abs(flux.reduced)
    return max(min(a, 1.0 - a), 1e-2)


def _b_panel_edges(flux: FluxParam, delta: AngleDiff, tail_tol: float) -> np.ndarray:
    """Panel edges resolving the near-boundary Lorentzian spike at s ~ 0
    and reaching far enough that the exponential tail is below tail_tol."""
    rate = b_decay_rate(flux)
    s_end = max(-math.log(tail_tol) / rate, 8.0)
    spike = 2.0 * abs(math.sin(0.5 * (delta.delta + math.pi)))
    first = min(max(spike / 4.0, 1e-4), 0.5)
    edges = [0.0]
    e = first
    while e < s_end:
        edges.append(e)
        e *= 1.8
    edges.append(s_end)
    return np.asarray(edges)


def b_l1_norm(flux: FluxParam, delta, tol: float = 1e-10) -> float:
    """int_0^inf |B_alpha(s, delta)| ds by panel quadrature with an
    analytic exponential tail bound."""
    d = _as_delta(delta)
    if flux.is_integer:
        return 0.0
    cosd, sind = boundary_snapped_trig(d.delta)
    a0 = flux.reduced
    rate = b_decay_rate(flux)

    def absb(s):
        return np.abs(backend.b_alpha_batch(a0, cosd, sind, s))

    total = 0.0
    err = 0.0
    for n in (16, 24):
        edges = _b_panel_edges(flux, d, tol * rate / 10.0)
        nodes, weights = panel_nodes(edges, n)
        val = float(weights @ absb(nodes))
        err = abs(val - total)
        total = val
    s_end = _b_panel_edges(flux, d, tol * rate / 10.0)[-1]
    tail = float(absb(np.array([s_end]))[0]) / rate
    if err + tail > max(tol, 1e-14) * max(total, 1.0) * 10.0:
        raise AccuracyError("b_l1_norm did not converge", best=total)
    return total


def b_l1_sup(flux: FluxParam, n_delta: int = 33, tol: float = 1e-9) -> float:
    """sup over a delta grid of int |B| ds (the realized diffractive
    constant)."""
    grid = np.linspace(-math.pi + 1e-3, math.pi - 1e-3, n_delta)
    return max(b_l1_norm(flux, float(d), tol) for d in grid)
