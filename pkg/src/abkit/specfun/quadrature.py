"""Quadrature engines: Gauss-Legendre rules, panel composites, adaptive and
semi-infinite integration, and a Filon rule for Fresnel-type phases.

All engines are deterministic and reentrant; Gauss-Legendre node tables are
cached process-wide and never mutated after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from ..errors import AccuracyError


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights for one interval, or for a semi-infinite panel chain.

    ``domain`` is ``(a, b)`` for a finite rule and ``(0, inf_scale)`` for a
    semi-infinite chain, where ``inf_scale`` records the declared decay scale.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> complex | float:
        return np.sum(self.weights * np.asarray(f(self.nodes)))


@lru_cache(maxsize=128)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with ``n`` nodes on ``[a, b]``."""
    if n < 1:
        raise ValueError("need at least one node")
    if not b > a:
        raise ValueError("need b > a")
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (b + a), half * w, (a, b))


def panel_nodes(edges: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    x, w = _leggauss(n)
    e = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(e)
    mid = 0.5 * (e[1:] + e[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def composite_rule(edges: Sequence[float], n: int) -> QuadratureRule:
    nodes, weights = panel_nodes(edges, n)
    return QuadratureRule(nodes, weights, (float(edges[0]), float(edges[-1])))


def gl_refine(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float,
    n0: int = 32,
    max_doublings: int = 8,
) -> tuple[complex, float]:
    """Integrate on [a, b], doubling the panel count of a composite GL-32
    rule until two consecutive values agree to ``tol``.

    ``n0`` sets the initial total node budget.  Returns (value, error
    estimate).
    """
    panels = max(1, (n0 + 31) // 32)
    prev = composite_rule(np.linspace(a, b, panels + 1), 32).integrate(f)
    for _ in range(max_doublings):
        panels *= 2
        cur = composite_rule(np.linspace(a, b, panels + 1), 32).integrate(f)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise AccuracyError(f"gl_refine did not converge on [{a},{b}]", best=prev)


def quad_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float,
    max_depth: int = 24,
) -> tuple[complex, float]:
    """Adaptive bisection with an embedded GL(16)/GL(32) error estimate."""

    def recurse(lo: float, hi: float, budget: float, depth: int):
        coarse = gauss_legendre(16, lo, hi).integrate(f)
        fine = gauss_legendre(32, lo, hi).integrate(f)
        err = abs(fine - coarse)
        if err <= budget or depth >= max_depth:
            return fine, err
        mid = 0.5 * (lo + hi)
        v1, e1 = recurse(lo, mid, 0.5 * budget, depth + 1)
        v2, e2 = recurse(mid, hi, 0.5 * budget, depth + 1)
        return v1 + v2, e1 + e2

    value, err = recurse(a, b, tol, 0)
    if err > 10 * tol * max(1.0, abs(value)):
        raise AccuracyError("adaptive quadrature exhausted its depth budget", best=value)
    return value, err


def quad_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    decay_scale: float,
    tol: float,
    nodes_per_panel: int = 24,
    max_panels: int = 60,
    start: float = 0.0,
) -> tuple[complex, float]:
    """Integrate f over [start, infinity) for integrands that eventually decay
    like exp(-s/decay_scale).

    Geometric panels of width growing from ``decay_scale`` are appended until
    the analytic tail bound (last-panel magnitude times the decay scale)
    drops below tol/10.  Returns (value, error estimate).
    """
    if decay_scale <= 0:
        raise ValueError("decay_scale must be positive")
    total = 0.0 + 0.0j
    err = 0.0
    lo = start
    width = decay_scale
    peak = 0.0
    for k in range(max_panels):
        hi = lo + width
        coarse = gauss_legendre(nodes_per_panel, lo, hi).integrate(f)
        fine = gauss_legendre(2 * nodes_per_panel, lo, hi).integrate(f)
        total += fine
        err += abs(fine - coarse)
        edge = float(np.max(np.abs(np.asarray(f(np.array([hi]))))))
        peak = max(peak, float(abs(fine)) / max(width, 1e-300))
        # Tail of M e^{-(s-hi)/scale} integrated from hi: M * scale.
        tail = edge * decay_scale
        if tail < tol / 10 and k >= 2:
            return complex(total), err + tail
        lo = hi
        width = min(2.0 * width, 8.0 * decay_scale)
    raise AccuracyError("semi-infinite quadrature ran out of panels", best=complex(total))


def tanh_sinh(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float,
    max_level: int = 7,
) -> tuple[complex, float]:
    """Double-exponential quadrature on [a, b].

    Converges exponentially even for integrable algebraic endpoint
    singularities, which Gauss-Legendre only handles algebraically.
    Halves the step until two levels agree to ``tol``.
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    prev = None
    for level in range(2, max_level + 1):
        h = 1.0 / 2.0 ** (level - 2)
        j = np.arange(-int(4.0 / h), int(4.0 / h) + 1)
        u = h * j
        sh = 0.5 * math.pi * np.sinh(u)
        x = np.tanh(sh)
        w = h * 0.5 * math.pi * np.cosh(u) / np.cosh(sh) ** 2
        keep = 1.0 - np.abs(x) > 1e-17
        val = half * np.sum(w[keep] * np.asarray(f(mid + half * x[keep])))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return val, err
        prev = val
    raise AccuracyError("tanh-sinh quadrature did not converge", best=prev)


def filon_fresnel(
    g: Callable[[np.ndarray], np.ndarray],
    tau: float,
    edges: Sequence[float],
) -> complex:
    """Compute the Fresnel-type integral of g(mu) e^{i tau mu} over panels.

    Per panel, g is interpolated by the quadratic through its endpoints and
    midpoint and the oscillatory moments are integrated exactly, so the node
    budget tracks the smoothness of g rather than the phase tau*mu.
    """
    e = np.asarray(edges, dtype=float)
    a = e[:-1]
    b = e[1:]
    h = 0.5 * (b - a)
    c = 0.5 * (a + b)
    g0 = np.asarray(g(a), dtype=complex)
    g1 = np.asarray(g(c), dtype=complex)
    g2 = np.asarray(g(b), dtype=complex)
    t = tau * h
    m0, m1, m2 = _fresnel_moments(t)
    # Lagrange on nodes (-1, 0, 1) in the scaled variable u = (mu - c)/h.
    val = (
        g1 * (m0 - m2)
        + 0.5 * g0 * (m2 - m1)
        + 0.5 * g2 * (m2 + m1)
    )
    return complex(np.sum(h * np.exp(1j * tau * c) * val))


def _fresnel_moments(t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Moments m_j = \\int_{-1}^{1} u^j e^{i t u} du, vectorized in t.

    Series branch below |t| = 0.6 avoids cancellation in the closed forms.
    """
    t = np.asarray(t, dtype=float)
    m0 = np.empty(t.shape, dtype=complex)
    m1 = np.empty(t.shape, dtype=complex)
    m2 = np.empty(t.shape, dtype=complex)
    small = np.abs(t) < 0.6
    ts = t[small]
    if ts.size:
        # sum_k (it)^k/k! * int_{-1}^{1} u^{j+k}: parity selects the terms.
        k = np.arange(0, 20)
        fact = np.array([math.factorial(int(j)) for j in k], dtype=float)
        pw = (1j * ts[:, None]) ** k[None, :] / fact[None, :]
        m0[small] = pw @ np.where(k % 2 == 0, 2.0 / (k + 1), 0.0)
        m1[small] = pw @ np.where(k % 2 == 1, 2.0 / (k + 2), 0.0)
        m2[small] = pw @ np.where(k % 2 == 0, 2.0 / (k + 3), 0.0)
    tb = t[~small]
    if tb.size:
        it = 1j * tb
        eib = np.exp(it)
        emb = np.exp(-it)
        s = (eib - emb) / it            # m0 = 2 sin t / t
        csum = eib + emb                # 2 cos t
        m0[~small] = s
        m1[~small] = (csum - s) / it
        m2[~small] = s - 2.0 * m1[~small] / it
    return m0, m1, m2
