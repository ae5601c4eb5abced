"""Space-time norm machinery and the estimate verification scans.

Everything here measures finite ratios: the constants in the underlying
bounds are unspecified, so acceptance means bounded ratios that are stable
under window doubling and data rescaling, never a specific constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, DomainError
from .evolve import (
    GridSpec,
    apply_multiplier,
    decompose,
    linear_evolve,
    spatial_norm,
    synthesize,
)
from .geometry import FluxParam, PairConfig, pair_change_of_variables, pair_potentials
from .report import ScanReport
from .spectral import smooth_bump


# -- admissible exponent pairs -------------------------------------------------


@dataclass(frozen=True)
class AdmissiblePair:
    q: float
    r: float
    family: str = "schrodinger"
    s: float = 0.0


def _as_fraction(v: float) -> Fraction | None:
    if math.isinf(v):
        return None
    f = Fraction(v).limit_denominator(10**6)
    return f if abs(float(f) - v) < 1e-12 else None


def admissible_pair_check(
    q: float, r: float, family: str = "schrodinger", s: float | None = None
) -> bool:
    """Membership test for the Schrodinger/wave admissible sets.

    Schrodinger: 2/q = 4(1/2 - 1/r).  Wave: 2/q <= 3(1/2 - 1/r) and
    s = 4(1/2 - 1/r) - 1/q.  Exact rational arithmetic when the inputs
    are (near-)rational, tolerance 1e-12 otherwise.
    """
    if not (2.0 <= q or math.isinf(q)) or not (2.0 <= r < math.inf):
        return False
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    fq, fr = _as_fraction(inv_q), _as_fraction(1.0 / r)
    if family == "schrodinger":
        if fq is not None and fr is not None:
            return 2 * fq == 4 * (Fraction(1, 2) - fr)
        return abs(2.0 * inv_q - 4.0 * (0.5 - 1.0 / r)) < 1e-12
    if family == "wave":
        if s is None:
            return False
        cond1 = 2.0 * inv_q <= 3.0 * (0.5 - 1.0 / r) + 1e-12
        gap = 4.0 * (0.5 - 1.0 / r) - inv_q
        return cond1 and abs(gap - s) < 1e-12
    raise ConfigError(f"unknown family {family!r}")


CANONICAL_PAIRS = [
    AdmissiblePair(math.inf, 2.0),
    AdmissiblePair(4.0, 8.0 / 3.0),
    AdmissiblePair(2.0, 4.0),           # endpoint
    AdmissiblePair(4.0, 4.0, "wave", 0.75),
]


# -- space-time norms ----------------------------------------------------------


def simpson_weights(n: int, dt: float) -> np.ndarray:
    """Composite Simpson on n uniform samples (n odd); falls back to a
    trapezoid-corrected rule for even n."""
    if n < 3:
        raise ConfigError("need at least 3 time samples")
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 1
    w[0] = 1.0
    w[1:m:2] = 4.0
    w[2 : m - 1 : 2] = 2.0
    w[m - 1] = 1.0
    w[:m] *= dt / 3.0
    if n % 2 == 0:
        w[-2] += 0.5 * dt
        w[-1] += 0.5 * dt
    return w


def spacetime_norm(times: np.ndarray, norms: np.ndarray, q: float) -> float:
    """(int ||u||_r^q dt)^{1/q} over the sampled window; ess-sup at q=inf."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if math.isinf(q):
        return float(np.max(norms))
    dts = np.diff(times)
    if dts.size == 0:
        raise ConfigError("window too short")
    if not np.allclose(dts, dts[0], rtol=1e-8):
        raise ConfigError("undersampled or nonuniform window")
    w = simpson_weights(len(times), float(dts[0]))
    return float((w @ norms**q) ** (1.0 / q))


def linear_norm_series(
    m0, times, r_values, grid: GridSpec
) -> dict[float, np.ndarray]:
    """||e^{itL} u0||_{L^r} sampled at the given times for each r."""
    out = {r: np.empty(len(times)) for r in r_values}
    for i, t in enumerate(times):
        u = synthesize(linear_evolve(m0, float(t)))
        for r in r_values:
            out[r][i] = spatial_norm(grid, u, r)
    return out


def wave_norm_series(
    mf, mg, times, r_values, grid: GridSpec
) -> dict[float, np.ndarray]:
    """Half-wave synthesis cos(t lam) f + sin(t lam)/lam g, sampled norms."""
    out = {r: np.empty(len(times)) for r in r_values}
    for i, t in enumerate(times):
        uf = apply_multiplier(mf, lambda lam: np.cos(t * lam))
        ug = apply_multiplier(mg, lambda lam: np.sinc(t * lam / math.pi) * t)
        u = synthesize(uf) + synthesize(ug)
        for r in r_values:
            out[r][i] = spatial_norm(grid, u, r)
    return out


# -- scans ---------------------------------------------------------------------


def strichartz_scan(
    flux: FluxParam,
    grid: GridSpec,
    data: list[np.ndarray],
    pairs: list[AdmissiblePair],
    windows: list[float],
    samples_per_unit: int = 16,
) -> ScanReport:
    """Rows of ||u||_{L^q L^r} / ||data|| for the linear flow.

    Schrodinger rows normalize by the L2 mass, wave rows by the
    Hs x H(s-1) data norm (computed through lambda^s multipliers).
    """
    report = ScanReport(
        "strichartz",
        ["datum", "family", "q", "r", "s", "window", "measured", "data_norm", "ratio"],
        metadata={"alpha": flux.alpha, "samples_per_unit": samples_per_unit},
    )
    t_max = max(windows)
    n_all = int(round(t_max * samples_per_unit)) + 1
    times = np.linspace(0.0, t_max, n_all)
    r_values = sorted({p.r for p in pairs})
    for i, u0 in enumerate(data):
        m0 = decompose(u0, grid, flux)
        mass = math.sqrt(grid.physical_norm_sq(u0))
        series_s = linear_norm_series(m0, times, r_values, grid)
        wave_pairs = [p for p in pairs if p.family == "wave"]
        series_w = {}
        wave_norm = {}
        for p in wave_pairs:
            mf = m0
            mg = apply_multiplier(m0, lambda lam: lam)  # g with matching H^{s-1}
            nf = math.sqrt(
                apply_multiplier(mf, lambda lam: lam**p.s).norm_sq()
            )
            ng = math.sqrt(
                apply_multiplier(mg, lambda lam: lam ** (p.s - 1.0)).norm_sq()
            )
            series_w[p] = wave_norm_series(mf, mg, times, [p.r], grid)
            wave_norm[p] = nf + ng
        for p in pairs:
            for window in windows:
                sel = times <= window + 1e-12
                if p.family == "schrodinger":
                    val = spacetime_norm(times[sel], series_s[p.r][sel], p.q)
                    ref = mass
                else:
                    val = spacetime_norm(times[sel], series_w[p][p.r][sel], p.q)
                    ref = wave_norm[p]
                report.add_row(
                    i, p.family, p.q, p.r, p.s, window, val, ref, val / ref
                )
    return report


def _cartesian_grid(n: int, half: float):
    ax = np.linspace(-half, half, n, endpoint=False)
    k = 2.0 * math.pi * np.fft.fftfreq(n, ax[1] - ax[0])
    return ax, k


def _sample_cartesian(fn, ax):
    X1, X2, X3, X4 = np.meshgrid(ax, ax, ax, ax, indexing="ij")
    return fn(X1, X2, X3, X4)


def sobolev_equiv_ratio(
    flux: FluxParam,
    grid: GridSpec,
    data: list[np.ndarray],
    s: float,
    p: float,
    cart_n: int = 40,
    cart_half: float | None = None,
) -> ScanReport:
    """Rows of ||(-Delta)^{s/2} f||_p / ||L^{s/2} f||_p.

    The flat power runs through a plain 4D Cartesian FFT of the same
    field; the operator power through the cylindrical lambda^s
    multiplier.  Bounded ratios (windows [1/10, 10]) realize the norm
    equivalence; at alpha = 0 the two routes compute the same operator.
    """
    if not 0.0 < s < 2.0:
        raise ConfigError("s must lie in (0, 2)")
    if not 1.0 < p < 4.0 / s:
        raise ConfigError("p must lie in (1, 4/s)")
    half = cart_half or min(grid.radius, grid.box)
    ax, k = _cartesian_grid(cart_n, half)
    K2 = (
        k[:, None, None, None] ** 2
        + k[None, :, None, None] ** 2
        + k[None, None, :, None] ** 2
        + k[None, None, None, :] ** 2
    )
    dv = (ax[1] - ax[0]) ** 4
    report = ScanReport(
        "sobolev_equivalence",
        ["datum", "s", "p", "flat_norm", "op_norm", "ratio", "pass"],
        metadata={"alpha": flux.alpha, "cart_n": cart_n, "half": half},
    )
    for i, (u_cyl, fn) in enumerate(data):
        uc = _sample_cartesian(fn, ax)
        flat = np.fft.ifftn(np.fft.fftn(uc) * K2 ** (s / 2.0))
        flat_norm = float(np.sum(np.abs(flat) ** p) * dv) ** (1.0 / p)
        m = decompose(u_cyl, grid, flux)
        op = synthesize(apply_multiplier(m, lambda lam: lam**s))
        op_norm = spatial_norm(grid, op, p)
        ratio = flat_norm / op_norm
        report.add_row(i, s, p, flat_norm, op_norm, ratio, 0.1 <= ratio <= 10.0)
    return report


def square_function_ratio(
    flux: FluxParam,
    grid: GridSpec,
    data: list[np.ndarray],
    p_values,
    j_range=None,
) -> ScanReport:
    """Rows of || (sum_k |phi_k(sqrt L) f|^2)^{1/2} ||_p / ||f||_p."""
    lam_min = float(np.sqrt(grid.lambda_sq()).min())
    j_lo = int(math.floor(math.log2(max(lam_min, 1e-6)))) - 1
    j_hi = int(math.ceil(math.log2(grid.rho_max * 1.5))) + 1
    j_range = j_range or range(j_lo, j_hi + 1)
    report = ScanReport(
        "square_function",
        ["datum", "p", "sq_norm", "f_norm", "ratio", "pass"],
        metadata={"alpha": flux.alpha, "j_lo": j_lo, "j_hi": j_hi},
    )
    for i, u0 in enumerate(data):
        m0 = decompose(u0, grid, flux)
        sq = np.zeros(u0.shape)
        for j in j_range:
            piece = synthesize(
                apply_multiplier(m0, lambda lam: smooth_bump(lam / 2.0**j))
            )
            sq += np.abs(piece) ** 2
        sq_field = np.sqrt(sq)
        for p in p_values:
            num = spatial_norm(grid, sq_field, p)
            den = spatial_norm(grid, u0, p)
            ratio = num / den
            report.add_row(i, p, num, den, ratio, 0.1 <= ratio <= 10.0)
    return report


# -- two-particle reduction ----------------------------------------------------


def _fd_hessian_terms(fn, pt: np.ndarray, h: float):
    """4D central differences: (laplacian, gradient) of fn at pt."""
    f0 = fn(pt)
    grad = np.zeros(4, dtype=complex)
    lap = 0.0 + 0.0j
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        fp = fn(pt + e)
        fm = fn(pt - e)
        grad[j] = (fp - fm) / (2.0 * h)
        lap += (fp - 2.0 * f0 + fm) / (h * h)
    return lap, grad, f0


def apply_two_particle(flux: FluxParam, fn, pair: PairConfig, h: float) -> complex:
    """Finite-difference H_{A,2} = sum_j (-i grad_j + F_j)^2 acting on fn
    (a function of (x1, x2) in R^4) at an off-coincidence configuration."""
    f1, f2 = pair_potentials(flux, pair)
    big_f = np.concatenate([f1, f2])
    pt = np.array([*pair.x1, *pair.x2], dtype=float)
    lap, grad, f0 = _fd_hessian_terms(fn, pt, h)
    # div F = 0, so H u = -Lap u - 2i F.grad u + |F|^2 u
    return -lap - 2.0j * np.dot(big_f, grad) + float(big_f @ big_f) * f0


def apply_one_particle(flux: FluxParam, vn, y: np.ndarray, h: float) -> complex:
    """Finite-difference L_A = (-i grad + A)^2 acting on vn at y in R^4."""
    from .geometry import potential_A

    a = potential_A(flux, y)
    lap, grad, f0 = _fd_hessian_terms(vn, np.asarray(y, dtype=float), h)
    return -lap - 2.0j * np.dot(a, grad) + float(a @ a) * f0


def reduction_identity_check(
    flux: FluxParam,
    fn,
    pairs: list[PairConfig],
    h: float = 1e-3,
) -> ScanReport:
    """H_{A,2} u at (x1, x2) versus L_A v at the rotated coordinates,
    v(y) = u(x(y)); both by second-order finite differences.

    The identity is exact, so the relative deviation measures the O(h^2)
    truncation difference and must fall fourfold when h halves.
    """
    report = ScanReport(
        "reduction_identity",
        ["x11", "x12", "x21", "x22", "h", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_dev"],
        metadata={"alpha": flux.alpha},
    )
    s2 = math.sqrt(2.0)

    def vn(y):
        x1 = (y[:2] + y[2:]) / s2
        x2 = (y[2:] - y[:2]) / s2
        return fn(np.array([*x1, *x2]))

    for pair in pairs:
        if pair.separation < 1e-8:
            raise DomainError("sample on the coincidence set")
        lhs = apply_two_particle(flux, fn, pair, h)
        y1, y2 = pair_change_of_variables(pair)
        rhs = apply_one_particle(flux, vn, np.array([*y1, *y2]), h)
        rel = abs(lhs - rhs) / max(abs(lhs), 1e-300)
        report.add_row(
            pair.x1[0], pair.x1[1], pair.x2[0], pair.x2[1],
            h, lhs.real, lhs.imag, rhs.real, rhs.imag, rel,
        )
    return report


def potential_decay_scan(traj, r_values=None) -> ScanReport:
    """Time series of ||u(t)||_{L^r} from a recorded trajectory."""
    report = ScanReport(
        "potential_decay",
        ["r", "t", "norm", "norm_over_initial"],
        metadata={"p": traj.p, "alpha": traj.flux.alpha},
    )
    r_values = r_values or sorted(traj.norms)
    for r in r_values:
        if r <= 2.0:
            raise ConfigError("r = 2 is conserved mass; decay scan needs r > 2")
        series = traj.norms[r]
        n0 = series[0][1]
        for t, v in series:
            report.add_row(r, t, v, v / n0)
    return report
