# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the hot kernels in abkit._ref.

Same contracts, same regime boundaries; the tests assert agreement with
the NumPy reference to 1e-13 and the benchmark in benchmarks/ compares
throughput.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, exp, fabs, lgamma, log, sin, sinh, sqrt

cnp.import_array()

DEF LOG_TINY = -575.0

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csqrt(double complex)
    double complex cpow(double complex, double complex)
    double cabs(double complex)


def jnu_series_batch(double nu, x, int terms=90):
    """Power series for J_nu on the safe region (x small or nu dominant)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(
        np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    )
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef int m
    cdef double xi, t, acc, q, logpref
    cdef double lg = lgamma(nu + 1.0)
    for i in range(n):
        xi = xs[i]
        if xi == 0.0:
            out[i] = 1.0 if nu == 0.0 else 0.0
            continue
        logpref = nu * log(xi / 2.0) - lg
        if logpref <= LOG_TINY:
            out[i] = 0.0
            continue
        t = exp(logpref)
        acc = t
        q = -0.25 * xi * xi
        for m in range(1, terms):
            t = t * q / (m * (m + nu))
            acc += t
            if fabs(t) < 1e-18 * fabs(acc) and m * m > -q:
                break
        out[i] = acc
    shape = np.shape(x)
    return out.reshape(shape) if shape else out.reshape(())


def inu_series_batch(double nu, z, int terms=120):
    """Power series for I_nu; real or complex argument."""
    arr = np.asarray(z)
    if np.isrealobj(arr):
        return _inu_series_real(nu, arr, terms)
    return _inu_series_complex(nu, arr, terms)


def _inu_series_real(double nu, z, int terms):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zs = np.ascontiguousarray(
        np.atleast_1d(np.asarray(z, dtype=np.float64)).ravel()
    )
    cdef Py_ssize_t n = zs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef int m
    cdef double zi, t, acc, q, logpref
    cdef double lg = lgamma(nu + 1.0)
    for i in range(n):
        zi = zs[i]
        if zi == 0.0:
            out[i] = 1.0 if nu == 0.0 else 0.0
            continue
        logpref = nu * log(fabs(zi) / 2.0) - lg
        if logpref <= LOG_TINY:
            out[i] = 0.0
            continue
        t = exp(logpref)
        acc = t
        q = 0.25 * zi * zi
        for m in range(1, terms):
            t = t * q / (m * (m + nu))
            acc += t
            if fabs(t) < 1e-18 * fabs(acc) and m * m > q:
                break
        out[i] = acc
    shape = np.shape(z)
    return out.reshape(shape) if shape else out.reshape(())


def _inu_series_complex(double nu, z, int terms):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zs = np.ascontiguousarray(
        np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    )
    cdef Py_ssize_t n = zs.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef int m
    cdef double complex zi, t, acc, q, logpref
    cdef double lg = lgamma(nu + 1.0)
    for i in range(n):
        zi = zs[i]
        if zi == 0.0:
            out[i] = 1.0 if nu == 0.0 else 0.0
            continue
        logpref = nu * clog(zi / 2.0) - lg
        if logpref.real <= LOG_TINY:
            out[i] = 0.0
            continue
        t = cexp(logpref)
        acc = t
        q = 0.25 * zi * zi
        for m in range(1, terms):
            t = t * q / (m * (m + nu))
            acc += t
            if cabs(t) < 1e-18 * cabs(acc) and m * m > cabs(q):
                break
        out[i] = acc
    shape = np.shape(z)
    return out.reshape(shape) if shape else out.reshape(())


def b_alpha_batch(double alpha0, double cosd, double sind, s):
    """Diffractive angular density B on a real s >= 0 grid."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ss = np.ascontiguousarray(
        np.atleast_1d(np.asarray(s, dtype=np.float64)).ravel()
    )
    cdef Py_ssize_t n = ss.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef double aa = fabs(alpha0)
    cdef double sa = sin(aa * M_PI)
    cdef double sa0 = sin(alpha0 * M_PI)
    cdef double si, sh, den, ems, num_re, num_im
    cdef double complex ratio
    for i in range(n):
        si = ss[i]
        sh = sinh(0.5 * si)
        den = 2.0 * sh * sh + (1.0 - cosd)
        ems = exp(-si)
        num_re = (ems - cosd) * sinh(alpha0 * si)
        num_im = -sind * (0.5 * (exp(alpha0 * si) + exp(-alpha0 * si)))
        if den == 0.0:
            ratio = -2.0 * alpha0
        else:
            ratio = (num_re + 1j * num_im) / den
        out[i] = -(sa * exp(-aa * si) + sa0 * ratio)
    shape = np.shape(s)
    return out.reshape(shape) if shape else out.reshape(())


def b_alpha_contour_batch(double alpha0, double cosd, double sind, w):
    """B along the rotated contour cosh s = 1 + w^2 with the measure
    factor 2/sqrt(2 + w^2) folded in."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ws = np.ascontiguousarray(
        np.atleast_1d(np.asarray(w, dtype=np.complex128)).ravel()
    )
    cdef Py_ssize_t n = ws.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef double aa = fabs(alpha0)
    cdef double sa = sin(aa * M_PI)
    cdef double sa0 = sin(alpha0 * M_PI)
    cdef double complex wi, root, q, lq, qa, qma, qabs, sinh_a, cosh_a
    cdef double complex den, num, ratio, b
    for i in range(n):
        wi = ws[i]
        root = csqrt(wi * wi + 2.0)
        q = 1.0 + wi * wi - wi * root
        lq = clog(q)
        qa = cexp(alpha0 * lq)
        qma = cexp(-alpha0 * lq)
        qabs = cexp(aa * lq)
        sinh_a = 0.5 * (qma - qa)
        cosh_a = 0.5 * (qma + qa)
        den = wi * wi + (1.0 - cosd)
        num = (q - cosd) * sinh_a - 1j * sind * cosh_a
        if den == 0.0:
            ratio = -2.0 * alpha0
        else:
            ratio = num / den
        b = -(sa * qabs + sa0 * ratio)
        out[i] = b * (2.0 / root)
    shape = np.shape(w)
    return out.reshape(shape) if shape else out.reshape(())
