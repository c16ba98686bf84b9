# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``pykernels``: adaptive quadrature of the outage-integral
families plus Monte Carlo counting loops.

Statement-for-statement mirror of the NumPy backend.  Counting kernels use
the same rational-arithmetic conditions (compiled with FMA contraction
disabled), so counts match the NumPy backend bitwise; quadrature uses the
same Gauss-Kronrod table, worst-panel-first refinement order, and
tolerance bookkeeping as :mod:`cachewave.quadrature`, so results and
evaluation counts match bitwise as well.
"""

from libc.math cimport exp, fabs
from libc.stdlib cimport free, malloc

from cachewave.quadrature import NonConvergence

# Integrand families (keep in sync with pykernels.py).
FAMILY_MRC = 0
FAMILY_JOINT_SIC = 1
FAMILY_JOINT_INOISE = 2
FAMILY_SUM_INOISE = 3

cdef double ABS_FLOOR = 1e-12
cdef int MAX_PANELS = 10000  # keep equal to cachewave.quadrature.MAX_PANELS

# 15-point Kronrod nodes (non-negative half) and weights; Gauss weights are
# zero on Kronrod-only nodes.  Same table as cachewave.quadrature.
cdef double[8] KX
cdef double[8] KW
cdef double[8] GW
KX[0] = 0.991455371120813; KX[1] = 0.949107912342759
KX[2] = 0.864864423359769; KX[3] = 0.741531185599394
KX[4] = 0.586087235467691; KX[5] = 0.405845151377397
KX[6] = 0.207784955007898; KX[7] = 0.000000000000000
KW[0] = 0.022935322010529; KW[1] = 0.063092092629979
KW[2] = 0.104790010322250; KW[3] = 0.140653259715525
KW[4] = 0.169004726639267; KW[5] = 0.190350578064785
KW[6] = 0.204432940075298; KW[7] = 0.209482141084728
GW[0] = 0.0;               GW[1] = 0.129484966168870
GW[2] = 0.0;               GW[3] = 0.279705391489277
GW[4] = 0.0;               GW[5] = 0.381830050505119
GW[6] = 0.0;               GW[7] = 0.417959183673469


cdef inline double _integrand(int family, double x, double lam, double p,
                              double sp, double osp, double thr) noexcept nogil:
    cdef double w, u, v, den
    if family == 0:      # MRC tail
        w = thr - p * x
        den = sp - osp * w
        if den <= 0.0:
            return 0.0
        return lam * exp(-lam * (x + w / den))
    elif family == 1:    # joint decoding after SIC
        u = thr / (1.0 + p * x) - 1.0
        if u < 0.0:
            u = 0.0
        return lam * exp(-lam * (x + u / sp))
    elif family == 2:    # joint decoding, interference as noise
        v = thr / (1.0 + p * x) - 1.0
        den = sp - osp * v
        if den <= 0.0:
            return 0.0
        return lam * exp(-lam * (x + v / den))
    else:                # averaged-SNR interference case
        v = thr - p * x
        den = sp - osp * v
        if den <= 0.0:
            return 0.0
        return lam * exp(-lam * (x + v / den))


cdef void _gk15(int family, double a, double b, double lam, double p,
                double sp, double osp, double thr,
                double* out_val, double* out_err) noexcept nogil:
    cdef double center = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double fc = _integrand(family, center, lam, p, sp, osp, thr)
    cdef double kron = KW[7] * fc
    cdef double gauss = GW[7] * fc
    cdef double dx, fsum
    cdef int i
    for i in range(7):
        dx = half * KX[i]
        fsum = (_integrand(family, center - dx, lam, p, sp, osp, thr)
                + _integrand(family, center + dx, lam, p, sp, osp, thr))
        kron += KW[i] * fsum
        gauss += GW[i] * fsum
    kron *= half
    gauss *= half
    out_val[0] = kron
    out_err[0] = fabs(kron - gauss)


cdef int _global_adapt(int family, double a, double b, double rel_tol,
                       int max_depth,
                       double lam, double p, double sp, double osp, double thr,
                       double* out_val, double* out_err, double* out_tol,
                       long* out_splits, double* bad_a, double* bad_b,
                       double* bad_err, int* bad_depth) noexcept nogil:
    """Worst-panel-first refinement, mirroring cachewave.quadrature.integrate.

    Returns 0 once the summed error meets the tolerance, 1 if the worst
    panel sits at the depth cap, 2 if the panel store fills up, and 3 if
    the panel store cannot be allocated.
    """
    cdef double* pa = <double*> malloc(MAX_PANELS * sizeof(double))
    cdef double* pb = <double*> malloc(MAX_PANELS * sizeof(double))
    cdef double* pv = <double*> malloc(MAX_PANELS * sizeof(double))
    cdef double* pe = <double*> malloc(MAX_PANELS * sizeof(double))
    cdef int* pd = <int*> malloc(MAX_PANELS * sizeof(int))
    cdef int n = 1, worst, i, wd, status = 0
    cdef long splits = 0
    cdef double total_val, total_err, tol = 0.0
    cdef double wa, wb, wv, we, mid, lv, le, rv, re
    if pa == NULL or pb == NULL or pv == NULL or pe == NULL or pd == NULL:
        status = 3
    else:
        _gk15(family, a, b, lam, p, sp, osp, thr, &lv, &le)
        pa[0] = a; pb[0] = b; pv[0] = lv; pe[0] = le; pd[0] = 0
        total_val = lv
        total_err = le
        while True:
            tol = rel_tol * fabs(total_val)
            if tol < ABS_FLOOR:
                tol = ABS_FLOOR
            if total_err <= tol:
                break
            # Split the panel with the largest error (first index wins ties).
            worst = 0
            for i in range(1, n):
                if pe[i] > pe[worst]:
                    worst = i
            if pd[worst] >= max_depth:
                bad_a[0] = pa[worst]
                bad_b[0] = pb[worst]
                bad_err[0] = pe[worst]
                bad_depth[0] = pd[worst]
                status = 1
                break
            if n >= MAX_PANELS:
                status = 2
                break
            wa = pa[worst]; wb = pb[worst]; wv = pv[worst]; we = pe[worst]
            wd = pd[worst]
            mid = 0.5 * (wa + wb)
            _gk15(family, wa, mid, lam, p, sp, osp, thr, &lv, &le)
            _gk15(family, mid, wb, lam, p, sp, osp, thr, &rv, &re)
            pa[worst] = wa; pb[worst] = mid; pv[worst] = lv; pe[worst] = le
            pd[worst] = wd + 1
            pa[n] = mid; pb[n] = wb; pv[n] = rv; pe[n] = re; pd[n] = wd + 1
            n += 1
            total_val = total_val - wv + lv + rv
            total_err = total_err - we + le + re
            splits += 1
        if total_err < 0.0:  # running subtraction can round slightly below zero
            total_err = 0.0
        out_val[0] = total_val
        out_err[0] = total_err
        out_tol[0] = tol
        out_splits[0] = splits
    free(pa); free(pb); free(pv); free(pe); free(pd)
    return status


def integrate_factor(int family, double a, double b, double rel_tol,
                     double lam, double p, double share, double thr):
    """Compiled mirror of pykernels.integrate_factor."""
    if family < 0 or family > 3:
        raise ValueError(f"unknown integrand family {family!r}")
    if not 0.0 < rel_tol <= 0.1:
        raise ValueError(f"rel_tol must be in (0, 0.1], got {rel_tol!r}")
    if a >= b:
        return 0.0, 0.0, 0
    cdef double sp = share * p
    cdef double osp = (1.0 - share) * p
    cdef double val = 0.0, err = 0.0, tol = 0.0
    cdef double bad_a = 0.0, bad_b = 0.0, bad_err = 0.0
    cdef long splits = 0
    cdef int bad_depth = 0
    cdef int status
    with nogil:
        status = _global_adapt(family, a, b, rel_tol, 60,
                               lam, p, sp, osp, thr, &val, &err, &tol,
                               &splits, &bad_a, &bad_b, &bad_err, &bad_depth)
    if status == 3:
        raise MemoryError("could not allocate the quadrature panel store")
    if status == 1:
        raise NonConvergence(
            f"no convergence on [{bad_a!r}, {bad_b!r}] after "
            f"{bad_depth} bisection levels (panel error {bad_err:.3e}, "
            f"total error {err:.3e}, tolerance {tol:.3e})"
        )
    if status == 2:
        raise NonConvergence(
            f"panel store exhausted ({MAX_PANELS} panels) with total "
            f"error {err:.3e} above tolerance {tol:.3e}"
        )
    return val, err, 15 + 30 * splits


# ============================================================
# Monte Carlo counting kernels
# ============================================================

def count_ge(double[::1] g, double thr):
    cdef Py_ssize_t i, n = g.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if g[i] >= thr:
                c += 1
    return c


def count_mrc(double[::1] gl, double[::1] gh, double cht, double cint,
              double p, double thr):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if cht * gh[i] / (1.0 + cint * gh[i]) + p * gl[i] >= thr:
                c += 1
    return c


def count_sinr_ge(double[::1] gh, double sp, double osp, double thr):
    cdef Py_ssize_t i, n = gh.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if sp * gh[i] / (1.0 + osp * gh[i]) >= thr:
                c += 1
    return c


def count_sum_ge(double[::1] gl, double[::1] gh, double s, double cthr):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if gl[i] + s * gh[i] >= cthr:
                c += 1
    return c


def count_joint_sic(double[::1] gl, double[::1] gh, double p, double sp,
                    double big_t):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if (1.0 + p * gl[i]) * (1.0 + sp * gh[i]) >= big_t:
                c += 1
    return c


def count_joint_inoise(double[::1] gl, double[::1] gh, double p, double sp,
                       double osp, double big_t):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if (1.0 + p * gl[i]) * (1.0 + sp * gh[i] / (1.0 + osp * gh[i])) >= big_t:
                c += 1
    return c


def count_m1_cache(double[::1] gl, double[::1] gh, double cht, double cint,
                   double p, double thr_mrc, double sp, double big_t):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if (cht * gh[i] / (1.0 + cint * gh[i]) + p * gl[i] >= thr_mrc
                    and (1.0 + p * gl[i]) * (1.0 + sp * gh[i]) >= big_t):
                c += 1
    return c


def count_m3_cache(double[::1] gl, double[::1] gh, double cht, double cint,
                   double p, double thr_mrc, double t_lt, double t_ht):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if (cht * gh[i] / (1.0 + cint * gh[i]) + p * gl[i] >= thr_mrc
                    and gl[i] >= t_lt and gh[i] >= t_ht):
                c += 1
    return c


def count_m4_cache(double[::1] gl, double[::1] gh, double t_lt, double sp,
                   double osp, double thr_ht):
    cdef Py_ssize_t i, n = gl.shape[0]
    cdef long c = 0
    with nogil:
        for i in range(n):
            if gl[i] >= t_lt and sp * gh[i] / (1.0 + osp * gh[i]) >= thr_ht:
                c += 1
    return c
