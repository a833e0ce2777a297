# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner-loop kernels.

Hot loops that dominate non-BLAS runtime: escape-time membership tests,
column-recursive fill of the monomial design matrix, and Vose alias-table
construction.  `domlsq._kernels_py` provides drop-in pure-numpy versions;
both backends must return bitwise-identical results (see tests).
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def mandelbrot_inside(double[::1] cre, double[::1] cim, int max_iter):
    """Escape-time membership: z <- z^2 + c, inside iff |z_t| <= 2 for all t <= max_iter."""
    cdef Py_ssize_t m = cre.shape[0]
    cdef cnp.ndarray out = np.ones(m, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    cdef Py_ssize_t i
    cdef int t
    cdef double zr, zi, cr, ci, tmp
    for i in range(m):
        cr = cre[i]
        ci = cim[i]
        zr = 0.0
        zi = 0.0
        for t in range(max_iter):
            tmp = zr * zr - zi * zi + cr
            zi = 2.0 * zr * zi + ci
            zr = tmp
            if zr * zr + zi * zi > 4.0:
                ov[i] = 0
                break
    return out


def monomial_fill(double[::1, :] out, double[:, ::1] pts,
                  long long[::1] parent, long long[::1] coord):
    """Fill the Fortran-ordered design matrix column by column.

    Column 0 is the constant monomial; column k is column parent[k] times
    coordinate coord[k].  Valid whenever the index ordering lists every
    predecessor before its successors (graded orderings do).
    """
    cdef Py_ssize_t m = out.shape[0]
    cdef Py_ssize_t n = out.shape[1]
    cdef Py_ssize_t i, k
    cdef long long p, c
    for i in range(m):
        out[i, 0] = 1.0
    for k in range(1, n):
        p = parent[k]
        c = coord[k]
        for i in range(m):
            out[i, k] = out[i, p] * pts[i, c]


def alias_tables(double[::1] p):
    """Vose construction of the alias method tables for probability vector p."""
    cdef Py_ssize_t n = p.shape[0]
    cdef cnp.ndarray prob = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray alias = np.empty(n, dtype=np.int64)
    cdef double[::1] pv = prob
    cdef long long[::1] av = alias
    cdef cnp.ndarray scaled_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] sv = scaled_arr
    cdef cnp.ndarray small_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray large_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] sm = small_arr
    cdef long long[::1] lg = large_arr
    cdef Py_ssize_t ns = 0, nl = 0
    cdef Py_ssize_t i
    cdef long long l, g
    for i in range(n):
        sv[i] = p[i] * n
        if sv[i] < 1.0:
            sm[ns] = i
            ns += 1
        else:
            lg[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        l = sm[ns]
        nl -= 1
        g = lg[nl]
        pv[l] = sv[l]
        av[l] = g
        sv[g] = (sv[g] + sv[l]) - 1.0
        if sv[g] < 1.0:
            sm[ns] = g
            ns += 1
        else:
            lg[nl] = g
            nl += 1
    while nl > 0:
        nl -= 1
        g = lg[nl]
        pv[g] = 1.0
        av[g] = g
    while ns > 0:
        ns -= 1
        l = sm[ns]
        pv[l] = 1.0
        av[l] = l
    return prob, alias
