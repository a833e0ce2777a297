"""Pure-numpy fallbacks for the compiled kernels in ``_fastkern``.

Each function mirrors its compiled counterpart operation by operation so the
two backends return bitwise-identical arrays.
"""
import numpy as np


def mandelbrot_inside(cre, cim, max_iter):
    """Escape-time membership on an array of complex parameters.

    z <- z^2 + c starting from 0; a point is inside iff |z_t| <= 2 for all
    t <= max_iter.  Vectorized with compaction of the still-alive set.
    """
    m = cre.shape[0]
    inside = np.ones(m, dtype=np.uint8)
    idx = np.arange(m)
    zr = np.zeros(m)
    zi = np.zeros(m)
    cr = np.array(cre, dtype=np.float64, copy=True)
    ci = np.array(cim, dtype=np.float64, copy=True)
    for _ in range(max_iter):
        tmp = zr * zr - zi * zi + cr
        zi = 2.0 * zr * zi + ci
        zr = tmp
        escaped = zr * zr + zi * zi > 4.0
        if escaped.any():
            inside[idx[escaped]] = 0
            keep = ~escaped
            idx = idx[keep]
            zr = zr[keep]
            zi = zi[keep]
            cr = cr[keep]
            ci = ci[keep]
            if idx.size == 0:
                break
    return inside


def monomial_fill(out, pts, parent, coord):
    """Column-recursive monomial fill; see the compiled version for the contract."""
    n = out.shape[1]
    out[:, 0] = 1.0
    for k in range(1, n):
        np.multiply(out[:, parent[k]], pts[:, coord[k]], out=out[:, k])


def alias_tables(p):
    """Vose construction of the alias method tables for probability vector p."""
    n = p.shape[0]
    prob = np.empty(n, dtype=np.float64)
    alias = np.empty(n, dtype=np.int64)
    scaled = p * n
    small = []
    large = []
    for i in range(n):
        if scaled[i] < 1.0:
            small.append(i)
        else:
            large.append(i)
    while small and large:
        l = small.pop()
        g = large.pop()
        prob[l] = scaled[l]
        alias[l] = g
        scaled[g] = (scaled[g] + scaled[l]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    while large:
        g = large.pop()
        prob[g] = 1.0
        alias[g] = g
    while small:
        l = small.pop()
        prob[l] = 1.0
        alias[l] = l
    return prob, alias
