"""Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type shifts).

Only the first component of each eigenvector is accumulated, which is all a
Gauss rule needs.
"""

import math

import numpy as np

from .errors import NoConvergence

MAX_ITER = 50


def tridiagonal_eigen(diag, offdiag, max_iter=MAX_ITER):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : array_like, shape (n,)
    offdiag : array_like, shape (n - 1,)

    Returns
    -------
    values : ndarray, shape (n,)
        Eigenvalues in ascending order.
    first : ndarray, shape (n,)
        First component of the matching unit eigenvectors.
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in offdiag] + [0.0]
    if len(e) != n:
        raise ValueError("offdiag must have length len(diag) - 1")
    z = [0.0] * n
    if n:
        z[0] = 1.0
    eps = np.finfo(float).eps
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            iterations += 1
            if iterations > max_iter:
                raise NoConvergence(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    values = np.array(d)
    first = np.array(z)
    order = np.argsort(values, kind="stable")
    return values[order], first[order]
