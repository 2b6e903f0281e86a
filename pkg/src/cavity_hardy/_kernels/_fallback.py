"""NumPy implementations of the hot loops, used when the extension is absent."""

import numpy as np


def simpson_profile_sum(v, b, inv_rdef, wavenumber, t_end, n):
    h = t_end / n
    x = v * (np.arange(n + 1) * h) - b
    f = np.exp(-np.abs(x) * inv_rdef) * np.cos(wavenumber * x)
    return float(h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum()))


def rotate_pairs(psi, ia, ib, c, s):
    x = psi[ia]
    y = psi[ib]
    psi[ia] = c * x - s * y
    psi[ib] = s * x + c * y
