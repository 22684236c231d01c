"""Pure numpy implementations of the membership kernels.

These mirror ``_ckernels.pyx`` one for one and are used when the compiled
extension is not importable (or when ``ZETAINF_PURE=1``).
"""

import numpy as np

# Stacked levels beyond this index have vertical extent below double precision.
MAX_LEVELS = 400


def interval_chain_contains(x, alpha, beta, j0):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape, dtype=bool)
    pos = x > 1.0
    if not pos.any():
        return out
    xp = x[pos]
    j = np.floor(xp ** (1.0 / alpha))
    hit = np.zeros(xp.shape, dtype=bool)
    for d in (-1.0, 0.0, 1.0):
        jj = j + d
        ok = jj >= 1.0
        jj = np.where(ok, jj, 1.0)
        a = jj ** alpha
        hit |= ok & (xp > a) & (xp < a + jj ** (-beta))
    # small indices where neighbouring intervals may overlap
    for jj in range(1, int(j0) + 1):
        a = float(jj) ** alpha
        hit |= (xp > a) & (xp < a + float(jj) ** (-beta))
    out[pos] = hit
    return out


def cantor_levels(a, b):
    """Cumulative stack heights ``H[m]`` (``H[0] = 0``) and level heights ``h[m]``."""
    h = [0.0]
    H = [0.0]
    q = a ** b
    for m in range(1, MAX_LEVELS + 1):
        hm = q ** m
        if hm == 0.0:
            break
        h.append(hm)
        H.append(H[-1] + 2.0 ** (m - 1) * hm)
    return np.array(H), np.array(h)


def cantor_contains(x, y, a, b):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    H, h = cantor_levels(a, b)
    nlev = len(h) - 1
    m = np.searchsorted(H, y, side="right")
    valid = (y > 0.0) & (m >= 1) & (m <= nlev)
    m = np.clip(m, 1, nlev)
    base = H[m - 1]
    hm = h[m]
    copies = 2.0 ** (m - 1)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        c = np.floor((y - base) / hm)
        local = y - base - c * hm
        threshold = a ** (-m.astype(np.float64))
        top = np.where(x > 0.0, np.abs(x) ** (-b), 0.0)
    return valid & (c < copies) & (local > 0.0) & (x > threshold) & (local < top)


def stacked_power_offsets(kmax=60):
    k = np.arange(1, kmax + 1, dtype=np.float64)
    widths = 2.0 ** (-k) / k
    S = np.concatenate(([0.0], np.cumsum(widths)))
    return S, widths


def stacked_power_contains(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    S, widths = stacked_power_offsets()
    k = np.searchsorted(S, y, side="right")
    valid = (y > 0.0) & (k >= 1) & (k <= len(widths))
    k = np.clip(k, 1, len(widths))
    local = y - S[k - 1]
    kf = k.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        top = np.where(x > 1.0, widths[k - 1] * x ** (-1.0 - 1.0 / kf), 0.0)
    return valid & (x > 1.0) & (local > 0.0) & (local < top)
