"""Pure-Python/numpy row reduction over a prime field (fallback kernel)."""
import numpy as np


def rank_mod_p_dense(a: np.ndarray, p: int) -> int:
    """Rank of ``a`` over F_p; ``a`` holds residues in ``[0, p)`` and is overwritten."""
    nr, nc = a.shape
    row = 0
    for col in range(nc):
        if row == nr:
            break
        nonzero = np.flatnonzero(a[row:, col])
        if nonzero.size == 0:
            continue
        piv = row + nonzero[0]
        if piv != row:
            a[[row, piv], col:] = a[[piv, row], col:]
        inv = pow(int(a[row, col]), -1, p)
        a[row, col:] = (a[row, col:] * inv) % p
        below = row + 1 + np.flatnonzero(a[row + 1 :, col])
        if below.size:
            factors = a[below, col][:, None]
            a[np.ix_(below, np.arange(col, nc))] = (a[below, col:] - factors * a[row, col:]) % p
        row += 1
    return row
