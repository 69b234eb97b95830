"""Pure numpy cyclic Jacobi, vectorised across a stack of matrices.

Same contract as the compiled ``_jacobi_ext.jacobi_batch``; used when the
extension is not built or when ``SYMQUBIT_PURE_PYTHON`` is set.
"""

import numpy as np


def jacobi_batch(a_in, tol_rel, max_sweeps, want_vectors):
    a = np.array(a_in, dtype=np.float64, copy=True)
    B, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), a.shape).copy() if want_vectors else None
    thresh = tol_rel * np.sqrt((a * a).sum(axis=(1, 2)))
    sweeps = np.full(B, -1, dtype=np.intc)
    mask = ~np.eye(n, dtype=bool)

    for sweep in range(max_sweeps + 1):
        off = np.sqrt((a[:, mask] ** 2).sum(axis=1))
        done = (off <= thresh) & (sweeps < 0)
        sweeps[done] = sweep
        active = np.nonzero(sweeps < 0)[0]
        if active.size == 0 or sweep == max_sweeps:
            break
        sub = a[active]
        vsub = v[active] if want_vectors else None
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = sub[:, p, q].copy()
                nz = apq != 0.0
                if not nz.any():
                    continue
                safe = np.where(nz, apq, 1.0)
                # a tiny apq can overflow theta to inf, giving t = 0: the right limit
                with np.errstate(over="ignore"):
                    theta = (sub[:, q, q] - sub[:, p, p]) / (2.0 * safe)
                    t = 1.0 / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta < 0.0, -t, t)
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                app = sub[:, p, p].copy()
                aqq = sub[:, q, q].copy()
                colp = sub[:, :, p].copy()
                colq = sub[:, :, q].copy()
                newp = c[:, None] * colp - s[:, None] * colq
                newq = s[:, None] * colp + c[:, None] * colq
                sub[:, :, p] = newp
                sub[:, :, q] = newq
                sub[:, p, :] = newp
                sub[:, q, :] = newq
                sub[:, p, p] = app - t * apq
                sub[:, q, q] = aqq + t * apq
                sub[:, p, q] = 0.0
                sub[:, q, p] = 0.0
                if want_vectors:
                    vp = vsub[:, :, p].copy()
                    vq = vsub[:, :, q].copy()
                    vsub[:, :, p] = c[:, None] * vp - s[:, None] * vq
                    vsub[:, :, q] = s[:, None] * vp + c[:, None] * vq
        a[active] = sub
        if want_vectors:
            v[active] = vsub

    w = np.einsum("bii->bi", a).copy()
    return w, v, sweeps
