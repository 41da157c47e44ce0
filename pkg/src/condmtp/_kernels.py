"""Hot decision kernels with numba and pure-numpy implementations.

Both backends consume identical p-value matrices and perform the same IEEE
arithmetic, so their outputs are bit-identical; the numba path just fuses
the per-replicate loops.  Select with the ``CONDMTP_NUMBA`` environment
variable: ``auto`` (default; numba when importable), ``0`` to force the
numpy fallback, ``1`` to require numba.

Kind codes for step procedures: 0 holm, 1 hochberg, 2 bh, 3 hommel.
"""

import os
import warnings

import numpy as np

KIND_CODES = {"holm": 0, "hochberg": 1, "bh": 2, "hommel": 3}


# ----------------------------------------------------------------------
# numpy fallback implementations
# ----------------------------------------------------------------------

def _hommel_adj_sorted_np(ps):
    m = ps.size
    if m == 1:
        return ps.copy()
    q = np.full(m, np.min(m * ps / np.arange(1, m + 1)))
    pa = q.copy()
    for mm in range(m - 1, 1, -1):
        cut = m - mm + 1
        q1 = np.min(mm * ps[cut:] / np.arange(2, mm + 1))
        q[:cut] = np.minimum(mm * ps[:cut], q1)
        q[cut:] = q[cut - 1]
        pa = np.maximum(pa, q)
    return np.maximum(pa, ps)


def _step_decisions_np(pmat, lam, alpha, kind):
    reps, m = pmat.shape
    kept = pmat <= lam
    r_counts = kept.sum(axis=1)
    vals = np.where(kept, pmat / lam, np.inf)
    order = np.argsort(vals, axis=1, kind="stable")
    sv = np.take_along_axis(vals, order, axis=1)
    ks = np.arange(1, m + 1)[None, :]
    within = ks <= r_counts[:, None]

    if kind == 3:
        dec_sorted = np.zeros((reps, m), dtype=bool)
        for r in range(reps):
            rr = r_counts[r]
            if rr:
                adj = _hommel_adj_sorted_np(sv[r, :rr])
                dec_sorted[r, :rr] = adj <= alpha
    else:
        if kind == 0 or kind == 1:
            factors = r_counts[:, None] - ks + 1
        else:
            factors = None
        with np.errstate(invalid="ignore"):
            if kind == 2:
                a = r_counts[:, None] * sv / ks
            else:
                a = factors * sv
        a = np.where(within, a, np.inf)
        if kind == 0:
            adj = np.maximum.accumulate(a, axis=1)
        else:
            adj = np.minimum.accumulate(a[:, ::-1], axis=1)[:, ::-1]
        dec_sorted = (adj <= alpha) & within

    out = np.zeros((reps, m), dtype=bool)
    np.put_along_axis(out, order, dec_sorted, axis=1)
    return out


def _cbp_grid_counts_np(pmat, truth_mask, alphas, lams):
    out = np.zeros((alphas.size, lams.size), dtype=np.int64)
    min_true = pmat[:, truth_mask].min(axis=1)
    for li in range(lams.size):
        lam = lams[li]
        r_safe = np.maximum((pmat <= lam).sum(axis=1), 1)
        for ai in range(alphas.size):
            out[ai, li] = int((min_true < alphas[ai] * lam / r_safe).sum())
    return out


_NUMPY_BACKEND = {
    "name": "numpy",
    "step_decisions": _step_decisions_np,
    "cbp_grid_counts": _cbp_grid_counts_np,
}


# ----------------------------------------------------------------------
# numba implementations (compiled lazily on first request)
# ----------------------------------------------------------------------

def _build_numba_backend():
    from numba import njit

    @njit(cache=True)
    def hommel_adj_sorted(ps, adj):
        rr = ps.size
        if rr == 1:
            adj[0] = ps[0]
            return
        mn = np.inf
        for k in range(rr):
            t = rr * ps[k] / (k + 1)
            if t < mn:
                mn = t
        for k in range(rr):
            adj[k] = mn
        q = np.empty(rr)
        for mm in range(rr - 1, 1, -1):
            cut = rr - mm + 1
            q1 = np.inf
            for k in range(cut, rr):
                t = mm * ps[k] / (k - cut + 2)
                if t < q1:
                    q1 = t
            for k in range(cut):
                t = mm * ps[k]
                q[k] = t if t < q1 else q1
            qc = q[cut - 1]
            for k in range(cut, rr):
                q[k] = qc
            for k in range(rr):
                if q[k] > adj[k]:
                    adj[k] = q[k]
        for k in range(rr):
            if ps[k] > adj[k]:
                adj[k] = ps[k]

    @njit(cache=True)
    def step_decisions(pmat, lam, alpha, kind):
        reps, m = pmat.shape
        out = np.zeros((reps, m), dtype=np.bool_)
        vals = np.empty(m)
        cols = np.empty(m, dtype=np.int64)
        adj = np.empty(m)
        for r in range(reps):
            rr = 0
            for j in range(m):
                pj = pmat[r, j]
                if pj <= lam:
                    vals[rr] = pj / lam
                    cols[rr] = j
                    rr += 1
            if rr == 0:
                continue
            order = np.argsort(vals[:rr], kind="mergesort")
            if kind == 0:  # holm: reject prefix while running max <= alpha
                runmax = 0.0
                for k in range(rr):
                    a = (rr - k) * vals[order[k]]
                    if a > runmax:
                        runmax = a
                    if runmax > alpha:
                        break
                    out[r, cols[order[k]]] = True
            elif kind == 1 or kind == 2:  # step-up: scan from the top
                kstar = -1
                runmin = np.inf
                for k in range(rr - 1, -1, -1):
                    if kind == 1:
                        a = (rr - k) * vals[order[k]]
                    else:
                        a = rr * vals[order[k]] / (k + 1)
                    if a < runmin:
                        runmin = a
                    if runmin <= alpha:
                        kstar = k
                        break
                for k in range(kstar + 1):
                    out[r, cols[order[k]]] = True
            else:  # hommel
                sorted_vals = np.empty(rr)
                for k in range(rr):
                    sorted_vals[k] = vals[order[k]]
                hommel_adj_sorted(sorted_vals, adj)
                for k in range(rr):
                    if adj[k] <= alpha:
                        out[r, cols[order[k]]] = True
        return out

    @njit(cache=True)
    def cbp_grid_counts(pmat, truth_mask, alphas, lams):
        reps, m = pmat.shape
        out = np.zeros((alphas.size, lams.size), dtype=np.int64)
        for r in range(reps):
            min_true = 2.0
            for j in range(m):
                if truth_mask[j] and pmat[r, j] < min_true:
                    min_true = pmat[r, j]
            for li in range(lams.size):
                lam = lams[li]
                rcount = 0
                for j in range(m):
                    if pmat[r, j] <= lam:
                        rcount += 1
                r_safe = rcount if rcount > 0 else 1
                for ai in range(alphas.size):
                    if min_true < alphas[ai] * lam / r_safe:
                        out[ai, li] += 1
        return out

    return {
        "name": "numba",
        "step_decisions": step_decisions,
        "cbp_grid_counts": cbp_grid_counts,
    }


# ----------------------------------------------------------------------
# selection
# ----------------------------------------------------------------------

_cached = {}


def _env_choice() -> str:
    raw = os.environ.get("CONDMTP_NUMBA", "auto").strip().lower()
    if raw in ("", "auto"):
        return "auto"
    if raw in ("0", "false", "off", "no", "numpy"):
        return "numpy"
    if raw in ("1", "true", "on", "yes", "numba"):
        return "numba"
    warnings.warn(f"unrecognised CONDMTP_NUMBA={raw!r}; using auto")
    return "auto"


def get_backend(name: str | None = None) -> dict:
    """Return the kernel table for ``name`` (or the env-selected default)."""
    choice = name or _env_choice()
    if choice == "numpy":
        return _NUMPY_BACKEND
    if choice in ("numba", "auto"):
        if "numba" not in _cached:
            try:
                _cached["numba"] = _build_numba_backend()
            except ImportError:
                _cached["numba"] = None
        backend = _cached["numba"]
        if backend is not None:
            return backend
        if choice == "numba":
            raise RuntimeError("CONDMTP_NUMBA requested numba but it is not importable")
        return _NUMPY_BACKEND
    raise ValueError(f"unknown backend {choice!r}")


def active_backend_name() -> str:
    return get_backend()["name"]
