"""Hot numeric kernels with a numba path and a pure-numpy path.

The backend is picked once at import time. Setting ``ARGLTS_PURE_NUMPY=1``
(or running without numba installed) selects the numpy implementations;
both live side by side in :data:`BACKENDS` so tests and the benchmark can
call either explicitly.

Conventions shared by every kernel:

* labelling codes are ``0 = IN``, ``1 = OUT``, ``2 = UNDEC``;
* ``adj[y, x]`` is true when ``y`` attacks ``x``;
* a literal is encoded as ``2 * fluent_index + positive`` and ``-1`` pads
  clause rows.
"""

from __future__ import annotations

import logging
import os

import numpy as np

log = logging.getLogger(__name__)

IN, OUT, UNDEC = 0, 1, 2

_CHUNK = 1 << 16


def _env_wants_numpy():
    return os.environ.get("ARGLTS_PURE_NUMPY", "").strip().lower() in {"1", "true", "yes", "on"}


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _complete_codes_numpy(adj):
    n = adj.shape[0]
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    adj_i = adj.astype(np.int32)
    pow3 = 3 ** np.arange(n, dtype=np.int64)
    total = 3**n
    found = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        codes = ((idx[:, None] // pow3[None, :]) % 3).astype(np.int8)
        is_in = codes == IN
        is_out = codes == OUT
        in_attackers = is_in.astype(np.int32) @ adj_i
        live_attackers = (~is_out).astype(np.int32) @ adj_i
        ok = np.all((is_in == (live_attackers == 0)) & (is_out == (in_attackers > 0)), axis=1)
        found.append(codes[ok])
    return np.concatenate(found, axis=0)


def _triggered_numpy(state, clause_lits, clause_owner, n_events):
    if clause_lits.shape[0] == 0:
        return np.ones(n_events, dtype=np.bool_)
    pad = clause_lits < 0
    lits = np.where(pad, 0, clause_lits)
    values = (state[lits >> 1] == (lits & 1)) & ~pad
    unsat = ~values.any(axis=1)
    counts = np.bincount(clause_owner[unsat], minlength=n_events)
    return counts == 0


def _maximal_numpy(triggered, dominance):
    if not triggered.any():
        return triggered.copy()
    dominated = dominance[triggered].any(axis=0)
    return triggered & ~dominated


def _closure_numpy(adj):
    closure = adj.astype(np.bool_).copy()
    for k in range(closure.shape[0]):
        closure |= closure[:, k : k + 1] & closure[k : k + 1, :]
    return closure


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _complete_mask_nb(adj):
        n = adj.shape[0]
        total = 1
        for _ in range(n):
            total *= 3
        mask = np.zeros(total, dtype=np.bool_)
        codes = np.zeros(n, dtype=np.int8)
        for idx in range(total):
            rest = idx
            for j in range(n):
                codes[j] = rest % 3
                rest //= 3
            ok = True
            for x in range(n):
                any_in = False
                all_out = True
                for y in range(n):
                    if adj[y, x]:
                        if codes[y] == 0:
                            any_in = True
                        if codes[y] != 1:
                            all_out = False
                if (codes[x] == 0) != all_out or (codes[x] == 1) != any_in:
                    ok = False
                    break
            mask[idx] = ok
        return mask

    def _complete_codes_numba(adj):
        n = adj.shape[0]
        if n == 0:
            return np.zeros((1, 0), dtype=np.int8)
        mask = _complete_mask_nb(np.ascontiguousarray(adj, dtype=np.bool_))
        idx = np.nonzero(mask)[0].astype(np.int64)
        pow3 = 3 ** np.arange(n, dtype=np.int64)
        return ((idx[:, None] // pow3[None, :]) % 3).astype(np.int8)

    @njit(cache=True)
    def _triggered_nb(state, clause_lits, clause_owner, n_events):
        out = np.ones(n_events, dtype=np.bool_)
        width = clause_lits.shape[1]
        for c in range(clause_lits.shape[0]):
            owner = clause_owner[c]
            if not out[owner]:
                continue
            sat = False
            for w in range(width):
                lit = clause_lits[c, w]
                if lit < 0:
                    break
                if state[lit >> 1] == (lit & 1):
                    sat = True
                    break
            if not sat:
                out[owner] = False
        return out

    def _triggered_numba(state, clause_lits, clause_owner, n_events):
        return _triggered_nb(state, clause_lits, clause_owner, n_events)

    @njit(cache=True)
    def _maximal_nb(triggered, dominance):
        n = triggered.shape[0]
        out = triggered.copy()
        for d in range(n):
            if not triggered[d]:
                continue
            for e in range(n):
                if out[e] and dominance[d, e]:
                    out[e] = False
        return out

    def _maximal_numba(triggered, dominance):
        return _maximal_nb(triggered, dominance)

    @njit(cache=True)
    def _closure_nb(adj):
        n = adj.shape[0]
        closure = adj.copy()
        for k in range(n):
            for i in range(n):
                if closure[i, k]:
                    for j in range(n):
                        if closure[k, j]:
                            closure[i, j] = True
        return closure

    def _closure_numba(adj):
        return _closure_nb(np.ascontiguousarray(adj, dtype=np.bool_))


BACKENDS = {
    "numpy": {
        "complete_codes": _complete_codes_numpy,
        "triggered": _triggered_numpy,
        "maximal": _maximal_numpy,
        "closure": _closure_numpy,
    }
}
if HAVE_NUMBA:
    BACKENDS["numba"] = {
        "complete_codes": _complete_codes_numba,
        "triggered": _triggered_numba,
        "maximal": _maximal_numba,
        "closure": _closure_numba,
    }

BACKEND = "numba" if HAVE_NUMBA and not _env_wants_numpy() else "numpy"
log.debug("arglts kernel backend: %s", BACKEND)

_active = BACKENDS[BACKEND]


def complete_codes(adj: np.ndarray) -> np.ndarray:
    """All complete labellings of the graph ``adj`` as a ``(k, n)`` int8 code matrix.

    Rows come out in ascending base-3 order, argument 0 being the least
    significant digit.
    """
    return _active["complete_codes"](adj)


def triggered(state: np.ndarray, clause_lits: np.ndarray, clause_owner: np.ndarray, n_events: int) -> np.ndarray:
    """Mask of events whose CNF trigger is satisfied by the 0/1 ``state`` vector."""
    return _active["triggered"](state, clause_lits, clause_owner, n_events)


def maximal(triggered_mask: np.ndarray, dominance: np.ndarray) -> np.ndarray:
    """Triggered events not dominated by any other triggered event."""
    return _active["maximal"](triggered_mask, dominance)


def transitive_closure(adj: np.ndarray) -> np.ndarray:
    return _active["closure"](adj)
