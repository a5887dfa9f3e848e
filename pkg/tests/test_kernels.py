import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arglts import kernels

BACKENDS = sorted(kernels.BACKENDS)


def brute_complete(adj):
    n = adj.shape[0]
    rows = []
    for codes in itertools.product(range(3), repeat=n):
        ok = True
        for x in range(n):
            atts = [y for y in range(n) if adj[y, x]]
            if (codes[x] == 0) != all(codes[y] == 1 for y in atts):
                ok = False
            if (codes[x] == 1) != any(codes[y] == 0 for y in atts):
                ok = False
        if ok:
            rows.append(codes)
    return {tuple(r) for r in rows}


adjacency = st.integers(0, 5).flatmap(
    lambda n: st.lists(st.booleans(), min_size=n * n, max_size=n * n).map(
        lambda bits: np.array(bits, dtype=np.bool_).reshape(n, n)
    )
)


def test_numba_present():
    assert "numba" in kernels.BACKENDS


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=60, deadline=None)
@given(adj=adjacency)
def test_complete_codes_match_brute_force(backend, adj):
    got = {tuple(int(c) for c in row) for row in kernels.BACKENDS[backend]["complete_codes"](adj)}
    assert got == brute_complete(adj)


@pytest.mark.parametrize("backend", BACKENDS)
def test_complete_codes_empty_graph(backend):
    assert kernels.BACKENDS[backend]["complete_codes"](np.zeros((0, 0), np.bool_)).shape == (1, 0)


def test_numpy_chunking_agrees_with_numba():
    rng = np.random.default_rng(3)
    adj = rng.random((9, 9)) < 0.25
    a = kernels.BACKENDS["numpy"]["complete_codes"](adj)
    b = kernels.BACKENDS["numba"]["complete_codes"](adj)
    assert {tuple(r) for r in a} == {tuple(r) for r in b}


def _python_closure(adj):
    n = adj.shape[0]
    reach = np.zeros_like(adj)
    for s in range(n):
        stack, seen = [j for j in range(n) if adj[s, j]], set()
        while stack:
            j = stack.pop()
            if j in seen:
                continue
            seen.add(j)
            stack.extend(k for k in range(n) if adj[j, k])
        for j in seen:
            reach[s, j] = True
    return reach


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=60, deadline=None)
@given(adj=adjacency)
def test_closure_matches_dfs(backend, adj):
    assert np.array_equal(kernels.BACKENDS[backend]["closure"](adj), _python_closure(adj))


@st.composite
def cnf_problem(draw):
    nf = draw(st.integers(1, 6))
    n_events = draw(st.integers(1, 5))
    state = np.array(draw(st.lists(st.integers(0, 1), min_size=nf, max_size=nf)), dtype=np.uint8)
    clauses = draw(
        st.lists(
            st.tuples(st.integers(0, n_events - 1), st.lists(st.integers(0, 2 * nf - 1), max_size=3)),
            max_size=8,
        )
    )
    return state, n_events, clauses


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=100, deadline=None)
@given(problem=cnf_problem())
def test_triggered_matches_direct_evaluation(backend, problem):
    state, n_events, clauses = problem
    width = max([len(c) for _, c in clauses] + [1])
    mat = np.full((len(clauses), width), -1, dtype=np.int32)
    for r, (_, lits) in enumerate(clauses):
        mat[r, : len(lits)] = lits
    owners = np.array([e for e, _ in clauses], dtype=np.int32)
    expected = np.ones(n_events, dtype=bool)
    for e, lits in clauses:
        if not any(state[l >> 1] == (l & 1) for l in lits):
            expected[e] = False
    got = kernels.BACKENDS[backend]["triggered"](state, mat, owners, n_events)
    assert np.array_equal(got, expected)


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=60, deadline=None)
@given(adj=adjacency, data=st.data())
def test_maximal_keeps_exactly_undominated(backend, adj, data):
    n = adj.shape[0]
    trig = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)), dtype=np.bool_)
    got = kernels.BACKENDS[backend]["maximal"](trig, adj)
    for e in range(n):
        dominated = any(trig[d] and adj[d, e] for d in range(n))
        assert got[e] == (trig[e] and not dominated)
