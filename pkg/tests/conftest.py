import pytest
from hypothesis import strategies as st

from arglts.aaf import AAF, Labelling

NAMES = "abcdefgh"


def lab(i="", o="", u=""):
    return Labelling(frozenset(i), frozenset(o), frozenset(u))


EX1 = AAF.build("abcd", [("a", "b"), ("b", "a"), ("a", "c"), ("b", "c"), ("c", "d")])
L1 = lab("ad", "bc")
L2 = lab("bd", "ac")
L3 = lab(u="abcd")


@pytest.fixture
def ex1():
    return EX1


@pytest.fixture
def two_cycle():
    return AAF.build("ab", [("a", "b"), ("b", "a")])


@pytest.fixture
def three_cycle():
    return AAF.build("abc", [("a", "b"), ("b", "c"), ("c", "a")])


@st.composite
def aafs(draw, min_args=0, max_args=5):
    n = draw(st.integers(min_args, max_args))
    args = NAMES[:n]
    pairs = [(y, x) for y in args for x in args]
    attacks = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    return AAF.build(args, attacks)


@st.composite
def aaf_and_order(draw, min_args=1, max_args=5):
    af = draw(aafs(min_args, max_args))
    perm = draw(st.permutations(list(af.arguments)))
    cuts = draw(st.lists(st.booleans(), min_size=len(perm), max_size=len(perm)))
    blocks, cur = [], []
    for x, cut in zip(perm, cuts):
        if cut and cur:
            blocks.append(tuple(cur))
            cur = []
        cur.append(x)
    if cur:
        blocks.append(tuple(cur))
    return af, tuple(blocks)
