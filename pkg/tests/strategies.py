"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from nestcorona.algebra import make_model

block_lists = st.lists(st.integers(1, 2), min_size=1, max_size=3)


@st.composite
def models(draw, max_dim=6, max_summands=2):
    lists = draw(st.lists(block_lists, min_size=1, max_size=max_summands))
    m = make_model(lists)
    if m.dim > max_dim:
        m = make_model([lists[0]])
    return m


seeds = st.integers(0, 2**32 - 1)
