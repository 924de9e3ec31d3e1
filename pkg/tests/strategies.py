import numpy as np
from hypothesis import strategies as st

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=8)


@st.composite
def complex_matrices(draw, dim=None, scale=None):
    d = draw(dims) if dim is None else dim
    s = draw(st.floats(1e-3, 1e3)) if scale is None else scale
    rng = np.random.default_rng(draw(seeds))
    return s * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))


@st.composite
def hermitian_matrices(draw, dim=None):
    G = draw(complex_matrices(dim=dim))
    return (G + G.conj().T) / 2
