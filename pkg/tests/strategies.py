import numpy as np
from hypothesis import strategies as st

from equivox.prob import BlockPermutation, JointDistribution


@st.composite
def joint(draw, dx=None, dy=None, sparse=True):
    dx = dx or draw(st.integers(2, 4))
    dy = dy or draw(st.integers(2, 4))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    alpha = 0.3 if sparse and draw(st.booleans()) else 1.0
    g = rng.dirichlet(np.full(dx * dy, alpha)).reshape(dx, dy)
    return JointDistribution(g)


@st.composite
def joint_pair(draw):
    dx = draw(st.integers(2, 4))
    dy = draw(st.integers(2, 4))
    return draw(joint(dx, dy)), draw(joint(dx, dy))


@st.composite
def block_perm(draw, dx, dy):
    seed = draw(st.integers(0, 2**32 - 1))
    return BlockPermutation.random(dx, dy, np.random.default_rng(seed))


@st.composite
def prob_vector(draw, d=None):
    d = d or draw(st.integers(2, 5))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).dirichlet(np.ones(d))


seeds = st.integers(0, 2**32 - 1)
