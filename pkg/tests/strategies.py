"""Hypothesis strategies and seeded generators shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from wiretap.chain import AuxiliaryChain
from wiretap.channel import ChannelMatrix, WiretapChannel

weight = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def pmfs(draw, dim=None, min_dim=2, max_dim=5):
    n = dim if dim is not None else draw(st.integers(min_dim, max_dim))
    w = np.array(draw(st.lists(weight, min_size=n, max_size=n)))
    if w.sum() < 1e-3:
        w = w + 1.0
    return w / w.sum()


@st.composite
def stochastic(draw, rows, cols):
    return np.stack([draw(pmfs(dim=cols)) for _ in range(rows)])


@st.composite
def wiretap_channels(draw, min_in=2, max_in=4, max_out=4):
    n = draw(st.integers(min_in, max_in))
    ky = draw(st.integers(2, max_out))
    kz = draw(st.integers(2, max_out))
    return WiretapChannel(ChannelMatrix(draw(stochastic(n, ky))),
                          ChannelMatrix(draw(stochastic(n, kz))))


@st.composite
def chains(draw, in_dim, max_u=3, max_v=4):
    nu = draw(st.integers(1, max_u))
    nv = draw(st.integers(1, max_v))
    return AuxiliaryChain(draw(pmfs(dim=nu)), draw(stochastic(nu, nv)),
                          draw(stochastic(nv, in_dim)))


def random_channel(rng, n, ky, kz, concentration=1.0):
    main = rng.dirichlet(np.full(ky, concentration), size=n)
    eve = rng.dirichlet(np.full(kz, concentration), size=n)
    return WiretapChannel(ChannelMatrix(main), ChannelMatrix(eve))


def random_chain(rng, in_dim, max_u=3, max_v=4):
    nu = int(rng.integers(1, max_u + 1))
    nv = int(rng.integers(1, max_v + 1))
    # sparse Dirichlet draws reach the simplex boundary as well as the interior
    conc = float(rng.choice([0.2, 1.0]))
    return AuxiliaryChain(rng.dirichlet(np.ones(nu)),
                          rng.dirichlet(np.full(nv, conc), size=nu),
                          rng.dirichlet(np.full(in_dim, conc), size=nv))
