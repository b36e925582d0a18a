import os

import numpy as np
import pytest

from antbatch.model import AcoParams, TspInstance, build_instance, euclidean_instance
from antbatch.tsplib import RawTspFile, parse_instance

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "data")
PKG_DATA = os.path.join(HERE, os.pardir, "src", "antbatch", "data")


def read_fixture(name: str) -> str:
    with open(os.path.join(DATA, name), "r", encoding="utf-8") as f:
        return f.read()


def load_bundled(name: str) -> TspInstance:
    with open(os.path.join(PKG_DATA, name), "r", encoding="utf-8") as f:
        return build_instance(parse_instance(f.read()))


def random_metric_instance(rng: np.random.Generator, n: int,
                           integer: bool = True) -> TspInstance:
    """Random euclidean instance for equivalence fixtures.

    integer=True goes through the standard file conventions (distinct grid
    points, rounded distances), so every edge weight is integer-valued and
    scalar vs vectorized cost sums agree exactly. integer=False keeps raw
    euclidean distances.
    """
    if not integer:
        return euclidean_instance(rng.uniform(0.0, 1000.0, size=(n, 2)))
    while True:
        coords = rng.integers(0, 1000, size=(n, 2))
        if len(np.unique(coords, axis=0)) == n:
            break
    raw = RawTspFile(
        name="", dimension=n, edge_weight_type="EUC_2D",
        node_coords=tuple((i + 1, float(x), float(y))
                          for i, (x, y) in enumerate(coords)),
    )
    return build_instance(raw)


@pytest.fixture
def square5():
    # unit square plus center point: optimum is the 4-cycle detour via center
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0],
                       [0.5, 0.5]])
    return euclidean_instance(coords)


@pytest.fixture
def params8():
    return AcoParams(m=4, k=2, max_iters=10, seed=0)
