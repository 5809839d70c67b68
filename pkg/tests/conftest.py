from fractions import Fraction

import pytest

from hyperball.metric import FiniteMetricSpace, validate_metric
from hyperball.rng import SplitMix64


def F(num, den=1) -> Fraction:
    return Fraction(num, den)


def pt(*coords):
    return tuple(Fraction(c) for c in coords)


def random_metric(seed: int, max_points: int = 8) -> FiniteMetricSpace:
    """Valid exact metric: shortest-path closure of random positive weights."""
    rng = SplitMix64(seed)
    n = rng.randint(2, max_points)
    d = [[0 if i == j else rng.randint(1, 9) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[j][i] = d[i][j]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return validate_metric(d)


@pytest.fixture
def c5():
    from hyperball.metric import GraphInstance, graph_metric

    return graph_metric(GraphInstance(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0))))
