import math

import pytest

from tunneltda.topology import Barcode, PersistencePair, PointCloud, barcode_from_cloud


def make_cloud(points):
    return PointCloud.from_rows(
        (f"b{i}", float(x), float(y)) for i, (x, y) in enumerate(points)
    )


def random_cloud(rng, n_points, scale=10.0):
    return make_cloud(rng.uniform(-scale, scale, size=(n_points, 2)))


def bars(*triples, cap=30.0):
    return Barcode(tuple(PersistencePair(d, b, x) for d, b, x in sorted(triples)), cap)


@pytest.fixture
def square_barcode():
    """Unit square corners with cap 2: three [0,1) merges, one essential
    component, one hole [1, sqrt(2))."""
    return barcode_from_cloud(make_cloud([(0, 0), (1, 0), (1, 1), (0, 1)]), 2.0)


INF = math.inf
