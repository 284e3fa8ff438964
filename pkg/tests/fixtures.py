"""Small hand-checkable datasets shared across tests."""
import numpy as np

from widegaps import Clustering, Dataset


def four_points(inter: float = 3.0, intra: float = 1.0) -> tuple[Dataset, Clustering]:
    """Two pairs {0,1} and {2,3}: intra distance ``intra``, every inter distance ``inter``."""
    D = np.full((4, 4), float(inter))
    D[0, 1] = D[1, 0] = D[2, 3] = D[3, 2] = intra
    np.fill_diagonal(D, 0.0)
    return Dataset.from_distances(D), Clustering([0, 0, 1, 1])


def triangle_violator() -> Dataset:
    return Dataset.from_distances([[0, 1, 1], [1, 0, 3], [1, 3, 0]])
