import numpy as np
import pytest

from planeops import make_box_room

ROOM_SIZE = 3.5


@pytest.fixture(scope="session")
def cluttered_room():
    """The standard end-to-end fixture: cubic room plus uniform clutter."""
    points, truth = make_box_room(size=ROOM_SIZE, points_per_face=1000, clutter=600,
                                  noise_sigma=0.005, seed=0)
    return points, truth


@pytest.fixture(scope="session")
def clean_room():
    """The room without clutter, used for ground-truth generation checks."""
    points, truth = make_box_room(size=ROOM_SIZE, points_per_face=1000, clutter=0,
                                  noise_sigma=0.005, seed=0)
    return points, truth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
