import random

import pytest

from worldgen.modeldb import load_bundle
from worldgen.seeddb import build_default_bundle


@pytest.fixture(scope="session")
def default_bundle(tmp_path_factory):
    path = tmp_path_factory.mktemp("bundle") / "models.amb"
    return load_bundle(build_default_bundle(path))


@pytest.fixture()
def rng():
    return random.Random(1234)


def random_convex_hull(rng, cx=0.0, cy=0.0, rmax=1.0, npts=8):
    """A random convex polygon around (cx, cy) via hull of random points."""
    from worldgen.geometry import convex_hull_2d

    while True:
        pts = [
            (cx + rng.uniform(-rmax, rmax), cy + rng.uniform(-rmax, rmax))
            for _ in range(npts)
        ]
        try:
            return convex_hull_2d(pts)
        except Exception:
            continue
