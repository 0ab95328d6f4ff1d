import os
import sys
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def corpus_geometry(name):
    from gqkit.corpus import load
    return load(name)


@pytest.fixture(scope="session")
def q42():
    from gqkit.constructions import quadric_gq
    return quadric_gq(4, 2)


@pytest.fixture(scope="session")
def q43():
    from gqkit.constructions import quadric_gq
    return quadric_gq(4, 3)


@pytest.fixture(scope="session")
def q52():
    from gqkit.constructions import quadric_gq
    return quadric_gq(5, 2)


@pytest.fixture(scope="session")
def w3():
    from gqkit.constructions import wq
    return wq(3)


@pytest.fixture(scope="session")
def h34():
    from gqkit.constructions import h3
    return h3(2)


@pytest.fixture(scope="session")
def g33():
    from gqkit.constructions import grid
    return grid(3, 3)


@pytest.fixture(scope="session")
def t2b():
    from gqkit.constructions import brown_oval, t2_of_oval
    return t2_of_oval(brown_oval(1))


@pytest.fixture(scope="session")
def tower23():
    from gqkit.galois import build_tower
    return build_tower(2, [1, 3])
