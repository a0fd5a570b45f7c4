import math

import pytest
from hypothesis import settings, strategies as st

from hyperlab.presets import preset
from hyperlab.spaces import FreeTree, UpperHalfPlane
from hyperlab.words import Word

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

LETTERS2 = "aAbB"


def raw_words(rank: int = 2, max_size: int = 12):
    alphabet = "".join(chr(ord("a") + i) + chr(ord("A") + i) for i in range(rank))
    return st.text(alphabet=alphabet, max_size=max_size)


def words(rank: int = 2, max_size: int = 12):
    return raw_words(rank, max_size).map(lambda s: Word.parse(s, rank) if s else Word.identity())


def nonempty_words(rank: int = 2, max_size: int = 12):
    return words(rank, max_size).filter(bool)


def periods(max_size: int = 4):
    return words(2, max_size).filter(lambda w: w.cyclic_length() == len(w) and len(w) > 0)


@pytest.fixture(scope="session")
def tree():
    return FreeTree(2)


@pytest.fixture(scope="session")
def diag():
    s = math.sqrt(2)
    return UpperHalfPlane([[[s, 0], [0, 1 / s]]])


@pytest.fixture(scope="session")
def schottky():
    return preset("schottky")


@pytest.fixture(scope="session")
def schottky_conj():
    return preset("schottky-conj")
