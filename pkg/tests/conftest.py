import numpy as np
import pytest

from paraspan.constraints import InflectionLexicon


@pytest.fixture(scope="session")
def toy_lexicon():
    return InflectionLexicon({
        ("confirm", "v"): {"confirm", "confirms", "confirmed", "confirming"},
        ("corroborate", "v"): {"corroborate", "corroborates", "corroborated", "corroborating"},
        ("verify", "v"): {"verify", "verifies", "verified", "verifying"},
        ("sell", "v"): {"sell", "sells", "sold", "selling"},
        ("will", "v"): {"will", "would"},
        ("be", "v"): {"be", "is", "are", "was", "were", "been", "being"},
        ("there", "r"): {"there"},
    })


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
