import pytest

from relativize import (
    ExperimentConfig,
    brute_force_sat,
    build_A,
    build_B,
    build_C,
    build_C_bar,
    build_F,
    gen_corpus,
)


@pytest.fixture(scope="session")
def default_config():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def corpus(default_config):
    return gen_corpus(default_config)


@pytest.fixture(scope="session")
def truth(corpus):
    """Exhaustive ground truth for every corpus formula, computed once."""
    return {f.id: brute_force_sat(f) for f in corpus}


@pytest.fixture(scope="session")
def oracle_a(corpus):
    return build_A(corpus)


@pytest.fixture(scope="session")
def oracle_b(corpus):
    return build_B(corpus)


@pytest.fixture(scope="session")
def oracle_c(corpus):
    return build_C(corpus)


@pytest.fixture(scope="session")
def oracle_c_bar(corpus):
    return build_C_bar(corpus)


@pytest.fixture(scope="session")
def oracle_f(corpus):
    return build_F(corpus)
