import pytest

from stardiv import InfSupConfig, PencilOperators

_OPERATOR_CACHE: dict = {}


@pytest.fixture(scope="session")
def pencil_cache():
    """Share assembled operators/factorizations across acceptance criteria."""

    def get(family: str, n: int, degree: int) -> PencilOperators:
        key = (family, n, degree)
        if key not in _OPERATOR_CACHE:
            cfg = InfSupConfig(family=family, n=n, degree=degree)
            _OPERATOR_CACHE[key] = PencilOperators.from_config(cfg)
        return _OPERATOR_CACHE[key]

    return get
