import json
import pathlib

import pytest

from megalie.algebra import algebra_from_brackets, algebra_from_dict

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def m5():
    data = json.loads((FIXTURES / "m5.json").read_text())
    return algebra_from_dict(data)


@pytest.fixture(scope="session")
def sl2d():
    data = json.loads((FIXTURES / "sl2d.json").read_text())
    return algebra_from_dict(data)


@pytest.fixture(scope="session")
def heisenberg():
    return algebra_from_brackets("heisenberg", ["e1", "e2", "e3"], {(0, 1): {2: 1}})


@pytest.fixture(scope="session")
def sl2():
    # basis (e, h, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
    return algebra_from_brackets(
        "sl2", ["e", "h", "f"], {(1, 0): {0: 2}, (1, 2): {2: -2}, (0, 2): {1: 1}}
    )


@pytest.fixture(scope="session")
def abelian3():
    return algebra_from_brackets("abelian3", ["x", "y", "z"], {})
