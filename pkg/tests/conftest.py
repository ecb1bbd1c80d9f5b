import pathlib

import pytest

from pbmap.flow import prepare_match_table
from pbmap.library import parse_library

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "pbmap" / "data"


@pytest.fixture(scope="session")
def lib():
    return parse_library((DATA / "sfq.genlib").read_text(), name="sfq")


@pytest.fixture(scope="session")
def table(lib):
    return prepare_match_table(lib, k=5, max_depth=3)
