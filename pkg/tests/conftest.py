from __future__ import annotations

from importlib import resources

import pytest

from shaclcheck.ntriples import parse_ntriples
from shaclcheck.shapes_syntax import parse_shapes

DATA = resources.files("shaclcheck") / "data"


def data_text(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def data_path(name: str) -> str:
    return str(DATA / name)


@pytest.fixture(scope="session")
def s1():
    return parse_shapes(data_text("s1.shapes")).shapes


@pytest.fixture(scope="session")
def fig1b():
    return parse_ntriples(data_text("fig1b.nt"))


@pytest.fixture(scope="session")
def erratum_shapes():
    return parse_shapes(data_text("erratum.shapes")).shapes


@pytest.fixture(scope="session")
def g1():
    return parse_ntriples(data_text("g1.nt"))
