#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - shared test fixtures
"""

import sys
from pathlib import Path

import pytest

# Add python_backend to path
sys.path.insert(0, str(Path(__file__).parent / "python_backend"))

from iteration import MeanTypeMapping  # noqa: E402
from mean_core import (arithmetic, catalog, geometric, harmonic, maximum, minimum,  # noqa: E402
                       proj1, proj2)


@pytest.fixture
def ag():
    return MeanTypeMapping(arithmetic(), geometric())


@pytest.fixture
def ah():
    return MeanTypeMapping(arithmetic(), harmonic())


@pytest.fixture
def minmax():
    return MeanTypeMapping(minimum(), maximum())


@pytest.fixture
def projections():
    return MeanTypeMapping(proj1(), proj2())


@pytest.fixture
def swapped_projections():
    return MeanTypeMapping(proj2(), proj1())


@pytest.fixture(scope="session")
def catalog_means():
    return catalog()


@pytest.fixture
def table_csv(tmp_path):
    """Write a table-mean CSV and return its path"""

    def write(rows, header="x,y,value"):
        path = tmp_path / "table.csv"
        lines = [header] + [",".join(repr(float(v)) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)

    return write
