import csv
from pathlib import Path

import numpy as np
import pytest

from modeclust.dipstat import load_default_tables

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def tables():
    return load_default_tables()


@pytest.fixture(scope="session")
def iris():
    """The classic 150x4 measurements matrix plus the species column."""
    rows = []
    species = []
    with open(DATA_DIR / "iris.csv", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        for record in reader:
            rows.append([float(v) for v in record[:4]])
            species.append(record[4])
    return np.asarray(rows), header[:4], np.asarray(species)
