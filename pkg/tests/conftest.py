import pathlib

import pytest

from countscale import ingest_csv

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def dengue():
    """Seven monthly totals over 211 days; total 2580."""
    return ingest_csv(DATA / "dengue_2022.csv", "aggregated")


@pytest.fixture
def covid():
    """Ten monthly totals over 299 days; total 513510."""
    return ingest_csv(DATA / "covid_2020.csv", "aggregated")


@pytest.fixture
def monthly_counts():
    """151 months of outbreak-shaped counts, 2010-01 through 2022-07."""
    return ingest_csv(DATA / "monthly_counts.csv", "aggregated")
