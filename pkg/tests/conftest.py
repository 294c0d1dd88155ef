import json
from pathlib import Path

import pytest

from hhslab import balls as B
from hhslab import projections as P
from hhslab import structure as S
from hhslab.graphs import load_graph

DATA = Path(__file__).parent.parent / "src" / "hhslab" / "data"
GOLDEN = Path(__file__).parent / "golden"


def graph_file(name):
    return DATA / f"{name}.ggp"


@pytest.fixture(scope="session")
def graphs():
    return {name: load_graph(graph_file(name)) for name in ("pentagon", "square", "f2", "clique3")}


_BALLS = {}


def shared_ball(graphs, name, radius):
    key = (name, radius)
    if key not in _BALLS:
        _BALLS[key] = B.ball(graphs[name], radius)
    return _BALLS[key]


_INDEXES = {}


def shared_index(graphs, name, radius):
    key = (name, radius)
    if key not in _INDEXES:
        idx = S.enumerate_domains(shared_ball(graphs, name, radius))
        _INDEXES[key] = idx.restructure()
    return _INDEXES[key]


_TABLES = {}


def shared_table(graphs, name, radius, structure=P.ORIGINAL):
    key = (name, radius, structure)
    if key not in _TABLES:
        _TABLES[key] = P.ProjectionTable(shared_index(graphs, name, radius), structure)
    return _TABLES[key]


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN / "derived_values.json", encoding="utf-8") as fh:
        return {entry["id"]: entry for entry in json.load(fh)["values"]}
