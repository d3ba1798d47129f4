"""stitkit test configuration and fixtures."""

import shutil
import sys
import tempfile
import uuid
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from stitkit.btac import BTACModel, BTFrame
from stitkit.morphism import partition_fixture
from stitkit.nbhd import NbhdFrame, NbhdModel


@pytest.fixture
def examples_dir():
    return project_root / "data" / "examples"


@pytest.fixture
def tmp_path():
    """Dedicated temp path to avoid default pytest temp permission issues."""
    base = Path(tempfile.gettempdir()) / "stitkit_pytest_tmp"
    base.mkdir(parents=True, exist_ok=True)
    path = base / f"tmp_{uuid.uuid4().hex}"
    path.mkdir(parents=True, exist_ok=True)
    try:
        yield path
    finally:
        shutil.rmtree(path, ignore_errors=True)


@pytest.fixture
def fixture_frames():
    """(F1, F2, f) from the partition-undefinability argument."""
    return partition_fixture()


@pytest.fixture
def f1_model(fixture_frames):
    """F1 with V(p) = {w1, w2}."""
    f1, _, _ = fixture_frames
    return NbhdModel.from_names(f1, {"p": ["w1", "w2"]})


@pytest.fixture
def two_cell_model():
    """W = {w1, w2}, one agent whose choices are {w1} and {w2}, V(p) = {w2}."""
    frame = NbhdFrame.uniform(["w1", "w2"], ["a"], {"a": [["w1"], ["w2"]]})
    return NbhdModel.from_names(frame, {"p": ["w2"]})


@pytest.fixture
def grid_model():
    """Two agents with two choices each over four states; class C and class P."""
    frame = NbhdFrame.uniform(
        ["w1", "w2", "w3", "w4"],
        ["a", "b"],
        {"a": [["w1", "w2"], ["w3", "w4"]], "b": [["w1", "w3"], ["w2", "w4"]]},
    )
    return NbhdModel.from_names(frame, {"p": ["w1", "w2"], "q": ["w1", "w3"]})


@pytest.fixture
def fork_frame():
    """m1 < m2, m1 < m3."""
    return BTFrame.from_edges(["m1", "m2", "m3"], [("m1", "m2"), ("m1", "m3")])


@pytest.fixture
def fork_model(fork_frame):
    """Agent a chooses between the two histories at m1; p holds at m1/h:m2 only."""
    return BTACModel.build(
        fork_frame,
        ["a"],
        {"a": {"m1": [["h:m2"], ["h:m3"]]}},
        {"p": [("m1", "h:m2")]},
    )
