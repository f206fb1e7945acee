from pathlib import Path

import pytest

from netrev.library import load_gate_library

LIB_PATH = Path(__file__).resolve().parents[1] / "src" / "netrev" / "data" / "simple_fpga.json"


@pytest.fixture(scope="session")
def lib():
    return load_gate_library(LIB_PATH)


@pytest.fixture(scope="session")
def lib_path():
    return LIB_PATH
