import json
from pathlib import Path

import pytest

# The engine ships its wire-contract schemas as files; the sidecar validates
# against those same files rather than keeping a copy.
SCHEMA_DIR = Path(__file__).resolve().parents[2] / "src" / "crossqa" / "schemas"


@pytest.fixture(scope="session")
def schemas():
    return {p.name: json.loads(p.read_text(encoding="utf-8")) for p in SCHEMA_DIR.glob("*.json")}


@pytest.fixture(scope="session")
def wire_fixtures():
    path = Path(__file__).parent / "wire_fixtures.json"
    return json.loads(path.read_text(encoding="utf-8"))
