import json
from pathlib import Path

import pytest

from deltaengine.engine import init_engine
from deltaengine.script import RoleScript

FIXTURES = Path(__file__).parent / "fixtures"

GREEN_BUG = {
    "species": "Green-Bug",
    "types": ["Bug"],
    "stats": {"hp": 45, "atk": 60, "def": 50, "spa": 40, "spd": 40, "spe": 70},
    "moves": [
        {"name": "Tackle", "description": "A full-body charge.", "base_power": 40, "category": "physical"},
        {"name": "Lundge", "description": "A sudden lunging strike.", "base_power": 40, "category": "physical"},
    ],
}


@pytest.fixture
def green_bug_script() -> RoleScript:
    return RoleScript.from_dict(GREEN_BUG)


@pytest.fixture
def green_bug_state(green_bug_script):
    return init_engine(green_bug_script)


@pytest.fixture(scope="session")
def damage_oracle_rows():
    with open(FIXTURES / "damage_oracle.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return FIXTURES / "golden"
