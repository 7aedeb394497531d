import pathlib

import pytest

from adlog import Database, DeltaSet, UpdateProgram, parse_database, parse_delta, parse_program

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "src" / "adlog" / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def load_update_program(name: str, *, db: bool = False, delta: bool = True):
    program = parse_program(fixture_text(f"{name}.adl"), origin=name)
    d = parse_delta(fixture_text(f"{name}.adu")) if delta else DeltaSet()
    database = parse_database(fixture_text(f"{name}.adb")) if db else Database()
    return UpdateProgram(d, program), database


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES
