import json
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

PROJECT_DIR = Path(__file__).parent / "project"


@dataclass(slots=True, frozen=True)
class CliRun:
    returncode: int
    stdout: str
    stderr: str

    @property
    def document(self):
        return json.loads(self.stdout)


@pytest.fixture
def project():
    return PROJECT_DIR


@pytest.fixture
def riesz_kit_cli():
    def _run(*args, check=True):
        completed = subprocess.run(
            [sys.executable, "-m", "riesz_kit", *map(str, args)],
            capture_output=True,
            text=True,
        )
        run = CliRun(completed.returncode, completed.stdout, completed.stderr)
        if check and run.returncode != 0:
            raise AssertionError(f"riesz-kit exited {run.returncode}: {run.stderr}")
        return run

    return _run
