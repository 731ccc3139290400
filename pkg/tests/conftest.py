import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

# filled by test_acceptance; reported once at the end of the session
CRITERIA_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERIA_RESULTS:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def synth_scene():
    from parallaxfx.synth import make_scene

    return make_scene(0)


@pytest.fixture(scope="session")
def synth_files(tmp_path_factory, synth_scene):
    from parallaxfx.synth import write_scene

    return write_scene(synth_scene, tmp_path_factory.mktemp("synth"))
