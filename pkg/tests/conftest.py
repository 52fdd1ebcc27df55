import numpy as np
import pytest

from physrc.ingest import write_scan_file
from physrc.simulators import MultiplexWindows, simulate_diode_dataset
from physrc.targets import generate_sine_wave


def write_scans(directory, rows, xs=None, prefix="scan", xs_col="t", readout_col="Voltage",
                delimiter="\t"):
    """Write each row of ``rows`` as ``{prefix}{i+1}.txt``; return the directory."""
    rows = np.asarray(rows, dtype=float)
    xs = np.arange(rows.shape[1], dtype=float) if xs is None else np.asarray(xs, float)
    directory.mkdir(parents=True, exist_ok=True)
    for i, row in enumerate(rows):
        write_scan_file(directory / f"{prefix}{i + 1}.txt", xs, row, xs_col, readout_col,
                        delimiter)
    return directory


@pytest.fixture
def scan_writer():
    return write_scans


@pytest.fixture(scope="session")
def sine_input():
    return generate_sine_wave(None, 10, 50)


@pytest.fixture(scope="session")
def diode_dataset(tmp_path_factory, sine_input):
    """The default diode dataset: 500 scans of 501 windows."""
    out = tmp_path_factory.mktemp("diode")
    simulate_diode_dataset(sine_input, MultiplexWindows.random(501, 0), out_dir=out)
    return out


# -- acceptance reporting -----------------------------------------------------

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion, then assert."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def check(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" | {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
