import numpy as np
import pytest

from hybrid_precode import ChannelConfig, beamsteering_codebook, generate_channel

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def desk_channel(seed, n_bs=16, n_ms=8, k=16, cp=4):
    return generate_channel(ChannelConfig(n_bs=n_bs, n_ms=n_ms, k_subcarriers=k, cp_length=cp), seed)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def desk_codebook():
    return beamsteering_codebook(16, 16)


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; printed in the terminal summary."""
    name = request.node.name

    def record(ok: bool, detail: str = ""):
        _ACCEPTANCE[name] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
