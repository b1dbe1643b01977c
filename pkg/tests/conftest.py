import itertools

import pytest

from qchain.chain import ChainSpec


def all_specs(ns, rates=(0.0, 0.5, 4.0, 20.0), xi=1.0):
    out = []
    for n, b, top, g in itertools.product(ns, ("open", "closed"), ("chained", "local"), rates):
        if b == "closed" and n < 3:
            continue
        out.append(ChainSpec(n, b, top, xi, g))
    return out


def spec_id(spec):
    return f"N{spec.n_qubits}-{spec.boundary.value}-{spec.topology.value}-g{spec.rate:g}"


@pytest.fixture(params=all_specs((3, 4, 5)), ids=spec_id)
def small_spec(request):
    return request.param


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line; it is echoed now and repeated in the terminal summary."""

    def record(label, passed, detail=""):
        line = f"{label}: {'PASS' if passed else 'FAIL'}" + (f"  {detail}" if detail else "")
        _VERDICTS.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
