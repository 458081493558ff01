import math

import pytest

ACCEPTANCE_LINES = []


def series_j(v, x, terms=80):
    """Ascending power series of J_v(x) in exact-order summation; independent of scipy."""
    half = x / 2.0
    return math.fsum(
        (-1) ** m * half ** (2 * m + v) / (math.factorial(m) * math.gamma(m + v + 1)) for m in range(terms)
    )


def bisect(fn, a, b, tol=1e-14):
    fa = fn(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = fn(m)
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


@pytest.fixture
def record():
    def _record(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
