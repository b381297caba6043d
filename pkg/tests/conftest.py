import numpy as np
import pytest

from codenoise import gf2

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_codes():
    codes = [gf2.repetition_pair(8), gf2.reed_muller(1, 3), gf2.reed_muller(1, 4), gf2.zero_code(5),
             gf2.full_space(5)]
    codes += [gf2.random_code(n, k, seed) for seed, (n, k) in enumerate([(6, 3), (8, 5), (9, 2), (10, 6), (7, 7)])]
    return codes
