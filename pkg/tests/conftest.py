import functools

import pytest

from lowmoments.arith import build_modulus_context, sieve


@functools.lru_cache(maxsize=None)
def modulus(r):
    return build_modulus_context(r)


@functools.lru_cache(maxsize=None)
def primes_upto(n):
    return sieve(n)


@pytest.fixture
def ctx101():
    return modulus(101)


@pytest.fixture
def ctx10007():
    return modulus(10007)


ACCEPTANCE = []


def record_acceptance(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
