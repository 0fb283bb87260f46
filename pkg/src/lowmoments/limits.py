"""Capacity caps shared by the table builders.

The caps are configuration rather than constants: mutate ``CAPS`` (or pass
explicit ``cap=`` arguments) to raise them on a larger machine.
"""

from dataclasses import dataclass


class CapacityError(ValueError):
    """Raised when a requested table would exceed a configured cap."""


@dataclass
class Caps:
    sieve_limit: int = 100_000_000
    modulus: int = 20_000_000
    rmf_length: int = 10_000_000
    zeta_phase: float = 1e12


CAPS = Caps()


def check_cap(value, cap, what):
    if value > cap:
        raise CapacityError(f"{what}={value} exceeds configured cap {cap}")
