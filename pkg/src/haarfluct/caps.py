"""Size caps for the exact (factorial-cost) code paths.

Every cap can be raised through an environment variable
``HAARFLUCT_<NAME>`` (for example ``HAARFLUCT_WEINGARTEN_CAP=6``).
Raising a cap is safe for correctness but the cost of the affected
routines grows factorially; the defaults cover everything the test
suite needs.
"""

from __future__ import annotations

import os

DEFAULTS = {
    "WEINGARTEN_CAP": 5,    # largest n for exact Weingarten Gram inversion
    "ENUM_CAP": 10,         # largest n / m+n for non-crossing enumeration
    "EPS_CAP": 5,           # largest l for S^(eps) enumeration ((l!)^2 terms)
    "PARTITION_CAP": 12,    # largest n for full set-partition enumeration
    "CUMULANT_ORDER_CAP": 4,  # largest order r for exact joint trace cumulants
    "MOMENT_CAP": 6,        # largest r for cumulants from a moment oracle
}


class CapExceeded(Exception):
    """A request went past the configured size cap for an exact routine."""


def get_cap(name: str) -> int:
    value = os.environ.get(f"HAARFLUCT_{name}")
    if value is not None:
        cap = int(value)
        if cap < 1:
            raise ValueError(f"cap {name} must be positive, got {cap}")
        return cap
    return DEFAULTS[name]


def check_cap(name: str, requested: int, what: str) -> None:
    cap = get_cap(name)
    if requested > cap:
        raise CapExceeded(
            f"{what} needs size {requested} but the cap {name} is {cap}; "
            f"set HAARFLUCT_{name} to raise it (cost grows factorially)"
        )
