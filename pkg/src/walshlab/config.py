"""Runtime limits shared by every module."""

import os

DEFAULT_MAX_ORDER = 14
MAX_ORDER_ENV = "WALSHLAB_MAX_ORDER"


def max_order() -> int:
    """Largest dyadic order a step function may have (2**order cells)."""
    raw = os.environ.get(MAX_ORDER_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_ORDER
    value = int(raw)
    if value < 0:
        raise ValueError(f"{MAX_ORDER_ENV} must be nonnegative, got {value}")
    return value


def check_order(n: int) -> int:
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    cap = max_order()
    if n > cap:
        raise ValueError(f"order {n} exceeds the configured cap {cap}")
    return n
