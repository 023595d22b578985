"""Size cap on materialised sets, scoped per context (thread-safe)."""

import contextlib
import contextvars

from .errors import CapExceeded

DEFAULT_CAP = 4096

_cap = contextvars.ContextVar("laxrel_cap", default=DEFAULT_CAP)


def get_cap():
    return _cap.get()


def set_cap(n):
    if n < 1:
        raise ValueError("cap must be positive")
    _cap.set(int(n))


@contextlib.contextmanager
def size_cap(n):
    """Temporarily change the cap, e.g. ``with size_cap(100): ...``."""
    token = _cap.set(int(n))
    try:
        yield
    finally:
        _cap.reset(token)


def check_size(what, size):
    cap = _cap.get()
    if size > cap:
        raise CapExceeded(what, size, cap)
    return size
