import os
from dataclasses import dataclass

DEFAULT_CAP = 2_000_000
CAP_ENV = "FRACTAL_CAP"


@dataclass(frozen=True)
class LabConfig:
    """Runtime knobs. ``cap`` bounds segment/piece counts; ``None`` disables it."""

    cap: int | None = DEFAULT_CAP

    @classmethod
    def from_env(cls, environ=None):
        environ = os.environ if environ is None else environ
        raw = environ.get(CAP_ENV)
        if raw is None or raw.strip() == "":
            return cls()
        return cls(cap=parse_cap(raw))


def parse_cap(raw):
    """Parse a cap setting; ``0`` or ``none`` means unlimited."""
    text = str(raw).strip().lower()
    if text in ("none", "0", "inf", "unlimited"):
        return None
    value = int(text.replace("_", ""))
    if value < 0:
        raise ValueError(f"cap must be non-negative, got {raw!r}")
    return value


def check_cap(count, cap, what="elements"):
    from .errors import CapExceeded

    if cap is not None and count > cap:
        raise CapExceeded(count, cap, what)
