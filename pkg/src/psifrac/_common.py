"""Small shared definitions: operator side and the integer order of alpha."""

from __future__ import annotations

import enum
import math

from .errors import ParamError


class Side(enum.Enum):
    """Anchor of a fractional operator: ``LEFT`` at ``a``, ``RIGHT`` at ``b``."""

    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def coerce(cls, side: "Side | str") -> "Side":
        if isinstance(side, cls):
            return side
        try:
            return cls(str(side).lower())
        except ValueError:
            raise ParamError(f"side must be 'left' or 'right', got {side!r}") from None


def integer_order(alpha: float) -> int:
    """``n`` with ``n - 1 < alpha < n``, or ``n = alpha`` when alpha is an integer."""
    if not alpha > 0:
        raise ParamError(f"fractional order must be positive, got {alpha}")
    if float(alpha).is_integer():
        return int(alpha)
    return math.floor(alpha) + 1
