"""Complex values carried as (log magnitude, unit phase) pairs.

Quantities like |z|^(2*N!) and the kernel sums built from 1/(z - a_i) leave
the double range long before the interpolation ratio they feed does.  All
such intermediates are therefore combined additively in the log domain and
exponentiated only once, on the final ratio.
"""

from __future__ import annotations

import cmath
import math

from .errors import RangeOverflowError

_NEG_INF = float("-inf")
# exp() underflows to 0 below ~-745 and overflows above ~709
_EXP_MAX = 709.0


class LogComplex:
    """Immutable complex number stored as exp(log_mag) * phase, |phase| = 1."""

    __slots__ = ("log_mag", "phase")

    def __init__(self, log_mag: float, phase: complex):
        self.log_mag = log_mag
        self.phase = phase

    @staticmethod
    def zero() -> "LogComplex":
        return LogComplex(_NEG_INF, 1.0 + 0.0j)

    @staticmethod
    def one() -> "LogComplex":
        return LogComplex(0.0, 1.0 + 0.0j)

    @staticmethod
    def from_complex(w: complex) -> "LogComplex":
        w = complex(w)
        r = abs(w)
        if r == 0.0:
            return LogComplex.zero()
        return LogComplex(math.log(r), w / r)

    @staticmethod
    def from_real(x: float) -> "LogComplex":
        if x == 0.0:
            return LogComplex.zero()
        return LogComplex(math.log(abs(x)), 1.0 + 0.0j if x > 0 else -1.0 + 0.0j)

    def is_zero(self) -> bool:
        return self.log_mag == _NEG_INF

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero() or other.is_zero():
            return LogComplex.zero()
        return LogComplex(self.log_mag + other.log_mag, self.phase * other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero():
            return LogComplex.zero()
        if other.is_zero():
            raise ZeroDivisionError("log-domain division by zero")
        return LogComplex(self.log_mag - other.log_mag, self.phase / other.phase)

    def conjugate(self) -> "LogComplex":
        if self.is_zero():
            return LogComplex.zero()
        return LogComplex(self.log_mag, self.phase.conjugate())

    def squared_magnitude(self) -> "LogComplex":
        """Exactly real-positive |w|^2; avoids the phase*conj(phase) roundoff."""
        if self.is_zero():
            return LogComplex.zero()
        return LogComplex(2.0 * self.log_mag, 1.0 + 0.0j)

    def pow_int(self, k: int) -> "LogComplex":
        if k == 0:
            return LogComplex.one()
        if self.is_zero():
            return LogComplex.zero()
        ph = cmath.exp(1j * k * cmath.phase(self.phase))
        return LogComplex(k * self.log_mag, ph / abs(ph))

    def scale_log(self, delta: float) -> "LogComplex":
        """Multiply by exp(delta) without leaving the log domain."""
        if self.is_zero():
            return LogComplex.zero()
        return LogComplex(self.log_mag + delta, self.phase)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex.sum((self, other))

    @staticmethod
    def sum(items) -> "LogComplex":
        items = [it for it in items if not it.is_zero()]
        if not items:
            return LogComplex.zero()
        pivot = max(it.log_mag for it in items)
        acc = 0.0 + 0.0j
        for it in items:
            acc += it.phase * math.exp(it.log_mag - pivot)
        r = abs(acc)
        if r == 0.0:
            return LogComplex.zero()
        return LogComplex(pivot + math.log(r), acc / r)

    def to_complex(self) -> complex:
        if self.is_zero():
            return 0.0 + 0.0j
        if self.log_mag > _EXP_MAX:
            raise RangeOverflowError(
                f"log-domain magnitude {self.log_mag:.1f} exceeds float range"
            )
        return self.phase * math.exp(self.log_mag)

    def __repr__(self) -> str:
        return f"LogComplex(log_mag={self.log_mag!r}, phase={self.phase!r})"
