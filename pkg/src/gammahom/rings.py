"""Exact coefficient rings: the integers, the rationals and prime fields.

Every computation in this package is exact.  A ring is described by a
``RingSpec`` and all arithmetic goes through it, so the same code paths run
over Z, Q and F_p.  Elements are plain Python objects:

* ``Z``   -- ``int``
* ``Q``   -- ``fractions.Fraction`` (ints are accepted and coerced)
* ``F_p`` -- ``int`` in ``range(p)``
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """One of Z, Q or F_p.  Use the module constants ``ZZ``/``QQ`` or ``Fp(p)``."""

    kind: str  # "Z", "Q" or "Fp"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"F_p needs a prime modulus, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.kind} takes no modulus")

    # -- predicates ---------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    # -- arithmetic ---------------------------------------------------

    def coerce(self, x):
        """Bring an int / Fraction into this ring.

        Over F_p the value is reduced mod p; over Q exact Fractions pass
        through; over Z a non-integral Fraction is rejected.
        """
        if self.kind == "Fp":
            if isinstance(x, Fraction):
                num, den = x.numerator, x.denominator
                if den % self.p == 0:
                    raise ZeroDivisionError(f"denominator {den} not invertible mod {self.p}")
                return num * pow(den, -1, self.p) % self.p
            return x % self.p
        if self.kind == "Q":
            return x if isinstance(x, Fraction) else Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        c = a + b
        return c % self.p if self.kind == "Fp" else c

    def sub(self, a, b):
        c = a - b
        return c % self.p if self.kind == "Fp" else c

    def mul(self, a, b):
        c = a * b
        return c % self.p if self.kind == "Fp" else c

    def neg(self, a):
        return (-a) % self.p if self.kind == "Fp" else -a

    def inv(self, a):
        if self.kind == "Fp":
            return pow(a, -1, self.p)
        if self.kind == "Q":
            return 1 / Fraction(a)
        raise ArithmeticError("Z is not a field")

    def div(self, a, b):
        if self.kind == "Fp":
            return a * pow(b, -1, self.p) % self.p
        if self.kind == "Q":
            return Fraction(a) / Fraction(b)
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"{a} not divisible by {b} over Z")
        return q

    def is_zero(self, a) -> bool:
        return (a % self.p == 0) if self.kind == "Fp" else a == 0

    def __str__(self):
        return {"Z": "Z", "Q": "Q"}.get(self.kind, f"F{self.p}")

    @staticmethod
    def parse(text: str) -> "RingSpec":
        """Parse "Z", "Q", "F7" / "Fp(7)" style ring names."""
        t = text.strip()
        if t in ("Z", "ZZ"):
            return ZZ
        if t in ("Q", "QQ"):
            return QQ
        if t.startswith("Fp(") and t.endswith(")"):
            return Fp(int(t[3:-1]))
        if t.startswith("F"):
            return Fp(int(t[1:]))
        raise ValueError(f"cannot parse ring {text!r}")


ZZ = RingSpec("Z")
QQ = RingSpec("Q")


def Fp(p: int) -> RingSpec:
    return RingSpec("Fp", p)
