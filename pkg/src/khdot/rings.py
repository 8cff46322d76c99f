"""Coefficient rings for chain complexes.

Scalars are plain ints (Z, Z/m) or Fractions (Q).  Polynomial rings keep
elements as dicts ``{exponent tuple: coefficient}`` over a base Z or Z/2.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple


class Ring:
    name = "?"
    is_field = False
    characteristic = 0
    is_polynomial = False
    variables: Tuple[str, ...] = ()

    def zero(self):
        return 0

    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def fmt(self, a) -> str:
        return str(a)

    def terms(self, a):
        """Split an element into (monomial exponents, scalar) pairs."""
        return [((), a)] if not self.is_zero(a) else []

    def __repr__(self):
        return f"<ring {self.name}>"


class IntegerRing(Ring):
    name = "Z"

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a == 0


class ModRing(Ring):
    def __init__(self, m: int):
        self.m = m
        self.name = f"Z{m}"
        self.characteristic = m
        self.is_field = m == 2

    def from_int(self, n):
        return int(n) % self.m

    def add(self, a, b):
        return (a + b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def is_zero(self, a):
        return a % self.m == 0


class RationalRing(Ring):
    name = "Q"
    is_field = True

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a == 0

    def fmt(self, a):
        return str(Fraction(a))


class PolynomialRing(Ring):
    """Polynomials in named variables over Z (modulus 0) or Z/m."""

    is_polynomial = True

    def __init__(self, name: str, variables: Tuple[str, ...], modulus: int = 0):
        self.name = name
        self.variables = tuple(variables)
        self.modulus = modulus
        self.characteristic = modulus

    def _norm(self, d: Dict[tuple, int]) -> Dict[tuple, int]:
        if self.modulus:
            return {e: c % self.modulus for e, c in d.items() if c % self.modulus}
        return {e: c for e, c in d.items() if c}

    def zero(self):
        return {}

    def from_int(self, n):
        return self._norm({(0,) * len(self.variables): n})

    def gen(self, name: str, power: int = 1):
        e = tuple(power if v == name else 0 for v in self.variables)
        return self._norm({e: 1})

    def add(self, a, b):
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) + c
        return self._norm(out)

    def mul(self, a, b):
        out: Dict[tuple, int] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return self._norm(out)

    def neg(self, a):
        return self._norm({e: -c for e, c in a.items()})

    def is_zero(self, a):
        return not a

    def terms(self, a):
        return sorted(a.items())

    def fmt(self, a):
        if not a:
            return "0"
        parts = []
        for e, c in sorted(a.items()):
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(parts)


Z = IntegerRing()
Q = RationalRing()
Z2 = ModRing(2)
Z4 = ModRing(4)
ZHT = PolynomialRing("Z[h,t]", ("h", "t"))
Z2TC = PolynomialRing("Z2[t,c]", ("t", "c"), modulus=2)

RINGS = {
    "Z": Z,
    "Q": Q,
    "Z2": Z2,
    "Z4": Z4,
    "Z[h,t]": ZHT,
    "Z2[t,c]": Z2TC,
    "Q(t=h=1)": Q,
}


def get_ring(name: str) -> Ring:
    try:
        return RINGS[name]
    except KeyError:
        raise ValueError(f"unknown ring {name!r}; choose from {sorted(RINGS)}") from None
