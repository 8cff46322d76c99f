"""Sparse multivariate Laurent polynomials with exact coefficients.

A polynomial lives over a declared tuple of variable names and stores a map
from exponent vectors to nonzero coefficients. Coefficients are Python ints
(or Fractions when a caller needs them); nothing here rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

Coeff = Union[int, Fraction]
Exps = Tuple[int, ...]


class LaurentPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str], terms: Mapping[Exps, Coeff] | None = None):
        self.vars: Tuple[str, ...] = tuple(vars)
        clean: Dict[Exps, Coeff] = {}
        if terms:
            n = len(self.vars)
            for e, c in terms.items():
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {self.vars}")
                if c:
                    clean[tuple(e)] = clean.get(tuple(e), 0) + c
                    if not clean[tuple(e)]:
                        del clean[tuple(e)]
        self.terms = clean

    # construction helpers -------------------------------------------------
    @classmethod
    def const(cls, c: Coeff, vars: Iterable[str] = ()) -> "LaurentPoly":
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def monomial(cls, vars: Iterable[str], coeff: Coeff = 1, **powers: int) -> "LaurentPoly":
        vars = tuple(vars)
        for name in powers:
            if name not in vars:
                raise KeyError(name)
        e = tuple(powers.get(v, 0) for v in vars)
        return cls(vars, {e: coeff})

    @classmethod
    def var(cls, name: str, vars: Iterable[str] | None = None) -> "LaurentPoly":
        vars = tuple(vars) if vars is not None else (name,)
        return cls.monomial(vars, 1, **{name: 1})

    # basic queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree_range(self, name: str) -> Tuple[int, int]:
        """Minimal and maximal exponent of one variable; (0, 0) for zero."""
        k = self.vars.index(name)
        if not self.terms:
            return (0, 0)
        ds = [e[k] for e in self.terms]
        return min(ds), max(ds)

    def span(self, name: str) -> int:
        lo, hi = self.degree_range(name)
        return hi - lo

    def coefficient(self, **powers: int) -> Coeff:
        e = tuple(powers.get(v, 0) for v in self.vars)
        return self.terms.get(e, 0)

    # variable bookkeeping --------------------------------------------------
    def with_vars(self, vars: Iterable[str]) -> "LaurentPoly":
        """Re-express over a superset (or reordering) of the variables."""
        vars = tuple(vars)
        idx = []
        for v in vars:
            idx.append(self.vars.index(v) if v in self.vars else None)
        for k, v in enumerate(self.vars):
            if v not in vars and any(e[k] for e in self.terms):
                raise ValueError(f"variable {v} is used and cannot be dropped")
        out = {}
        for e, c in self.terms.items():
            out[tuple(e[i] if i is not None else 0 for i in idx)] = c
        return LaurentPoly(vars, out)

    def _aligned(self, other: "LaurentPoly"):
        if self.vars == other.vars:
            return self, other
        merged = list(self.vars)
        for v in other.vars:
            if v not in merged:
                merged.append(v)
        return self.with_vars(merged), other.with_vars(merged)

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(other, self.vars)
        return NotImplemented

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._aligned(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(a.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._aligned(other)
        out: Dict[Exps, Coeff] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials can be inverted")
            (e, c), = self.terms.items()
            if c not in (1, -1):
                raise ValueError("coefficient is not a unit")
            return LaurentPoly(self.vars, {tuple(-x for x in e): c}) ** (-k)
        result = LaurentPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash(self.text())

    # substitution -----------------------------------------------------------
    def substitute(self, **images: "LaurentPoly") -> "LaurentPoly":
        """Replace variables by Laurent polynomials (negative powers need monomial images)."""
        keep = [v for v in self.vars if v not in images]
        out_vars = list(keep)
        for img in images.values():
            if isinstance(img, LaurentPoly):
                for v in img.vars:
                    if v not in out_vars:
                        out_vars.append(v)
        total = LaurentPoly(out_vars)
        cache: Dict[Tuple[str, int], LaurentPoly] = {}
        for e, c in self.terms.items():
            term = LaurentPoly.const(c, out_vars)
            mono = {}
            for v, k in zip(self.vars, e):
                if not k:
                    continue
                if v in images:
                    key = (v, k)
                    if key not in cache:
                        img = images[v]
                        if not isinstance(img, LaurentPoly):
                            img = LaurentPoly.const(img, out_vars)
                        cache[key] = img.with_vars(out_vars) ** k
                    term = term * cache[key]
                else:
                    mono[v] = k
            if mono:
                term = term * LaurentPoly.monomial(out_vars, 1, **mono)
            total = total + term
        return total

    # text form -------------------------------------------------------------
    def text(self) -> str:
        """Canonical text: terms in lexicographic exponent order."""
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            factors = []
            for v, k in zip(self.vars, e):
                if k == 1:
                    factors.append(v)
                elif k:
                    factors.append(f"{v}^{k}")
            mono = "*".join(factors)
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = text

    def __repr__(self):
        return f"LaurentPoly({self.vars!r}, {self.text()!r})"

    @classmethod
    def parse(cls, text: str, vars: Iterable[str]) -> "LaurentPoly":
        """Inverse of :meth:`text` for integer coefficients."""
        vars = tuple(vars)
        text = text.strip()
        if text == "0":
            return cls(vars)
        tokens = text.replace(" - ", " + -").split(" + ")
        out = cls(vars)
        for tok in tokens:
            tok = tok.strip()
            sign = 1
            if tok.startswith("-"):
                sign, tok = -1, tok[1:]
            coeff = 1
            powers: Dict[str, int] = {}
            for f in tok.split("*"):
                if f.lstrip("-").isdigit():
                    coeff = int(f)
                elif "^" in f:
                    v, k = f.split("^")
                    powers[v] = int(k)
                else:
                    powers[f] = 1
            out = out + cls.monomial(vars, sign * coeff, **powers)
        return out


def bracket_factor(vars: Iterable[str] = ("a",)) -> LaurentPoly:
    """The loop value -a^2 - a^-2."""
    vars = tuple(vars)
    return LaurentPoly.monomial(vars, -1, a=2) + LaurentPoly.monomial(vars, -1, a=-2)
