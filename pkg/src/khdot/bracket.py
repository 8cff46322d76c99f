"""State-sum polynomials: Kauffman bracket, Jones normalisation, Bourgoin bracket.

Variables: ``a`` for the bracket, ``M`` for non-orienting circles, ``q`` and
``g``/``g_<source>`` for graded dimensions, ``t`` for height.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Dict, Optional, Sequence

from .diagram import Diagram, writhe
from .poly import LaurentPoly, bracket_factor
from .states import DEFAULT_LIMIT, CubeLimitError, trace_state

if TYPE_CHECKING:  # pragma: no cover
    from .complex import GradedComplex


def _check(d: Diagram, limit: int):
    if d.n > limit:
        raise CubeLimitError(f"{d.n} crossings exceed the cube limit {limit}")


def kauffman_bracket(d: Diagram, limit: int = DEFAULT_LIMIT) -> LaurentPoly:
    """Sum over states of a^(alpha-beta) (-a^2-a^-2)^(gamma-1)."""
    _check(d, limit)
    n = d.n
    loop = bracket_factor()
    by_exp: Dict[tuple, int] = {}
    for bits in range(1 << n):
        beta = bin(bits).count("1")
        gamma = len(trace_state(d, bits))
        key = (n - 2 * beta, gamma - 1)
        by_exp[key] = by_exp.get(key, 0) + 1
    total = LaurentPoly(("a",))
    for (ea, eg), mult in sorted(by_exp.items()):
        total = total + LaurentPoly.monomial(("a",), mult, a=ea) * loop ** eg
    return total


def jones_normalized(d: Diagram, limit: int = DEFAULT_LIMIT) -> LaurentPoly:
    """(-a)^(-3w) <D>."""
    w = writhe(d)
    sign = -1 if w % 2 else 1
    return LaurentPoly.monomial(("a",), sign, a=-3 * w) * kauffman_bracket(d, limit)


def bourgoin_bracket(d: Diagram, normalized: bool = False, limit: int = DEFAULT_LIMIT) -> LaurentPoly:
    """Sum over states of a^(alpha-beta) M^gamma'' (-a^2-a^-2)^gamma'.

    gamma' counts circles with an even number of bars, gamma'' the rest.
    With ``normalized`` one orienting circle per state is dropped, which is
    the convention of the Kauffman bracket; this is undefined (ValueError) when
    some state has only non-orienting circles.
    """
    _check(d, limit)
    vars = ("a", "M")
    n = d.n
    loop = bracket_factor(vars)
    M = LaurentPoly.var("M", vars)
    counts: Dict[tuple, int] = {}
    for bits in range(1 << n):
        beta = bin(bits).count("1")
        odd = even = 0
        for c in trace_state(d, bits):
            if dict(c.token_parity)["bars"]:
                odd += 1
            else:
                even += 1
        key = (n - 2 * beta, odd, even)
        counts[key] = counts.get(key, 0) + 1
    total = LaurentPoly(vars)
    for (ea, odd, even), mult in sorted(counts.items()):
        if normalized:
            if even == 0:
                raise ValueError("a state has no orienting circle; normalised value undefined")
            even -= 1
        total = total + LaurentPoly.monomial(vars, mult, a=ea) * M ** odd * loop ** even
    return total


def state_sum_euler(d: Diagram, sources: Sequence[str] = (), limit: int = DEFAULT_LIMIT) -> LaurentPoly:
    """Sum over states of (-q)^beta times a factor per circle.

    Undotted circles give q + q^-1; circles dotted by exactly the sources in
    ``sources`` contribute q g^-1 + q^-1 g for each such source's variable.
    This is the bracket-side value that the graded Euler characteristic of the
    raw complex must reproduce.
    """
    _check(d, limit)
    gvars = tuple(f"g_{s}" for s in sources)
    vars = ("q",) + gvars
    total = LaurentPoly(vars)
    for bits in range(1 << d.n):
        beta = bin(bits).count("1")
        term = LaurentPoly.monomial(vars, (-1) ** beta, q=beta)
        for c in trace_state(d, bits):
            par = dict(c.token_parity)
            # a circle dotted by several sources: (q g1^-1 g2^-1 ...) + (q^-1 g1 g2 ...)
            dotted = [f"g_{s}" for s in sources if par.get(s)]
            up = LaurentPoly.monomial(vars, 1, q=1, **{g: -1 for g in dotted})
            down = LaurentPoly.monomial(vars, 1, q=-1, **{g: 1 for g in dotted})
            term = term * (up + down)
        total = total + term
    return total


def bracket_to_q(d: Diagram, bracket: LaurentPoly, M_image: Optional[LaurentPoly] = None) -> LaurentPoly:
    """Rewrite a bracket value in q: multiply by a^-n and the loop factor, set a^-2 = -q.

    ``bracket`` is a Kauffman bracket (variable a) or a raw Bourgoin bracket
    (variables a, M); in the latter case ``M_image`` replaces M first and no
    loop factor is added, since the raw Bourgoin sum already carries it.
    """
    n = d.n
    if "M" in bracket.vars:
        if M_image is None:
            raise ValueError("M needs an image")
        poly = bracket.substitute(M=M_image)
    else:
        poly = bracket * bracket_factor(bracket.vars)
    poly = poly * LaurentPoly.monomial(poly.vars, 1, a=-n)
    # every exponent of a is even here: a^(2k) = (a^-2)^(-k) = (-q)^(-k)
    out_vars = tuple(v for v in poly.vars if v != "a") or ()
    out_vars = ("q",) + tuple(v for v in out_vars if v != "q")
    result = LaurentPoly(out_vars)
    ka = poly.vars.index("a")
    for e, c in poly.terms.items():
        ea = e[ka]
        if ea % 2:
            raise ValueError("odd power of a cannot be rewritten in q")
        k = -ea // 2
        rest = {v: x for v, x in zip(poly.vars, e) if v != "a" and x}
        qpow = rest.pop("q", 0) + k
        result = result + LaurentPoly.monomial(out_vars, c * (-1) ** (k % 2), q=qpow, **rest)
    return result


def graded_euler_characteristic(c: "GradedComplex", sources: Sequence[str] | None = None) -> LaurentPoly:
    """Alternating sum over heights of graded dimensions of the chain groups.

    Gradings are the raw ones (height beta, quantum #1 - #X + beta) unless the
    complex was built with the standard normalisation, in which case the shifts
    are included.  Dotted gradings enter as g_<source> variables.
    """
    return c.euler_characteristic(sources)


def expected_euler(c: "GradedComplex", limit: int = DEFAULT_LIMIT) -> LaurentPoly:
    """The state sum moved through the complex's normalisation shift.

    A height shift k and quantum shift l turn the raw sum into (-1)^k q^l times it.
    """
    k, l = c.shift
    base = state_sum_euler(c.diagram, c.sources, limit)
    return base * LaurentPoly.monomial(("q",), -1 if k % 2 else 1, q=l)
