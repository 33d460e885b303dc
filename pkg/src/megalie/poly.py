"""Exact multivariate polynomials over the rationals.

Terms are stored sparsely as {exponent tuple: coefficient} over a fixed,
ordered variable list.  Printing uses the graded lexicographic order and
produces strings that re-parse to the same polynomial.

Grammar accepted by parse():

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := rational | var | var '^' uint | '(' expr ')'

with variable names matching [A-Za-z_][A-Za-z0-9_]* and rationals being
digits ['/' digits].
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .linalg import format_rat


class PolyError(ValueError):
    """Syntax or variable error while parsing; carries the position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


Exponents = tuple[int, ...]


def _monomial_sort_key(exps: Exponents) -> tuple:
    # graded lex, descending: higher total degree first, then lexicographic
    return (-sum(exps), tuple(-e for e in exps))


class Poly:
    """Immutable sparse polynomial over a fixed variable tuple."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponents, Fraction] | None = None):
        object.__setattr__(self, "variables", tuple(variables))
        clean: dict[Exponents, Fraction] = {}
        if terms:
            width = len(self.variables)
            for exps, coeff in terms.items():
                if len(exps) != width:
                    raise ValueError("exponent tuple width does not match variables")
                coeff = Fraction(coeff)
                if coeff != 0:
                    clean[tuple(exps)] = coeff
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(variables: Sequence[str]) -> "Poly":
        return Poly(variables)

    @staticmethod
    def const(variables: Sequence[str], value) -> "Poly":
        value = Fraction(value)
        if value == 0:
            return Poly(variables)
        return Poly(variables, {(0,) * len(tuple(variables)): value})

    @staticmethod
    def var(variables: Sequence[str], name: str) -> "Poly":
        variables = tuple(variables)
        try:
            idx = variables.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None
        exps = tuple(1 if i == idx else 0 for i in range(len(variables)))
        return Poly(variables, {exps: Fraction(1)})

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        idx = self.variables.index(name)
        return max((e[idx] for e in self.terms), default=0)

    def mentions(self, name: str) -> bool:
        idx = self.variables.index(name)
        return any(e[idx] > 0 for e in self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.variables == other.variables
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self.to_str()!r})"

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.variables != other.variables:
            raise ValueError("polynomials over different variable lists")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return Poly(self.variables, out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return Poly(self.variables, out)

    def scaled(self, q) -> "Poly":
        q = Fraction(q)
        return Poly(self.variables, {e: q * c for e, c in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.variables, 1)
        for _ in range(k):
            result = result * self
        return result

    # -- calculus ----------------------------------------------------------

    def derivative(self, name: str) -> "Poly":
        idx = self.variables.index(name)
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            e = exps[idx]
            if e == 0:
                continue
            key = tuple(x - 1 if i == idx else x for i, x in enumerate(exps))
            out[key] = out.get(key, Fraction(0)) + coeff * e
        return Poly(self.variables, out)

    def substitute(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        """Composite polynomial; unmapped variables stay themselves.

        All images must share one variable tuple, which becomes the
        variable tuple of the result.
        """
        target = None
        for image in mapping.values():
            if target is None:
                target = image.variables
            elif image.variables != target:
                raise ValueError("substitution images over different variable lists")
        if target is None:
            target = self.variables
        images = []
        for name in self.variables:
            if name in mapping:
                images.append(mapping[name])
            else:
                images.append(Poly.var(target, name))
        result = Poly.zero(target)
        for exps, coeff in self.terms.items():
            term = Poly.const(target, coeff)
            for image, e in zip(images, exps):
                if e:
                    term = term * image**e
            result = result + term
        return result

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            prod = coeff
            for name, e in zip(self.variables, exps):
                if e:
                    prod *= Fraction(values[name]) ** e
            total += prod
        return total

    def lift(self, variables: Sequence[str]) -> "Poly":
        """Same polynomial over a superset variable tuple."""
        variables = tuple(variables)
        positions = []
        for name in self.variables:
            try:
                positions.append(variables.index(name))
            except ValueError:
                raise ValueError(f"target variables are missing {name!r}") from None
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            key = [0] * len(variables)
            for pos, e in zip(positions, exps):
                key[pos] = e
            out[tuple(key)] = coeff
        return Poly(variables, out)

    # -- structure ---------------------------------------------------------

    def leading_term(self) -> tuple[Exponents, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = min(self.terms, key=_monomial_sort_key)
        return exps, self.terms[exps]

    def linear_decompose(self, name: str) -> tuple["Poly", "Poly"] | None:
        """Write self = coeff * name + rest when degree in name is 1.

        Returns (coeff, rest), both free of the variable, or None.
        """
        idx = self.variables.index(name)
        coeff: dict[Exponents, Fraction] = {}
        rest: dict[Exponents, Fraction] = {}
        saw_linear = False
        for exps, c in self.terms.items():
            e = exps[idx]
            if e == 0:
                rest[exps] = c
            elif e == 1:
                saw_linear = True
                key = tuple(0 if i == idx else x for i, x in enumerate(exps))
                coeff[key] = c
            else:
                return None
        if not saw_linear:
            return None
        return Poly(self.variables, coeff), Poly(self.variables, rest)

    def exact_div(self, divisor: "Poly") -> "Poly | None":
        """Quotient self / divisor when the division is exact, else None."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if divisor.is_constant():
            return self.scaled(Fraction(1) / divisor.constant_value())
        remainder = self
        quotient = Poly.zero(self.variables)
        lead_exps, lead_coeff = divisor.leading_term()
        while not remainder.is_zero():
            r_exps, r_coeff = remainder.leading_term()
            diff = tuple(a - b for a, b in zip(r_exps, lead_exps))
            if any(d < 0 for d in diff):
                return None
            factor = Poly(self.variables, {diff: r_coeff / lead_coeff})
            quotient = quotient + factor
            remainder = remainder - factor * divisor
        return quotient

    def content_normalized(self) -> "Poly":
        """Scale so coefficients are coprime integers, leading one positive."""
        if self.is_zero():
            return self
        nums = [abs(c.numerator) for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = 0
        for v in nums:
            g = gcd(g, v)
        l = 1
        for v in dens:
            l = l * v // gcd(l, v)
        scale = Fraction(l, g)
        scaled = self.scaled(scale)
        _, lead = scaled.leading_term()
        if lead < 0:
            scaled = -scaled
        return scaled

    def monomial_variables(self) -> list[str] | None:
        """If self is a single term, the variables appearing in it; else None."""
        if len(self.terms) != 1:
            return None
        (exps,) = self.terms
        return [name for name, e in zip(self.variables, exps) if e > 0]

    # -- printing -----------------------------------------------------------

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, key=_monomial_sort_key):
            coeff = self.terms[exps]
            factors = []
            for name, e in zip(self.variables, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(coeff)
            if factors and mag == 1:
                body = "*".join(factors)
            elif factors:
                body = "*".join([format_rat(mag)] + factors)
            else:
                body = format_rat(mag)
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = f"-{first_body}" if first_sign == "-" else first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self) -> str:
        return self.to_str()


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<rational>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise PolyError(f"unexpected character {stripped[0]!r}", at)
        for kind in ("rational", "name", "op"):
            value = m.group(kind)
            if value is not None:
                tokens.append((kind, value, m.start(kind)))
                break
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.tokens = _tokenize(text)
        self.variables = tuple(variables)
        self.index = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect_op(self, symbol: str) -> None:
        kind, value, pos = self.peek()
        if kind != "op" or value != symbol:
            raise PolyError(f"expected {symbol!r}", pos)
        self.advance()

    def parse_expr(self) -> Poly:
        negative = False
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            negative = True
        result = self.parse_term()
        if negative:
            result = -result
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                term = self.parse_term()
                result = result + term if value == "+" else result - term
            else:
                return result

    def parse_term(self) -> Poly:
        result = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                result = result * self.parse_factor()
            else:
                return result

    def parse_factor(self) -> Poly:
        kind, value, pos = self.advance()
        if kind == "rational":
            num, _, den = value.partition("/")
            if den and int(den) == 0:
                raise PolyError("zero denominator", pos)
            q = Fraction(int(num), int(den)) if den else Fraction(int(num))
            return Poly.const(self.variables, q)
        if kind == "name":
            if value not in self.variables:
                raise PolyError(f"unknown variable {value!r}", pos)
            base = Poly.var(self.variables, value)
            kind2, value2, _ = self.peek()
            if kind2 == "op" and value2 == "^":
                self.advance()
                kind3, value3, pos3 = self.advance()
                if kind3 != "rational" or "/" in value3:
                    raise PolyError("exponent must be an unsigned integer", pos3)
                return base ** int(value3)
            return base
        if kind == "op" and value == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise PolyError("expected a rational, variable, or '('", pos)


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse the polynomial grammar over the given variable list."""
    parser = _Parser(text, variables)
    result = parser.parse_expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise PolyError(f"trailing input {value!r}", pos)
    return result


def differentiate(p: Poly, variable: str) -> Poly:
    """Formal partial derivative."""
    return p.derivative(variable)
