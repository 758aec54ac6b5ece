"""Candidate symbols F: R -> C.

Symbols are small immutable expression trees.  The parser folds polynomial
arithmetic into dense ``Poly`` nodes and merges constant multiples of
complex exponentials, so the trees it returns are the canonical forms that
:func:`to_text` prints back verbatim.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

MAX_DEGREE = 32


class SymbolError(ValueError):
    """Raised for malformed expressions or syntax errors."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


def _finite(z: complex, what: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SymbolError(f"non-finite {what}: {z!r}")
    return z


@dataclass(frozen=True)
class Const:
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", _finite(self.c, "constant"))


@dataclass(frozen=True)
class Poly:
    """Dense polynomial, coefficients in ascending degree."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(_finite(c, "coefficient") for c in self.coeffs)
        if not coeffs:
            raise SymbolError("polynomial needs at least one coefficient")
        if len(coeffs) - 1 > MAX_DEGREE:
            raise SymbolError(f"polynomial degree {len(coeffs) - 1} exceeds cap {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class CExp:
    """c * exp(i * alpha * x)."""

    c: complex
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "c", _finite(self.c, "constant"))
        alpha = float(self.alpha)
        if not math.isfinite(alpha):
            raise SymbolError(f"non-finite frequency: {alpha!r}")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class Conj:
    inner: "SymbolExpr"


@dataclass(frozen=True)
class Sum:
    left: "SymbolExpr"
    right: "SymbolExpr"


@dataclass(frozen=True)
class Prod:
    left: "SymbolExpr"
    right: "SymbolExpr"


@dataclass(frozen=True)
class Pow:
    inner: "SymbolExpr"
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise SymbolError(f"exponent must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class Affine:
    """x -> inner(alpha * x + beta)."""

    inner: "SymbolExpr"
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if isinstance(v, complex) or not math.isfinite(float(v)):
                raise SymbolError(f"affine {name} must be a finite real, got {v!r}")
            object.__setattr__(self, name, float(v))


SymbolExpr = Union[Const, Poly, CExp, Conj, Sum, Prod, Pow, Affine]

X = Poly((0j, 1 + 0j))


# --------------------------------------------------------------------------
# evaluation


def evaluate(expr: SymbolExpr, x):
    """Evaluate ``expr`` at real ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    out = _eval(expr, x)
    out = np.broadcast_to(np.asarray(out, dtype=complex), x.shape)
    if out.ndim == 0:
        return complex(out)
    return np.array(out)


def _eval(e: SymbolExpr, x: np.ndarray):
    if isinstance(e, Const):
        return np.full(x.shape, e.c, dtype=complex)
    if isinstance(e, Poly):
        acc = np.full(x.shape, e.coeffs[-1], dtype=complex)
        for c in reversed(e.coeffs[:-1]):
            acc = acc * x + c
        return acc
    if isinstance(e, CExp):
        return e.c * np.exp(1j * e.alpha * x)
    if isinstance(e, Conj):
        return np.conj(_eval(e.inner, x))
    if isinstance(e, Sum):
        return _eval(e.left, x) + _eval(e.right, x)
    if isinstance(e, Prod):
        return _eval(e.left, x) * _eval(e.right, x)
    if isinstance(e, Pow):
        base = _eval(e.inner, x)
        acc = np.ones(x.shape, dtype=complex)
        for _ in range(e.n):
            acc = acc * base
        return acc
    if isinstance(e, Affine):
        return _eval(e.inner, e.alpha * x + e.beta)
    raise TypeError(f"not a symbol expression: {e!r}")


# --------------------------------------------------------------------------
# structural helpers


def _poly_mul(a, b):
    out = [0j] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_add(a, b):
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0j) + (b[k] if k < len(b) else 0j) for k in range(n)]


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def as_poly(expr: SymbolExpr) -> list[complex] | None:
    """Ascending coefficients if ``expr`` is a polynomial in x, else None.

    Conjugation is allowed: x is real, so conj(p)(x) is the polynomial with
    conjugated coefficients.
    """
    if isinstance(expr, Const):
        return [expr.c]
    if isinstance(expr, Poly):
        return list(expr.coeffs)
    if isinstance(expr, CExp):
        return [expr.c] if expr.alpha == 0 else None
    if isinstance(expr, Conj):
        inner = as_poly(expr.inner)
        return None if inner is None else [c.conjugate() for c in inner]
    if isinstance(expr, (Sum, Prod)):
        a, b = as_poly(expr.left), as_poly(expr.right)
        if a is None or b is None:
            return None
        return _trim(_poly_add(a, b) if isinstance(expr, Sum) else _poly_mul(a, b))
    if isinstance(expr, Pow):
        inner = as_poly(expr.inner)
        if inner is None:
            return None
        acc = [1 + 0j]
        for _ in range(expr.n):
            acc = _poly_mul(acc, inner)
        return _trim(acc)
    if isinstance(expr, Affine):
        inner = as_poly(expr.inner)
        if inner is None:
            return None
        lin = [complex(expr.beta), complex(expr.alpha)]
        acc, power = [0j], [1 + 0j]
        for c in inner:
            acc = _poly_add(acc, [c * p for p in power])
            power = _poly_mul(power, lin)
        return _trim(acc)
    raise TypeError(f"not a symbol expression: {expr!r}")


def exponential_atoms(expr: SymbolExpr) -> list[tuple[complex, float]] | None:
    """Write ``expr`` as sum_j c_j exp(i a_j x) if possible.

    Returns the list of (c_j, a_j) merged by frequency and sorted by a_j, or
    None when ``expr`` involves a nonconstant polynomial.
    """
    atoms = _atoms(expr)
    if atoms is None:
        return None
    merged: dict[float, complex] = {}
    for c, a in atoms:
        merged[a] = merged.get(a, 0j) + c
    return sorted(((c, a) for a, c in merged.items()), key=lambda p: p[1])


def _atoms(e):
    if isinstance(e, Const):
        return [(e.c, 0.0)]
    if isinstance(e, CExp):
        return [(e.c, e.alpha)]
    if isinstance(e, Poly):
        return [(e.coeffs[0], 0.0)] if all(c == 0 for c in e.coeffs[1:]) else None
    if isinstance(e, Conj):
        inner = _atoms(e.inner)
        return None if inner is None else [(c.conjugate(), -a) for c, a in inner]
    if isinstance(e, Sum):
        a, b = _atoms(e.left), _atoms(e.right)
        return None if a is None or b is None else a + b
    if isinstance(e, Prod):
        a, b = _atoms(e.left), _atoms(e.right)
        if a is None or b is None:
            return None
        return [(ca * cb, fa + fb) for ca, fa in a for cb, fb in b]
    if isinstance(e, Pow):
        inner = _atoms(e.inner)
        if inner is None:
            return None
        acc = [(1 + 0j, 0.0)]
        for _ in range(e.n):
            acc = [(ca * cb, fa + fb) for ca, fa in acc for cb, fb in inner]
        return acc
    if isinstance(e, Affine):
        inner = _atoms(e.inner)
        if inner is None:
            return None
        return [(c * cmath.exp(1j * a * e.beta), a * e.alpha) for c, a in inner]
    raise TypeError(f"not a symbol expression: {e!r}")


def closure_variants(expr: SymbolExpr, n: int, c: complex, alpha: float, beta: float) -> list[SymbolExpr]:
    """Conjugate, n-th power, |F|^(2n), scalar multiple and affine change of ``expr``."""
    if n < 1:
        raise SymbolError(f"closure power must be >= 1, got {n}")
    return [
        Conj(expr),
        Pow(expr, n),
        Pow(Prod(expr, Conj(expr)), n),
        Prod(Const(c), expr),
        Affine(expr, alpha, beta),
    ]


# --------------------------------------------------------------------------
# smart constructors used by the parser (they define the canonical forms)


def _is_polylike(e) -> bool:
    return isinstance(e, (Const, Poly))


def _coeffs(e) -> list[complex]:
    return [e.c] if isinstance(e, Const) else list(e.coeffs)


def make_poly(coeffs) -> SymbolExpr:
    coeffs = _trim(coeffs)
    if len(coeffs) == 1:
        return Const(coeffs[0])
    return Poly(tuple(coeffs))


def add(a: SymbolExpr, b: SymbolExpr) -> SymbolExpr:
    if _is_polylike(a) and _is_polylike(b):
        return make_poly(_poly_add(_coeffs(a), _coeffs(b)))
    return Sum(a, b)


def mul(a: SymbolExpr, b: SymbolExpr) -> SymbolExpr:
    if _is_polylike(a) and _is_polylike(b):
        return make_poly(_poly_mul(_coeffs(a), _coeffs(b)))
    if isinstance(a, Const) and isinstance(b, CExp):
        return CExp(a.c * b.c, b.alpha)
    if isinstance(a, CExp) and isinstance(b, Const):
        return CExp(a.c * b.c, a.alpha)
    if isinstance(a, CExp) and isinstance(b, CExp):
        return CExp(a.c * b.c, a.alpha + b.alpha)
    return Prod(a, b)


def neg(a: SymbolExpr) -> SymbolExpr:
    return mul(Const(-1 + 0j), a)


def power(a: SymbolExpr, n: int) -> SymbolExpr:
    if _is_polylike(a):
        acc = [1 + 0j]
        for _ in range(n):
            acc = _poly_mul(acc, _coeffs(a))
            if len(_trim(acc)) - 1 > MAX_DEGREE:
                raise SymbolError(f"polynomial degree exceeds cap {MAX_DEGREE}")
        return make_poly(acc)
    return Pow(a, n)


def exp_of(arg: SymbolExpr, position: int | None = None) -> SymbolExpr:
    """exp(arg) for arg = a*x + b with a purely imaginary."""
    if not _is_polylike(arg):
        raise SymbolError("exp() argument must be linear in x", position)
    coeffs = _trim(_coeffs(arg))
    if len(coeffs) > 2:
        raise SymbolError("exp() argument must be linear in x", position)
    c = cmath.exp(coeffs[0])
    if len(coeffs) == 1:
        return Const(c)
    slope = coeffs[1]
    if slope.real != 0:
        raise SymbolError(f"exp() frequency must be real (got slope {slope!r} for x)", position)
    return CExp(c, slope.imag)


# --------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise SymbolError(message, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, token: str) -> bool:
        self.skip()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.accept(token):
            found = self.peek() or "end of input"
            self.error(f"expected {token!r}, found {found!r}")

    def parse(self) -> SymbolExpr:
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self):
        if self.accept("-"):
            e = neg(self.term())
        else:
            self.accept("+")
            e = self.term()
        while True:
            if self.accept("+"):
                e = add(e, self.term())
            elif self.accept("-"):
                e = add(e, neg(self.term()))
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            if self.accept("*"):
                e = mul(e, self.factor())
            elif self._starts_base():
                # implicit product, e.g. "2ix" or "3(x+1)"
                e = mul(e, self.factor())
            else:
                return e

    def _starts_base(self) -> bool:
        ch = self.peek()
        return bool(ch) and (ch.isdigit() or ch in "ix(.ecs")

    def factor(self):
        e = self.base()
        if self.accept("^"):
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.error("expected unsigned integer exponent")
            e = power(e, int(self.text[start:self.pos]))
        return e

    def base(self):
        ch = self.peek()
        start = self.pos
        if ch.isdigit() or ch == ".":
            return self.number()
        if self.accept("exp"):
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return exp_of(arg, start)
        for name in ("cos", "sin"):
            if self.accept(name):
                # sugar: cos(u) = (exp(iu) + exp(-iu))/2, sin(u) = (exp(iu) - exp(-iu))/(2i)
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                iu = mul(Const(1j), arg)
                plus, minus = exp_of(iu, start), exp_of(neg(iu), start)
                if name == "cos":
                    return mul(Const(0.5), add(plus, minus))
                return mul(Const(-0.5j), add(plus, neg(minus)))
        if self.accept("conj"):
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Conj(inner)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("i"):
            return Const(1j)
        if self.accept("x"):
            return X
        self.error(f"unexpected {ch or 'end of input'!r}")

    def number(self):
        text, start = self.text, self.pos
        i = start
        while i < len(text) and (text[i].isdigit() or text[i] == "."):
            i += 1
        if i < len(text) and text[i] in "eE" and not text.startswith("exp", i):
            j = i + 1
            if j < len(text) and text[j] in "+-":
                j += 1
            if j < len(text) and text[j].isdigit():
                i = j
                while i < len(text) and text[i].isdigit():
                    i += 1
        try:
            value = float(text[start:i])
        except ValueError:
            self.error(f"malformed number {text[start:i]!r}")
        self.pos = i
        if i < len(text) and text[i] == "i":
            self.pos += 1
            return Const(complex(0.0, value))
        return Const(complex(value, 0.0))


def parse_symbol(text: str) -> SymbolExpr:
    """Parse the infix symbol grammar (``x``, ``i``, ``exp``, ``conj``, ``^``; ``cos``/``sin`` as sugar)."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printing


def _num(z: complex) -> str:
    z = complex(z)
    re = z.real + 0.0  # print -0.0 as 0.0
    return f"({re!r}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag)!r}i)"


def to_text(expr: SymbolExpr) -> str:
    """Print ``expr`` in the parser grammar.

    For trees built by :func:`parse_symbol` the output parses back to an
    identical tree.  ``Affine`` nodes have no syntax of their own and are
    printed by substitution, so they round-trip by value only.
    """
    return _print(expr, "x")


def _print(e, var: str) -> str:
    if isinstance(e, Const):
        return _num(e.c)
    if isinstance(e, Poly):
        terms = []
        for k, c in enumerate(e.coeffs):
            if c == 0 and k > 0:
                continue
            if k == 0:
                terms.append(_num(c))
            elif k == 1:
                terms.append(f"{_num(c)}*{var}")
            else:
                terms.append(f"{_num(c)}*{var}^{k}")
        return "(" + " + ".join(terms) + ")"
    if isinstance(e, CExp):
        return f"({_num(e.c)}*exp({_num(complex(0.0, e.alpha))}*{var}))"
    if isinstance(e, Conj):
        return f"conj({_print(e.inner, var)})"
    if isinstance(e, Sum):
        return f"({_print(e.left, var)} + {_print(e.right, var)})"
    if isinstance(e, Prod):
        return f"({_print(e.left, var)}*{_print(e.right, var)})"
    if isinstance(e, Pow):
        return f"({_print(e.inner, var)})^{e.n}"
    if isinstance(e, Affine):
        return _print(e.inner, f"({e.alpha!r}*{var} + {e.beta!r})")
    raise TypeError(f"not a symbol expression: {e!r}")


# --------------------------------------------------------------------------
# JSON


def to_json(expr: SymbolExpr) -> dict:
    def cz(z):
        return [z.real, z.imag]

    if isinstance(expr, Const):
        return {"Const": cz(expr.c)}
    if isinstance(expr, Poly):
        return {"Poly": [cz(c) for c in expr.coeffs]}
    if isinstance(expr, CExp):
        return {"CExp": {"c": cz(expr.c), "alpha": expr.alpha}}
    if isinstance(expr, Conj):
        return {"Conj": to_json(expr.inner)}
    if isinstance(expr, (Sum, Prod)):
        return {type(expr).__name__: [to_json(expr.left), to_json(expr.right)]}
    if isinstance(expr, Pow):
        return {"Pow": {"inner": to_json(expr.inner), "n": expr.n}}
    if isinstance(expr, Affine):
        return {"Affine": {"inner": to_json(expr.inner), "alpha": expr.alpha, "beta": expr.beta}}
    raise TypeError(f"not a symbol expression: {expr!r}")


def conjugate_expr(expr: SymbolExpr) -> SymbolExpr:
    """Expression for conj(F) with no ``Conj`` nodes (x is real)."""
    if isinstance(expr, Const):
        return Const(expr.c.conjugate())
    if isinstance(expr, Poly):
        return Poly(tuple(c.conjugate() for c in expr.coeffs))
    if isinstance(expr, CExp):
        return CExp(expr.c.conjugate(), -expr.alpha)
    if isinstance(expr, Conj):
        return expr.inner
    if isinstance(expr, Sum):
        return Sum(conjugate_expr(expr.left), conjugate_expr(expr.right))
    if isinstance(expr, Prod):
        return Prod(conjugate_expr(expr.left), conjugate_expr(expr.right))
    if isinstance(expr, Pow):
        return Pow(conjugate_expr(expr.inner), expr.n)
    if isinstance(expr, Affine):
        return Affine(conjugate_expr(expr.inner), expr.alpha, expr.beta)
    raise TypeError(f"not a symbol expression: {expr!r}")
