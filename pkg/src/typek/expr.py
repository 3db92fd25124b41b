"""Parser and canonical printer for lattice expressions such as ``U(2)+D4(-2)``.

Grammar (whitespace-insensitive)::

    Expr := Term ("+" Term)*
    Term := Base ["(" SignedInt ")"]
    Base := "U" | "A"Int | "D"Int | "E6" | "E7" | "E8" | "K3" | "<"Rational">"
          | "[[" Int ("," Int)* "]" ("," "[" ... "]")* "]"

The bracketed Gram literal covers lattices with no short name, e.g.
``[[2,1],[1,-2]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import (
    Lattice,
    LatticeError,
    diagonal,
    direct_sum,
    hyperbolic,
    k3_lattice,
    rescale,
    root_lattice,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Term:
    kind: str  # U, A, D, E, K3, diag, gram
    arg: object = None  # rank for A/D/E, Fraction for diag, Gram tuple for gram
    scale: int = 1

    def base_text(self) -> str:
        if self.kind in ("U", "K3"):
            return self.kind
        if self.kind in ("A", "D", "E"):
            return f"{self.kind}{self.arg}"
        if self.kind == "diag":
            return f"<{self.arg}>"
        rows = ",".join("[" + ",".join(str(x) for x in row) + "]" for row in self.arg)
        return f"[{rows}]"

    def text(self) -> str:
        base = self.base_text()
        return base if self.scale == 1 else f"{base}({self.scale})"

    def base_lattice(self) -> Lattice:
        if self.kind == "U":
            return hyperbolic()
        if self.kind == "K3":
            return k3_lattice()
        if self.kind in ("A", "D", "E"):
            return root_lattice(self.kind, self.arg)
        if self.kind == "diag":
            value = Fraction(self.arg)
            if value.denominator != 1 or value == 0:
                raise LatticeError(f"<{value}> is not a nonzero integral rank-one lattice")
            return diagonal(int(value))
        return Lattice(self.arg)

    def lattice(self) -> Lattice:
        base = self.base_lattice()
        return base if self.scale == 1 else rescale(base, self.scale)


@dataclass(frozen=True)
class Expression:
    terms: tuple[Term, ...]

    def text(self) -> str:
        return "+".join(t.text() for t in self.terms)

    __str__ = text

    def lattice(self) -> Lattice:
        return direct_sum(*(t.lattice() for t in self.terms))

    def rescaled(self, k: int) -> "Expression":
        terms = []
        for t in self.terms:
            if t.kind == "diag":
                terms.append(Term("diag", Fraction(t.arg) * t.scale * k))
            else:
                terms.append(Term(t.kind, t.arg, t.scale * k))
        return Expression(tuple(terms))

    def has_scaled_hyperbolic(self) -> bool:
        return any(t.kind == "U" for t in self.terms)


class _Parser:
    def __init__(self, text: str):
        # keep original positions for error messages
        self.chars = [(i, c) for i, c in enumerate(text) if not c.isspace()]
        self.pos = 0
        self.end = len(text)

    def peek(self) -> str:
        return self.chars[self.pos][1] if self.pos < len(self.chars) else ""

    def where(self) -> int:
        return self.chars[self.pos][0] if self.pos < len(self.chars) else self.end

    def expect(self, c: str):
        if self.peek() != c:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {c!r}, found {found!r}", self.where())
        self.pos += 1

    def integer(self, signed: bool = False) -> int:
        start = self.where()
        sign = 1
        if signed and self.peek() in "+-" and self.peek():
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        digits = ""
        while self.peek().isdigit():
            digits += self.peek()
            self.pos += 1
        if not digits:
            raise ParseError("expected an integer", start)
        return sign * int(digits)

    def expression(self) -> Expression:
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        if self.pos != len(self.chars):
            raise ParseError(f"unexpected {self.peek()!r}", self.where())
        return Expression(tuple(terms))

    def term(self) -> Term:
        start = self.where()
        c = self.peek()
        if c == "U":
            self.pos += 1
            term = Term("U")
        elif c == "K":
            self.pos += 1
            if self.integer() != 3:
                raise ParseError("unknown base symbol, expected K3", start)
            term = Term("K3")
        elif c in ("A", "D", "E"):
            self.pos += 1
            n = self.integer()
            if c == "A" and n < 1:
                raise ParseError("A_m requires m >= 1", start)
            if c == "D" and n < 4:
                raise ParseError("D_n requires n >= 4", start)
            if c == "E" and n not in (6, 7, 8):
                raise ParseError("E_n requires n in {6, 7, 8}", start)
            term = Term(c, n)
        elif c == "<":
            self.pos += 1
            num = self.integer(signed=True)
            den = 1
            if self.peek() == "/":
                self.pos += 1
                den = self.integer()
                if den == 0:
                    raise ParseError("zero denominator", start)
            self.expect(">")
            value = Fraction(num, den)
            if value.denominator != 1 or value == 0:
                raise ParseError("rank-one entry must be a nonzero integer", start)
            term = Term("diag", value)
        elif c == "[":
            term = Term("gram", self.gram_literal(start))
        else:
            raise ParseError(f"unknown base symbol {c or 'end of input'!r}", start)
        if self.peek() == "(":
            self.pos += 1
            at = self.where()
            scale = self.integer(signed=True)
            if scale == 0:
                raise ParseError("scale must be nonzero", at)
            self.expect(")")
            term = Term(term.kind, term.arg, scale)
        return term

    def gram_literal(self, start: int):
        self.expect("[")
        rows = []
        while True:
            self.expect("[")
            row = [self.integer(signed=True)]
            while self.peek() == ",":
                self.pos += 1
                row.append(self.integer(signed=True))
            self.expect("]")
            rows.append(tuple(row))
            if self.peek() != ",":
                break
            self.pos += 1
        self.expect("]")
        n = len(rows)
        if any(len(r) != n for r in rows) or any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise ParseError("Gram literal must be square and symmetric", start)
        return tuple(rows)


def parse(text: str) -> Expression:
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text).expression()


def parse_lattice(text: str) -> Lattice:
    return parse(text).lattice()


def canonical(text: str) -> str:
    return parse(text).text()
