"""Polynomial growth vectors with exact rational coefficients.

Grammar (whitespace ignored, an optional leading sign is accepted)::

    expr  := term (("+" | "-") term)*
    term  := coeff? "n" ("^" nat)? | coeff
    coeff := int | int "/" int

A polynomial is a tuple of :class:`fractions.Fraction` coefficients indexed by
degree with trailing zeros removed; the zero polynomial is ``()``.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError


def poly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(Fraction(c) for c in coeffs)


def poly_from_dict(d):
    if not d:
        return ()
    top = max(d)
    return poly_trim(Fraction(d.get(k, 0)) for k in range(top + 1))


def poly_to_dict(p):
    return {k: c for k, c in enumerate(p) if c != 0}


def poly_add(a, b):
    m = max(len(a), len(b))
    return poly_trim((a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(m))


def poly_neg(a):
    return tuple(-c for c in a)


def poly_sub(a, b):
    return poly_add(a, poly_neg(b))


def poly_scale(a, c):
    return poly_trim(Fraction(c) * x for x in a)


def poly_degree(p):
    """Degree, with ``-1`` for the zero polynomial."""
    return len(p) - 1


def poly_coeff(p, k):
    return p[k] if 0 <= k < len(p) else Fraction(0)


def poly_eval(p, x):
    total = Fraction(0)
    for c in reversed(p):
        total = total * x + c
    return total


def poly_str(p):
    p = poly_trim(p)
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            var = "n" if k == 1 else f"n^{k}"
            body = var if mag == 1 else (f"{mag} {var}" if mag.denominator != 1 else f"{mag}{var}")
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def nat(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected a natural number", self.pos)
        return int(self.text[start:self.pos])

    def coeff(self):
        num = self.nat()
        if self.peek() == "/":
            self.pos += 1
            at = self.pos
            den = self.nat()
            if den == 0:
                raise ParseError("zero denominator", at)
            return Fraction(num, den)
        return Fraction(num)

    def term(self):
        ch = self.peek()
        if ch.isdigit():
            c = self.coeff()
            if self.peek() != "n":
                return {0: c}
        elif ch == "n":
            c = Fraction(1)
        else:
            raise ParseError(f"unexpected {ch!r}" if ch else "unexpected end of input", self.pos)
        self.pos += 1
        deg = 1
        if self.peek() == "^":
            self.pos += 1
            deg = self.nat()
        return {deg: c}

    def expr(self):
        total = {}
        sign = 1
        lead = self.peek()
        if lead and lead in "+-":
            sign = -1 if lead == "-" else 1
            self.pos += 1
        while True:
            for k, c in self.term().items():
                total[k] = total.get(k, 0) + sign * c
            ch = self.peek()
            if ch == "":
                break
            if ch not in "+-":
                raise ParseError(f"unexpected {ch!r}", self.pos)
            sign = -1 if ch == "-" else 1
            self.pos += 1
        return poly_from_dict(total)


def parse_polynomial(text):
    """Parse one coordinate expression into a polynomial."""
    if not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text).expr()


def split_sequence(text):
    """Split a comma-separated sequence, remembering each piece's offset."""
    pieces, start = [], 0
    for i, ch in enumerate(text + ","):
        if ch == ",":
            pieces.append((start, text[start:i]))
            start = i + 1
    return pieces


@dataclass(frozen=True)
class GrowthVector:
    """One polynomial per element of the ground set ``labels``."""

    coords: tuple
    labels: tuple = None

    def __post_init__(self):
        coords = tuple(poly_trim(p) for p in self.coords)
        labels = tuple(range(1, len(coords) + 1)) if self.labels is None else tuple(self.labels)
        if len(labels) != len(coords):
            raise ValueError("labels and coordinates must align")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return len(self.coords)

    def evaluate(self, j):
        return tuple(poly_eval(p, j) for p in self.coords)

    def restrict(self, labels):
        where = {lab: i for i, lab in enumerate(self.labels)}
        return GrowthVector(tuple(self.coords[where[lab]] for lab in labels), tuple(labels))

    def shifted(self, poly):
        return GrowthVector(tuple(poly_add(p, poly) for p in self.coords), self.labels)

    def scaled(self, c):
        return GrowthVector(tuple(poly_scale(p, c) for p in self.coords), self.labels)

    def __str__(self):
        return ", ".join(poly_str(p) for p in self.coords)


def parse_growth(text):
    """Parse a growth vector from a comma-separated string or a list of strings.

    Raises
    ------
    ParseError
        With the offset into the full comma-separated text.
    """
    if isinstance(text, str):
        pieces = split_sequence(text)
    else:
        pieces, offset = [], 0
        for t in text:
            pieces.append((offset, t))
            offset += len(t) + 1
    polys = []
    for offset, piece in pieces:
        try:
            polys.append(parse_polynomial(piece))
        except ParseError as exc:
            pos = offset + (exc.position or 0)
            raise ParseError(str(exc).rsplit(" at position", 1)[0], pos) from None
    return GrowthVector(tuple(polys))
