"""Truncated Laurent series with exact rational coefficients.

A series ``z^low (a_0 + a_1 z + ...) + O(z^prec)`` stores the coefficients of
orders ``low .. prec - 1``; ``prec=None`` marks an exact Laurent polynomial.
Every operation computes the order up to which its result is guaranteed and
never reports coefficients beyond it.  Inverting an exact series with more
than one term produces an infinite expansion, which is cut after ``terms``
coefficients (relative precision).
"""

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import DivisionByZeroSeries, InputError, WindowExhausted

DEFAULT_TERMS = 16
ZERO = mpq(0)


def rational(c):
    """Coefficient in the fast exact rational type (``gmpy2.mpq``)."""
    if isinstance(c, type(ZERO)):
        return c
    if isinstance(c, str):
        return mpq(Fraction(c))
    return mpq(c)


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_prec(p, shift):
    return None if p is None else p + shift


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    low: int
    coeffs: tuple
    prec: object = None

    def __post_init__(self):
        coeffs = [rational(c) for c in self.coeffs]
        low = int(self.low)
        if self.prec is not None:
            coeffs = coeffs[:max(0, self.prec - low)]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        coeffs = coeffs[start:]
        low += start
        if self.prec is None:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        if not coeffs:
            low = 0 if self.prec is None else self.prec
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    # construction helpers

    @classmethod
    def zero(cls, prec=None):
        return cls(0 if prec is None else prec, (), prec)

    @classmethod
    def const(cls, c):
        return cls(0, (rational(c),))

    @classmethod
    def monomial(cls, c, k):
        return cls(k, (rational(c),))

    @property
    def is_exact(self):
        return self.prec is None

    def is_zero(self):
        """True for the exact zero series."""
        return self.prec is None and not self.coeffs

    def has_value(self):
        """True when the leading term is known."""
        return bool(self.coeffs)

    def valuation(self):
        if not self.coeffs:
            if self.prec is None:
                raise DivisionByZeroSeries("the zero series has no valuation")
            raise WindowExhausted(f"no nonzero coefficient below order {self.prec}")
        return self.low

    def valuation_bound(self):
        """Valuation if known, otherwise the order below which it is known to be zero."""
        if self.coeffs:
            return self.low
        return float("inf") if self.prec is None else self.prec

    def lead(self):
        self.valuation()
        return self.coeffs[0]

    def coeff(self, k):
        if self.prec is not None and k >= self.prec:
            raise WindowExhausted(f"coefficient of order {k} lies outside the window")
        i = k - self.low
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else ZERO

    def truncate(self, prec):
        return LaurentSeries(self.low, self.coeffs, _min_prec(self.prec, prec))

    # arithmetic

    def __neg__(self):
        return LaurentSeries(self.low, tuple(-c for c in self.coeffs), self.prec)

    def __add__(self, other):
        other = _coerce(other)
        prec = _min_prec(self.prec, other.prec)
        if not self.coeffs:
            return other.truncate(prec)
        if not other.coeffs:
            return self.truncate(prec)
        low = min(self.low, other.low)
        high = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        if prec is not None:
            high = min(high, prec)
        out = [ZERO] * max(0, high - low)
        for src in (self, other):
            for i, c in enumerate(src.coeffs):
                k = src.low + i - low
                if k < len(out):
                    out[k] += c
        return LaurentSeries(low, tuple(out), prec)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero()
        va, vb = self.valuation_bound(), other.valuation_bound()
        prec = _min_prec(_add_prec(self.prec, vb) if vb != float("inf") else None,
                         _add_prec(other.prec, va) if va != float("inf") else None)
        if not self.coeffs or not other.coeffs:
            return LaurentSeries.zero(prec)
        low = self.low + other.low
        length = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            length = min(length, prec - low)
        if length <= 0:
            return LaurentSeries.zero(prec)
        a, b = self.coeffs, other.coeffs
        la, lb = len(a), len(b)
        out = [sum((a[i] * b[k - i] for i in range(max(0, k - lb + 1), min(k, la - 1) + 1)), ZERO)
               for k in range(length)]
        return LaurentSeries(low, tuple(out), prec)

    __rmul__ = __mul__

    def scale(self, c):
        c = rational(c)
        if c == 0:
            return LaurentSeries.zero() if self.prec is None else LaurentSeries.zero(self.prec)
        return LaurentSeries(self.low, tuple(c * x for x in self.coeffs), self.prec)

    def shift(self, k):
        """Multiply by ``z^k``."""
        return LaurentSeries(self.low + k, self.coeffs, _add_prec(self.prec, k))

    def inverse(self, terms=DEFAULT_TERMS):
        """Multiplicative inverse.

        Raises DivisionByZeroSeries for the exact zero series and
        WindowExhausted when the leading coefficient is not known.
        """
        if self.is_zero():
            raise DivisionByZeroSeries("division by the zero series")
        v = self.valuation()
        if self.prec is None:
            rel = 1 if len(self.coeffs) == 1 else terms
        else:
            rel = self.prec - v
        a = self.coeffs
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, rel):
            total = ZERO
            for i in range(1, min(k, len(a) - 1) + 1):
                total += a[i] * out[k - i]
            out.append(-total * inv0)
        prec = None if (self.prec is None and len(a) == 1) else -v + rel
        return LaurentSeries(-v, tuple(out), prec)

    def __truediv__(self, other):
        other = _coerce(other)
        return self * other.inverse()

    def __pow__(self, k, terms=DEFAULT_TERMS):
        if k < 0:
            return self.inverse(terms) ** (-k)
        result = LaurentSeries.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sqrt_unit(self, terms=DEFAULT_TERMS):
        """Square root of a power series with constant term 1 (constant term 1)."""
        if self.valuation() != 0 or self.coeffs[0] != 1:
            raise ValueError("sqrt_unit needs a power series with constant term 1")
        rel = terms if self.prec is None else self.prec
        a = self.coeffs
        out = [mpq(1)]
        for k in range(1, rel):
            total = a[k] if k < len(a) else ZERO
            for i in range(1, k):
                total -= out[i] * out[k - i]
            out.append(total / 2)
        prec = self.prec
        if prec is None and len(a) > 1:
            prec = rel
        return LaurentSeries(0, tuple(out), prec)

    def compose(self, inner, terms=DEFAULT_TERMS):
        """Substitute ``z = inner(w)`` where ``inner`` has valuation exactly 1."""
        if inner.valuation() != 1:
            raise ValueError("compose needs an inner series of valuation 1")
        if self.is_zero():
            return self
        result = LaurentSeries.zero(None)
        hi = self.low + len(self.coeffs)
        power = inner ** self.low if self.low >= 0 else inner.inverse(terms) ** (-self.low)
        for k in range(self.low, hi):
            c = self.coeffs[k - self.low]
            if c != 0:
                result = result + power.scale(c)
            if k + 1 < hi:
                power = power * inner
        if self.prec is not None:
            result = result.truncate(self.prec)
        return result

    def __eq__(self, other):
        other = _coerce(other)
        return (self.low, self.coeffs, self.prec) == (other.low, other.coeffs, other.prec)

    def __hash__(self):
        return hash((self.low, self.coeffs, self.prec))

    def agrees_with(self, other):
        """True iff both series coincide on their common window."""
        diff = self - _coerce(other)
        return not diff.coeffs

    def __repr__(self):
        terms = " + ".join(f"{c}*z^{self.low + i}" for i, c in enumerate(self.coeffs) if c != 0) or "0"
        tail = "" if self.prec is None else f" + O(z^{self.prec})"
        return f"LaurentSeries({terms}{tail})"

    def to_json(self):
        out = {"low": self.low, "coeffs": [_rat_str(c) for c in self.coeffs]}
        if self.prec is not None:
            out["prec"] = self.prec
        return out


def _rat_str(c):
    c = Fraction(int(c.numerator), int(c.denominator))
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _coerce(x):
    if isinstance(x, LaurentSeries):
        return x
    return LaurentSeries.const(x)


def series_from_json(obj):
    """Series from ``{"low": int, "coeffs": ["p/q", ...], "prec": int?}``; only Laurent data is accepted."""
    try:
        coeffs = tuple(rational(str(c)) for c in obj["coeffs"])
        prec = obj.get("prec")
        return LaurentSeries(int(obj["low"]), coeffs, None if prec is None else int(prec))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a Laurent series: {obj!r}") from exc
