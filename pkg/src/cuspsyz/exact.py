"""Exact scalars, quadratic surds and linear algebra over Q and F_p.

Scalars are plain Python values: ``fractions.Fraction`` for Q and ``int``
residues in ``[0, p)`` for F_p. A :class:`Field` object carries the
arithmetic that differs between the two (normalisation, inversion,
validation), so the elimination code can use ordinary operators.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import MalformedInputError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """Base field: rational numbers (``p is None``) or a prime field."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            p = int(p)
            if not is_prime(p):
                raise MalformedInputError(f"{p} is not prime")
        self.p = p

    # identity ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    # elements ----------------------------------------------------------
    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __call__(self, x):
        """Coerce an int, Fraction or numeric string into the field."""
        if self.p is None:
            if isinstance(x, bool):
                raise MalformedInputError(f"cannot coerce {x!r} into QQ")
            if isinstance(x, (int, Rational, str)):
                return Fraction(x)
            raise MalformedInputError(f"cannot coerce {x!r} into QQ")
        if isinstance(x, bool):
            raise MalformedInputError(f"cannot coerce {x!r} into GF({self.p})")
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Rational):
            if x.denominator % self.p == 0:
                raise MalformedInputError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        raise MalformedInputError(f"cannot coerce {x!r} into GF({self.p})")

    def contains(self, x) -> bool:
        if isinstance(x, bool):
            return False
        if self.p is None:
            return isinstance(x, Fraction)
        return type(x) is int and 0 <= x < self.p

    def norm(self, x):
        return x if self.p is None else x % self.p

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x if self.p is None else pow(x, -1, self.p)

    def random_element(self, rng, nonzero: bool = False, height: int = 20):
        if self.p is None:
            while True:
                x = Fraction(rng.randint(-height, height), rng.randint(1, height))
                if x or not nonzero:
                    return x
        lo = 1 if nonzero else 0
        return rng.randint(lo, self.p - 1)

    def sqrt(self, x):
        """A square root of ``x`` in the field, or ``None``."""
        if not x:
            return self.zero
        if self.p is None:
            n, d = x.numerator, x.denominator
            if n < 0:
                return None
            rn, rd = math.isqrt(n), math.isqrt(d)
            if rn * rn == n and rd * rd == d:
                return Fraction(rn, rd)
            return None
        p = self.p
        if pow(x, (p - 1) // 2, p) != 1:
            return None
        return _tonelli_shanks(x, p)

    # serialisation -----------------------------------------------------
    def to_json(self):
        return "Q" if self.p is None else {"p": self.p}

    @classmethod
    def from_json(cls, obj) -> "Field":
        if obj == "Q":
            return QQ
        if isinstance(obj, dict) and set(obj) == {"p"} and type(obj["p"]) is int:
            return cls(obj["p"])
        raise MalformedInputError(f"bad field descriptor {obj!r}")

    def element_to_json(self, x):
        if self.p is not None:
            return int(x)
        return str(x) if x.denominator != 1 else int(x.numerator)

    def element_from_json(self, obj):
        if isinstance(obj, bool) or not isinstance(obj, (int, str)):
            raise MalformedInputError(f"bad scalar {obj!r}")
        try:
            return self(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"bad scalar {obj!r}: {exc}") from None


def _tonelli_shanks(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)


# ---------------------------------------------------------------------------
# Quadratic surds
# ---------------------------------------------------------------------------


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational, str)) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


class QuadSurd:
    """Exact number ``u + v*sqrt(d)`` with rational ``u, v`` and integer ``d >= 0``.

    Values with different radicands only mix when one side is rational.
    """

    __slots__ = ("u", "v", "d")

    def __init__(self, u=0, v=0, d: int = 73):
        u, v, d = _frac(u), _frac(v), int(d)
        if d < 0:
            raise ValueError("negative radicand")
        r = math.isqrt(d)
        if r * r == d:
            u, v = u + v * r, Fraction(0)
        self.u, self.v, self.d = u, v, d

    @classmethod
    def _make(cls, u, v, d):
        return cls(u, v, d)

    def _coerce(self, other):
        if isinstance(other, QuadSurd):
            if other.d != self.d and other.v and self.v:
                raise ValueError(f"mixed radicands {self.d} and {other.d}")
            return other
        return QuadSurd(_frac(other), 0, self.d)

    def _radicand(self, other):
        if self.v:
            return self.d
        if other.v:
            return other.d
        return self.d

    def __add__(self, other):
        o = self._coerce(other)
        return self._make(self.u + o.u, self.v + o.v, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return self._make(-self.u, -self.v, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._radicand(o)
        return self._make(self.u * o.u + d * self.v * o.v, self.u * o.v + self.v * o.u, d)

    __rmul__ = __mul__

    def conjugate(self):
        return self._make(self.u, -self.v, self.d)

    def norm(self) -> Fraction:
        return self.u * self.u - self.d * self.v * self.v

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if not n:
            raise ZeroDivisionError("division by zero surd")
        q = self * o.conjugate()
        return self._make(q.u / n, q.v / n, q.d)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return 1 / (self ** -e)
        out = self._make(1, 0, self.d)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        su, sv = _sgn(self.u), _sgn(self.v)
        if sv == 0:
            return su
        if su == 0 or su == sv:
            return sv
        lhs, rhs = self.u * self.u, self.d * self.v * self.v
        if lhs > rhs:
            return su
        if lhs < rhs:
            return sv
        return 0

    def __eq__(self, other):
        try:
            return (self - other).sign() == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if not self.v:
            return hash(self.u)
        return hash((self.u, self.v, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return self.sign() != 0

    def floor(self) -> int:
        # integer estimate of v*sqrt(d), corrected by exact sign tests below
        q = self.v * self.v * self.d
        s = math.isqrt(q.numerator * q.denominator) // q.denominator
        n = math.floor(self.u) + (s if self.v >= 0 else -s - 1)
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def ceil(self) -> int:
        return -((-self).floor())

    def is_rational(self) -> bool:
        return self.v == 0

    def to_triple(self):
        """``[u, v, floor]`` with ``u``, ``v`` as exact strings."""
        return [str(self.u), str(self.v), self.floor()]

    def __repr__(self):
        if self.d == 73:
            return f"Surd73({self.u}, {self.v})"
        return f"QuadSurd({self.u}, {self.v}, d={self.d})"


class Surd73(QuadSurd):
    """Exact element ``u + v*sqrt(73)``."""

    __slots__ = ()

    def __init__(self, u=0, v=0):
        super().__init__(u, v, 73)

    @classmethod
    def _make(cls, u, v, d):
        if d == 73:
            return cls(u, v)
        return QuadSurd(u, v, d)


def surd_sign(x: QuadSurd) -> int:
    return x.sign()


def surd_floor(x: QuadSurd) -> int:
    return x.floor()


def isqrt_bracket(x: QuadSurd, width=Fraction(1, 1000)):
    """Rationals ``lo <= sqrt(x) <= hi`` with ``hi - lo <= width``.

    Works for nested radicals (``x`` itself a surd) by bisection on exact
    sign tests of ``x - m^2``.
    """
    if not isinstance(x, QuadSurd):
        x = QuadSurd(x, 0, 1)
    if x.sign() < 0:
        raise ValueError("square root of a negative number")
    n = math.isqrt(max(x.floor(), 0))
    lo, hi = Fraction(n), Fraction(n + 1)
    if (x - n * n).sign() == 0:
        return lo, lo
    width = Fraction(width)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = (x - mid * mid).sign()
        if s == 0:
            return mid, mid
        if s > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------


def _rref(rows, ncols: int, field: Field):
    """Gauss-Jordan elimination, leftmost pivots. Returns (nonzero rows, pivot columns)."""
    p = field.p
    rows = [list(r) for r in rows]
    pivots = []
    rank = 0
    nrows = len(rows)
    for c in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        inv = field.inv(prow[c])
        if p is None:
            prow = [x * inv for x in prow]
        else:
            prow = [x * inv % p for x in prow]
        rows[rank] = prow
        for i in range(nrows):
            if i != rank:
                f = rows[i][c]
                if f:
                    r = rows[i]
                    if p is None:
                        rows[i] = [x - f * y for x, y in zip(r, prow)]
                    else:
                        rows[i] = [(x - f * y) % p for x, y in zip(r, prow)]
        pivots.append(c)
        rank += 1
        if rank == nrows:
            break
    return rows[:rank], pivots


@dataclass(frozen=True)
class ExactMatrix:
    field: Field
    rows: tuple
    ncols: int

    def __init__(self, field: Field, rows, ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise MalformedInputError("ragged matrix")
            for x in r:
                if not field.contains(x):
                    raise MalformedInputError(f"entry {x!r} is not an element of {field!r}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    @classmethod
    def from_values(cls, field: Field, rows, ncols: int | None = None):
        return cls(field, [[field(x) for x in r] for r in rows], ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def rref(self):
        return _rref(self.rows, self.ncols, self.field)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self):
        return kernel_basis(self)

    def apply(self, vec):
        p = self.field.p
        out = [sum(a * b for a, b in zip(r, vec)) for r in self.rows]
        return out if p is None else [x % p for x in out]


def _kernel_from_rref(red, pivots, ncols, field):
    p = field.p
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for row, c in zip(red, pivots):
            x = row[f]
            if x:
                v[c] = -x if p is None else (-x) % p
        basis.append(v)
    return basis


def kernel_basis(m: ExactMatrix):
    """Basis of ``{x : m x = 0}``; one vector per free column, in column order."""
    red, pivots = m.rref()
    return _kernel_from_rref(red, pivots, m.ncols, m.field)


def rank(m: ExactMatrix) -> int:
    return m.rank()


def raw_rank(rows, ncols: int, field: Field) -> int:
    return len(_rref(rows, ncols, field)[1])


def raw_kernel(rows, ncols: int, field: Field):
    red, pivots = _rref(rows, ncols, field)
    return _kernel_from_rref(red, pivots, ncols, field)


class EchelonSpan:
    """Incrementally grown subspace, kept in echelon form.

    ``add`` returns whether the vector was new, which is how minimal
    generators and syzygies are selected.
    """

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self._rows = {}
        self._pivots = []

    def __len__(self):
        return len(self._pivots)

    @property
    def dim(self) -> int:
        return len(self._pivots)

    def reduce(self, vec):
        p = self.field.p
        v = list(vec)
        for c in self._pivots:
            f = v[c]
            if f:
                row = self._rows[c]
                if p is None:
                    for j in range(c, self.ncols):
                        if row[j]:
                            v[j] -= f * row[j]
                else:
                    for j in range(c, self.ncols):
                        if row[j]:
                            v[j] = (v[j] - f * row[j]) % p
        return v

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        for c, x in enumerate(v):
            if x:
                inv = self.field.inv(x)
                p = self.field.p
                v = [y * inv for y in v] if p is None else [y * inv % p for y in v]
                self._rows[c] = v
                bisect.insort(self._pivots, c)
                return True
        return False
