"""Homogeneous polynomials in three variables and points of the projective plane."""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .errors import DuplicatePointError, MalformedInputError
from .exact import QQ, ExactMatrix, Field


def monomial_count(d: int) -> int:
    """dim S_d = (d+1)(d+2)/2, and 0 for negative d."""
    return (d + 1) * (d + 2) // 2 if d >= 0 else 0


@lru_cache(maxsize=None)
def monomials(d: int) -> tuple:
    """Exponent triples of degree ``d`` in deglex order (x > y > z)."""
    if d < 0:
        return ()
    return tuple((i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1))


@lru_cache(maxsize=None)
def monomial_index(d: int) -> dict:
    return {m: n for n, m in enumerate(monomials(d))}


@lru_cache(maxsize=None)
def shift_maps(d: int) -> tuple:
    """For each variable, the column map S_{d-1} -> S_d of multiplication by it."""
    idx = monomial_index(d)
    out = []
    for var in range(3):
        m = []
        for e in monomials(d - 1):
            e2 = list(e)
            e2[var] += 1
            m.append(idx[tuple(e2)])
        out.append(tuple(m))
    return tuple(out)


class HomogeneousPoly:
    """Homogeneous polynomial in ``z0, z1, z2`` with coefficients in ``field``.

    Zero coefficients are never stored. The zero polynomial keeps a declared
    degree so that graded pieces stay well typed.
    """

    __slots__ = ("field", "degree", "coeffs")

    def __init__(self, field: Field, degree: int, coeffs=None):
        if degree < 0:
            raise MalformedInputError("negative degree")
        self.field = field
        self.degree = degree
        clean = {}
        for e, c in (coeffs or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != 3 or min(e) < 0 or sum(e) != degree:
                raise MalformedInputError(f"exponent {e} does not have degree {degree}")
            if not field.contains(c):
                c = field(c)
            if c:
                clean[e] = clean.get(e, field.zero) + c
                clean[e] = field.norm(clean[e])
                if not clean[e]:
                    del clean[e]
        self.coeffs = clean

    # constructors --------------------------------------------------------
    @classmethod
    def from_vector(cls, field: Field, degree: int, vec):
        return cls(field, degree, {m: c for m, c in zip(monomials(degree), vec) if c})

    @classmethod
    def variable(cls, field: Field, i: int):
        e = [0, 0, 0]
        e[i] = 1
        return cls(field, 1, {tuple(e): field.one})

    @classmethod
    def constant(cls, field: Field, c=1):
        return cls(field, 0, {(0, 0, 0): field(c)})

    @classmethod
    def linear(cls, field: Field, a, b, c):
        return cls(field, 1, {(1, 0, 0): field(a), (0, 1, 0): field(b), (0, 0, 1): field(c)})

    @classmethod
    def random(cls, field: Field, degree: int, rng):
        return cls(field, degree, {m: field.random_element(rng) for m in monomials(degree)})

    # basic protocol ------------------------------------------------------
    def to_vector(self):
        z = self.field.zero
        return [self.coeffs.get(m, z) for m in monomials(self.degree)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        if self.field != other.field:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.degree, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        return f"HomogeneousPoly({self.field!r}, {self.degree}, {self.to_str()})"

    def to_str(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            mono = "*".join(
                f"z{i}" + (f"^{n}" if n > 1 else "") for i, n in enumerate(e) if n
            )
            terms.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(terms)

    # arithmetic ----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, HomogeneousPoly):
            raise TypeError("expected HomogeneousPoly")
        if other.field != self.field:
            raise MalformedInputError("polynomials over different fields")

    def __add__(self, other):
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise MalformedInputError("adding polynomials of different degrees")
        out = dict(self.coeffs)
        norm = self.field.norm
        for e, c in other.coeffs.items():
            out[e] = norm(out.get(e, self.field.zero) + c)
        return HomogeneousPoly(self.field, self.degree, out)

    def __neg__(self):
        norm = self.field.norm
        return HomogeneousPoly(self.field, self.degree, {e: norm(-c) for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field(c) if not self.field.contains(c) else c
        norm = self.field.norm
        return HomogeneousPoly(self.field, self.degree, {e: norm(c * x) for e, x in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, HomogeneousPoly):
            return self.scale(other)
        self._check(other)
        out = {}
        zero = self.field.zero
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, zero) + c1 * c2
        norm = self.field.norm
        return HomogeneousPoly(
            self.field, self.degree + other.degree, {e: norm(c) for e, c in out.items()}
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = HomogeneousPoly.constant(self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # calculus and evaluation ----------------------------------------------
    def partial(self, i: int):
        if self.degree == 0:
            return HomogeneousPoly(self.field, 0)
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = self.field.norm(c * e[i])
        return HomogeneousPoly(self.field, self.degree - 1, out)

    def gradient(self):
        return [self.partial(i) for i in range(3)]

    def __call__(self, pt):
        coords = pt.coords if isinstance(pt, ProjPoint) else pt
        return self.evaluate(coords)

    def evaluate(self, coords):
        f = self.field
        x, y, z = coords
        total = f.zero
        for (i, j, l), c in self.coeffs.items():
            total += c * x**i * y**j * z**l
        return f.norm(total)

    def substitute_linear(self, forms):
        """``f(L0, L1, L2)`` for linear forms ``L_i``; used for coordinate changes."""
        zero = HomogeneousPoly(self.field, self.degree)
        if self.is_zero():
            return zero
        deg = forms[0].degree
        powers = [[HomogeneousPoly.constant(self.field)] for _ in range(3)]
        for i in range(3):
            for _ in range(self.degree):
                powers[i].append(powers[i][-1] * forms[i])
        out = HomogeneousPoly(self.field, self.degree * deg)
        for (a, b, c), coef in self.coeffs.items():
            out = out + (powers[0][a] * powers[1][b] * powers[2][c]).scale(coef)
        return out

    def transform(self, matrix):
        """Return ``g(z) = f(M z)`` for a 3x3 matrix ``M`` of field elements."""
        forms = [HomogeneousPoly.linear(self.field, *row) for row in matrix]
        return self.substitute_linear(forms)

    # serialisation -------------------------------------------------------
    def to_json(self):
        el = self.field.element_to_json
        return [[el(self.coeffs[e]), list(e)] for e in sorted(self.coeffs, reverse=True)]

    @classmethod
    def from_json(cls, field: Field, terms, degree: int | None = None):
        if not isinstance(terms, list):
            raise MalformedInputError("polynomial must be a list of [coef, [i,j,l]] terms")
        coeffs = {}
        degs = set()
        for term in terms:
            if not (isinstance(term, list) and len(term) == 2 and isinstance(term[1], list)):
                raise MalformedInputError(f"bad term {term!r}")
            c = field.element_from_json(term[0])
            e = tuple(term[1])
            if len(e) != 3 or not all(type(x) is int and x >= 0 for x in e):
                raise MalformedInputError(f"bad exponent {term[1]!r}")
            degs.add(sum(e))
            coeffs[e] = field.norm(coeffs.get(e, field.zero) + c)
        if len(degs) > 1:
            raise MalformedInputError("polynomial is not homogeneous")
        if degree is None:
            if not degs:
                raise MalformedInputError("cannot infer the degree of an empty polynomial")
            degree = degs.pop()
        return cls(field, degree, coeffs)


class ProjPoint:
    """Point of P^2, normalised so the first nonzero coordinate is 1."""

    __slots__ = ("field", "coords")

    def __init__(self, field: Field, coords):
        if len(coords) != 3:
            raise MalformedInputError("a point needs three coordinates")
        c = [x if field.contains(x) else field(x) for x in coords]
        lead = next((x for x in c if x), None)
        if lead is None:
            raise MalformedInputError("(0:0:0) is not a projective point")
        inv = field.inv(lead)
        self.field = field
        self.coords = tuple(field.norm(x * inv) for x in c)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash((self.field, self.coords))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        # first-nonzero position, then coordinates; stable for Q and F_p alike
        lead = next(i for i, x in enumerate(self.coords) if x)
        return (lead, tuple(self.coords))

    def __repr__(self):
        return "(" + ":".join(str(x) for x in self.coords) + ")"

    def to_json(self):
        return [self.field.element_to_json(x) for x in self.coords]

    def transform(self, matrix):
        """Image ``M p`` of the point under a 3x3 matrix."""
        f = self.field
        return ProjPoint(f, [f.norm(sum(a * b for a, b in zip(row, self.coords))) for row in matrix])


def check_distinct(points) -> None:
    seen = set()
    for pt in points:
        if pt in seen:
            raise DuplicatePointError(f"duplicate point {pt!r}")
        seen.add(pt)


def common_field(points) -> Field:
    fields = {pt.field for pt in points}
    if len(fields) > 1:
        raise MalformedInputError("points over different fields")
    return fields.pop() if fields else QQ


def _power_rows(points, d):
    f = points[0].field
    p = f.p
    rows = []
    for pt in points:
        pw = [[f.one] for _ in range(3)]
        for i in range(3):
            for _ in range(d):
                nxt = pw[i][-1] * pt.coords[i]
                pw[i].append(nxt if p is None else nxt % p)
        if p is None:
            rows.append([pw[0][a] * pw[1][b] * pw[2][c] for a, b, c in monomials(d)])
        else:
            rows.append([pw[0][a] * pw[1][b] * pw[2][c] % p for a, b, c in monomials(d)])
    return rows


def eval_rows(points, d: int):
    """Rows of the evaluation matrix as plain lists (no validation)."""
    if not points:
        return []
    return _power_rows(points, d)


def eval_matrix(points, d: int) -> ExactMatrix:
    """One row per point, one column per degree-``d`` monomial (deglex)."""
    if d < 0:
        raise MalformedInputError("negative degree")
    points = list(points)
    check_distinct(points)
    field = common_field(points)
    return ExactMatrix(field, eval_rows(points, d), monomial_count(d))


def random_invertible(field: Field, rng, n: int = 3):
    from .exact import raw_rank

    while True:
        m = [[field.random_element(rng) for _ in range(n)] for _ in range(n)]
        if raw_rank(m, n, field) == n:
            return m


def invert3(field: Field, m):
    """Inverse of a 3x3 matrix via Gauss-Jordan on [M | I]."""
    from .exact import _rref

    aug = [list(m[i]) + [field.one if i == j else field.zero for j in range(3)] for i in range(3)]
    red, piv = _rref(aug, 6, field)
    if piv[:3] != [0, 1, 2] or len(piv) < 3:
        raise MalformedInputError("singular matrix")
    return [row[3:] for row in red[:3]]


def binomial(n: int, k: int) -> int:
    return comb(n, k)
