"""Exact scalar arithmetic: rationals, small finite fields with involution,
the split quadratic etale algebra, and dual numbers.

Every coefficient ring used downstream implements the same int-encoded
interface (elements are plain ints, operations are table lookups), so matrix
code and the enumeration kernels are generic over the ring.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

__all__ = [
    "Rational",
    "FiniteField",
    "SplitAlgebra",
    "DualAlgebra",
    "FieldElem",
    "DualNumber",
    "make_field",
    "root_of_unity",
]

# Valuations, jump values and depths are exact rationals throughout.
Rational = Fraction


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class FiniteField:
    """GF(p^k) for odd p and k in {1, 2}, elements encoded as ints 0..q-1.

    The encoding is polynomial coordinates a0 + a1*x -> a0 + a1*p where x is
    a fixed root of the defining polynomial x^2 - nonresidue(p).  The choice
    of defining polynomial and of the distinguished generator is a pure
    function of (p, k), so reports are byte-reproducible.

    ``involution`` is "identity" or "frobenius"; the latter requires k = 2
    and is x -> x^p, whose fixed field is the prime subfield.
    """

    def __init__(self, p: int, k: int = 1, involution: str = "identity"):
        if not _is_prime(p) or p == 2:
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        if k not in (1, 2):
            raise ValueError(f"extension degree must be 1 or 2, got {k}")
        if involution not in ("identity", "frobenius"):
            raise ValueError(f"unknown involution kind {involution!r}")
        if involution == "frobenius" and k == 1:
            raise ValueError("frobenius involution needs a quadratic extension")
        self.p = p
        self.k = k
        self.q = p**k
        self.involution_kind = involution
        self.nonresidue = self._least_nonresidue(p) if k == 2 else None
        self._build_tables()
        self.zero = 0
        self.one = 1
        self.generator = self._least_primitive()
        self._dlog = self._discrete_logs()

    @staticmethod
    def _least_nonresidue(p: int) -> int:
        squares = {(x * x) % p for x in range(1, p)}
        for n in range(2, p):
            if n not in squares:
                return n
        raise AssertionError("no quadratic nonresidue found")

    def _build_tables(self):
        p, q = self.p, self.q
        if self.k == 1:
            self._mul = [[(a * b) % p for b in range(p)] for a in range(p)]
            self._add = [[(a + b) % p for b in range(p)] for a in range(p)]
            self._invol = list(range(p))
        else:
            r = self.nonresidue
            mul = [[0] * q for _ in range(q)]
            add = [[0] * q for _ in range(q)]
            for a in range(q):
                a0, a1 = a % p, a // p
                for b in range(q):
                    b0, b1 = b % p, b // p
                    add[a][b] = (a0 + b0) % p + p * ((a1 + b1) % p)
                    c0 = (a0 * b0 + r * a1 * b1) % p
                    c1 = (a0 * b1 + a1 * b0) % p
                    mul[a][b] = c0 + p * c1
            self._mul = mul
            self._add = add
            # x -> x^p sends x to -x since x^2 = r is fixed.
            self._frob = [a % p + p * ((-(a // p)) % p) for a in range(q)]
            self._invol = (
                self._frob if self.involution_kind == "frobenius" else list(range(q))
            )
        if self.k == 1:
            self._neg = [(-a) % self.p for a in range(self.p)]
        else:
            p = self.p
            self._neg = [(-(a % p)) % p + p * ((-(a // p)) % p) for a in range(self.q)]
        inv = [0] * self.q
        for a in range(1, self.q):
            for b in range(1, self.q):
                if self._mul[a][b] == 1:
                    inv[a] = b
                    break
        self._inv = inv

    def _least_primitive(self) -> int:
        target = self.q - 1
        for g in range(2, self.q):
            e, x = 1, g
            while x != 1:
                x = self._mul[x][g]
                e += 1
            if e == target:
                return g
        raise AssertionError("no primitive element found")

    def _discrete_logs(self):
        dlog = {self.one: 0}
        x = self.generator
        e = 1
        while x != self.one:
            dlog[x] = e
            x = self._mul[x][self.generator]
            e += 1
        return dlog

    # -- int-encoded ring interface ------------------------------------
    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def involute(self, a):
        return self._invol[a]

    def is_unit(self, a) -> bool:
        return a != 0

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    @property
    def order(self) -> int:
        return self.q

    def from_int(self, n: int) -> int:
        """Image of the rational integer n in this field."""
        return n % self.p

    def power(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        out = self.one
        while e:
            if e & 1:
                out = self._mul[out][a]
            a = self._mul[a][a]
            e >>= 1
        return out

    def dlog(self, a) -> int:
        if a == 0:
            raise ValueError("dlog of 0")
        return self._dlog[a]

    # -- structure over the fixed subfield ------------------------------
    @property
    def fixed_field(self) -> "FiniteField":
        if self.involution_kind == "identity":
            return self
        return make_field(self.p, 1)

    @property
    def fixed_dim(self) -> int:
        """Dimension over the fixed field of the involution."""
        return 1 if self.involution_kind == "identity" else 2

    def fixed_coords(self, a):
        """Coordinates of a over the fixed field, in the basis (1, x)."""
        if self.involution_kind == "identity":
            return (a,)
        return (a % self.p, a // self.p)

    def from_fixed_coords(self, coords):
        if self.involution_kind == "identity":
            return coords[0]
        return coords[0] + self.p * coords[1]

    def reltrace(self, a):
        """Trace to the fixed field: the identity when the involution is
        trivial, a + involute(a) otherwise."""
        if self.involution_kind == "identity":
            return a
        t = self.add(a, self.involute(a))
        assert t % self.p == t, "relative trace left the prime field"
        return t

    def embed_fixed(self, a):
        """Image of a fixed-field element in this ring (identity here)."""
        return a

    def __repr__(self):
        return f"GF({self.q}, involution={self.involution_kind})"

    def describe(self) -> dict:
        return {
            "kind": "field",
            "p": self.p,
            "k": self.k,
            "q": self.q,
            "involution": self.involution_kind,
            "generator": self.generator,
            "nonresidue": self.nonresidue,
        }


class SplitAlgebra:
    """The split etale algebra F x F with the swap involution.

    This is the residue shadow of a quadratic extension that splits after
    base change; formed spaces over it realize general-linear dual-pair
    pictures with the same code paths as honest field cases.  Elements are
    pairs (a, b) encoded as a*q + b.
    """

    def __init__(self, base: FiniteField):
        if base.involution_kind != "identity":
            raise ValueError("split algebra needs a plain base field")
        self.base = base
        self.q = base.q
        self.p = base.p
        self.order = base.q**2
        self.zero = 0
        self.one = base.one * base.q + base.one
        self.involution_kind = "swap"

    def encode(self, a, b):
        return a * self.q + b

    def decode(self, x):
        return divmod(x, self.q)

    def add(self, x, y):
        F = self.base
        a, b = divmod(x, self.q)
        c, d = divmod(y, self.q)
        return F.add(a, c) * self.q + F.add(b, d)

    def sub(self, x, y):
        F = self.base
        a, b = divmod(x, self.q)
        c, d = divmod(y, self.q)
        return F.sub(a, c) * self.q + F.sub(b, d)

    def neg(self, x):
        F = self.base
        a, b = divmod(x, self.q)
        return F.neg(a) * self.q + F.neg(b)

    def mul(self, x, y):
        F = self.base
        a, b = divmod(x, self.q)
        c, d = divmod(y, self.q)
        return F.mul(a, c) * self.q + F.mul(b, d)

    def inv(self, x):
        F = self.base
        a, b = divmod(x, self.q)
        return F.inv(a) * self.q + F.inv(b)

    def involute(self, x):
        a, b = divmod(x, self.q)
        return b * self.q + a

    def is_unit(self, x) -> bool:
        a, b = divmod(x, self.q)
        return a != 0 and b != 0

    def elements(self):
        return range(self.order)

    def units(self):
        q = self.q
        return (a * q + b for a in range(1, q) for b in range(1, q))

    def from_int(self, n: int):
        e = self.base.from_int(n)
        return self.encode(e, e)

    @property
    def fixed_field(self) -> FiniteField:
        return self.base

    @property
    def fixed_dim(self) -> int:
        return 2

    def fixed_coords(self, x):
        return self.decode(x)

    def from_fixed_coords(self, coords):
        return self.encode(coords[0], coords[1])

    def reltrace(self, x):
        a, b = divmod(x, self.q)
        return self.base.add(a, b)

    def embed_fixed(self, a):
        """Diagonal embedding of the base field."""
        return self.encode(a, a)

    def __repr__(self):
        return f"GF({self.q}) x GF({self.q}) with swap"

    def describe(self) -> dict:
        return {"kind": "split", "q": self.q, "involution": "swap"}


class DualAlgebra:
    """F[eps]/(eps^2) over a finite field, encoding a + b*eps as a + b*q.

    Used only for the first-order check of the oscillator character
    identity; it reuses the matrix layer unchanged since it implements the
    same interface (a non-unit is anything with vanishing constant term).
    """

    def __init__(self, base: FiniteField):
        self.base = base
        self.q = base.q
        self.p = base.p
        self.order = base.q**2
        self.zero = 0
        self.one = base.one
        self.involution_kind = base.involution_kind

    def encode(self, a, b):
        return a + b * self.q

    def decode(self, x):
        b, a = divmod(x, self.q)
        return a, b

    def add(self, x, y):
        F = self.base
        a, b = self.decode(x)
        c, d = self.decode(y)
        return self.encode(F.add(a, c), F.add(b, d))

    def sub(self, x, y):
        F = self.base
        a, b = self.decode(x)
        c, d = self.decode(y)
        return self.encode(F.sub(a, c), F.sub(b, d))

    def neg(self, x):
        F = self.base
        a, b = self.decode(x)
        return self.encode(F.neg(a), F.neg(b))

    def mul(self, x, y):
        F = self.base
        a, b = self.decode(x)
        c, d = self.decode(y)
        return self.encode(F.mul(a, c), F.add(F.mul(a, d), F.mul(b, c)))

    def inv(self, x):
        F = self.base
        a, b = self.decode(x)
        if a == 0:
            raise ZeroDivisionError("dual number with nilpotent constant term")
        ai = F.inv(a)
        # (a + b eps)^-1 = a^-1 - a^-2 b eps
        return self.encode(ai, F.neg(F.mul(F.mul(ai, ai), b)))

    def involute(self, x):
        F = self.base
        a, b = self.decode(x)
        return self.encode(F.involute(a), F.involute(b))

    def is_unit(self, x) -> bool:
        return x % self.q != 0

    def elements(self):
        return range(self.order)

    def from_int(self, n: int):
        return self.base.from_int(n)

    def eps(self):
        return self.encode(0, 1)

    # first-order checks only run over plain fields, where the involution
    # is trivial and the fixed structure is the algebra itself
    @property
    def fixed_field(self):
        return self

    @property
    def fixed_dim(self) -> int:
        return 1

    def fixed_coords(self, x):
        return (x,)

    def from_fixed_coords(self, coords):
        return coords[0]

    def reltrace(self, x):
        return x

    def embed_fixed(self, a):
        return a

    def __repr__(self):
        return f"{self.base!r}[eps]/(eps^2)"


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1, involution: str = "identity") -> FiniteField:
    """Construct (and cache) the canonical GF(p^k) with the given involution."""
    return FiniteField(p, k, involution)


@lru_cache(maxsize=None)
def make_split_algebra(q: int) -> SplitAlgebra:
    f = None
    for p in range(3, q + 1):
        if _is_prime(p):
            if p == q:
                f = make_field(p, 1)
                break
            if p * p == q:
                f = make_field(p, 2)
                break
    if f is None:
        raise ValueError(f"{q} is not an odd prime power <= p^2")
    return SplitAlgebra(f)


def root_of_unity(field: FiniteField, m: int) -> int:
    """The canonical element of exact multiplicative order m.

    Deterministic: the power of the fixed generator with least positive
    exponent, i.e. generator^((q-1)/m).  Fails loudly when m does not
    divide q - 1.
    """
    if m <= 0:
        raise ValueError("order must be positive")
    if (field.q - 1) % m != 0:
        raise ValueError(f"no element of order {m} in GF({field.q}): {m} does not divide q - 1 = {field.q - 1}")
    return field.power(field.generator, (field.q - 1) // m)


class FieldElem:
    """Operator-overloaded wrapper around the int encoding.

    The enumeration-heavy code works with raw ints; this wrapper is for
    call sites where readability beats speed.
    """

    __slots__ = ("field", "value")

    def __init__(self, field, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        return FieldElem(self.field, self.field.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return FieldElem(self.field, self.field.sub(self.value, v))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        return FieldElem(self.field, self.field.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        return FieldElem(self.field, self.field.mul(self.value, self.field.inv(v)))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.power(self.value, e))

    def conj(self):
        return FieldElem(self.field, self.field.involute(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.value))

    def __repr__(self):
        return f"FieldElem({self.value} in {self.field!r})"


class DualNumber:
    """a + b*eps with eps^2 = 0, over a FiniteField."""

    __slots__ = ("algebra", "value")

    def __init__(self, algebra: DualAlgebra, a: int, b: int = 0):
        self.algebra = algebra
        self.value = algebra.encode(a, b)

    @classmethod
    def _wrap(cls, algebra, value):
        out = object.__new__(cls)
        out.algebra = algebra
        out.value = value
        return out

    @property
    def const(self):
        return self.algebra.decode(self.value)[0]

    @property
    def slope(self):
        return self.algebra.decode(self.value)[1]

    def __add__(self, other):
        return self._wrap(self.algebra, self.algebra.add(self.value, other.value))

    def __sub__(self, other):
        return self._wrap(self.algebra, self.algebra.sub(self.value, other.value))

    def __mul__(self, other):
        return self._wrap(self.algebra, self.algebra.mul(self.value, other.value))

    def __neg__(self):
        return self._wrap(self.algebra, self.algebra.neg(self.value))

    def inv(self):
        return self._wrap(self.algebra, self.algebra.inv(self.value))

    def __eq__(self, other):
        return isinstance(other, DualNumber) and self.value == other.value and self.algebra is other.algebra

    def __hash__(self):
        return hash((id(self.algebra), self.value))

    def __repr__(self):
        a, b = self.algebra.decode(self.value)
        return f"({a} + {b}*eps)"
