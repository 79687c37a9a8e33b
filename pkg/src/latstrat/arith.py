"""Exact arithmetic kernel.

Three layers share one valuation convention (v(pi) = 1, v(p) = 2 on the
ramified side):

* the symbolic quadratic tower  Q < Q(eps) < Q(eps)(pi)  with eps^2 = u a
  unit nonresidue and pi^2 = c in {p, u*p}, carried exactly by rationals;
* finite fields F_{p^k} as polynomial residues;
* truncated Witt-style rings Z/p^m [x]/(f) with a Hensel Frobenius lift,
  and their ramified quadratic extensions a + b*pi.

Also houses the Legendre and odd-p Hilbert symbols.
"""

from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf


class PrecisionError(ArithmeticError):
    """A truncated computation could not be certified at working precision."""


# ---------------------------------------------------------------------------
# integer helpers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) in {-1, 0, +1} for an odd prime p."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue mod p."""
    u = 2
    while legendre(u, p) != -1:
        u += 1
    return u


def _padic_val(x: Fraction, p: int):
    """p-adic valuation of a rational; +inf for 0."""
    if x == 0:
        return INF
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _padic_unit(x: Fraction, p: int) -> Fraction:
    v = _padic_val(x, p)
    return x / Fraction(p) ** v


def hilbert_symbol(a, b, p: int) -> int:
    """p-adic Hilbert symbol (a, b)_p for an odd prime p.

    Standard formula: write a = p^alpha u, b = p^beta w with u, w units;
    then (a,b) = (-1|p)^(alpha*beta) (u|p)^beta (w|p)^alpha.
    """
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol undefined at 0")
    alpha = _padic_val(a, p)
    beta = _padic_val(b, p)
    u = _padic_unit(a, p)
    w = _padic_unit(b, p)
    lu = legendre(u.numerator * u.denominator, p)
    lw = legendre(w.numerator * w.denominator, p)
    eps = legendre(-1, p)
    sign = (eps ** ((alpha * beta) % 2)) * (lu ** (beta % 2)) * (lw ** (alpha % 2))
    return sign


# ---------------------------------------------------------------------------
# symbolic tower Q(eps)(pi)

class SymRing:
    """The ring Q[eps,pi]/(eps^2-u, pi^2-c) with c = p or u*p.

    It is a field for the parameter ranges used here (u the smallest
    nonresidue is prime and not a rational square, c is not a square in
    Q(eps)).  sigma sends eps -> -eps fixing pi; conj sends pi -> -pi
    fixing eps.
    """

    def __init__(self, p: int, uniformizer: str = "p"):
        if p == 2 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if uniformizer not in ("p", "up"):
            raise ValueError("uniformizer must be 'p' or 'up'")
        self.p = p
        self.u = smallest_nonresidue(p)
        self.uniformizer = uniformizer
        self.c = Fraction(p if uniformizer == "p" else self.u * p)
        self.zero = SymElem(self, (Fraction(0),) * 4)
        self.one = SymElem(self, (Fraction(1), Fraction(0), Fraction(0), Fraction(0)))
        self.eps = SymElem(self, (Fraction(0), Fraction(1), Fraction(0), Fraction(0)))
        self.pi = SymElem(self, (Fraction(0), Fraction(0), Fraction(1), Fraction(0)))
        # eta: square root of p^{-1} pi^2 inside the unramified part
        self.eta = self.one if uniformizer == "p" else self.eps

    def __call__(self, x) -> "SymElem":
        if isinstance(x, SymElem):
            if x.ring is not self:
                raise ValueError("element from a different ring")
            return x
        return SymElem(self, (Fraction(x), Fraction(0), Fraction(0), Fraction(0)))

    def elem(self, c00=0, c10=0, c01=0, c11=0) -> "SymElem":
        return SymElem(self, (Fraction(c00), Fraction(c10), Fraction(c01), Fraction(c11)))

    def __repr__(self):
        return f"SymRing(p={self.p}, u={self.u}, pi^2={self.c})"


class SymElem:
    """c00 + c10*eps + c01*pi + c11*eps*pi with rational coefficients."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: SymRing, coeffs):
        self.ring = ring
        self.c = tuple(coeffs)

    # -- ring structure -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, SymElem):
            r1, r2 = self.ring, other.ring
            if r1 is not r2 and (r1.p, r1.u, r1.c) != (r2.p, r2.u, r2.c):
                raise ValueError("mixed rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SymElem(self.ring, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return SymElem(self.ring, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SymElem(self.ring, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        u = self.ring.u
        c = self.ring.c
        a0, a1, a2, a3 = self.c
        b0, b1, b2, b3 = o.c
        # basis 1, eps, pi, eps*pi ; eps^2 = u, pi^2 = c
        r0 = a0 * b0 + u * a1 * b1 + c * a2 * b2 + u * c * a3 * b3
        r1 = a0 * b1 + a1 * b0 + c * (a2 * b3 + a3 * b2)
        r2 = a0 * b2 + a2 * b0 + u * (a1 * b3 + a3 * b1)
        r3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1
        return SymElem(self.ring, (r0, r1, r2, r3))

    __rmul__ = __mul__

    def inverse(self) -> "SymElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0")
        # conjugate over pi first: (a + b pi)^(-1) = (a - b pi) / (a^2 - c b^2)
        nrm = self * self.conj()          # lies in Q(eps)
        x, y = nrm.c[0], nrm.c[1]
        u = self.ring.u
        den = x * x - u * y * y           # norm down to Q
        if den == 0:
            raise ZeroDivisionError("non-invertible element (ring not a field?)")
        inv_nrm = SymElem(self.ring, (x / den, -y / den, Fraction(0), Fraction(0)))
        return self.conj() * inv_nrm

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.ring(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    # -- tower structure ----------------------------------------------------

    def sigma(self) -> "SymElem":
        """Unramified Frobenius: eps -> -eps, pi -> pi."""
        a0, a1, a2, a3 = self.c
        return SymElem(self.ring, (a0, -a1, a2, -a3))

    def conj(self) -> "SymElem":
        """Galois conjugation of the ramified layer: pi -> -pi, eps -> eps."""
        a0, a1, a2, a3 = self.c
        return SymElem(self.ring, (a0, a1, -a2, -a3))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.c)

    def is_rational(self) -> bool:
        return self.c[1] == 0 and self.c[2] == 0 and self.c[3] == 0

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not rational: {self}")
        return self.c[0]

    def valuation(self):
        """Normalized pi-adic valuation; +inf iff zero.

        The unramified part a = c00 + c10 eps has v(a) = 2 * min(ord_p c00,
        ord_p c10); the pi part contributes an extra 1.
        """
        p = self.ring.p
        va = min(_padic_val(self.c[0], p), _padic_val(self.c[1], p)) * 2
        vb = min(_padic_val(self.c[2], p), _padic_val(self.c[3], p)) * 2 + 1
        return min(va, vb)

    def is_integral(self) -> bool:
        return self.valuation() >= 0

    def residue(self) -> int:
        """Image in the residue field F_p (requires v >= 0)."""
        if self.valuation() < 0:
            raise ValueError("not integral")
        p = self.ring.p
        r = self.c[0]
        num = r.numerator % p
        den = pow(r.denominator % p, -1, p)
        val = (num * den) % p
        # the eps coefficient maps into F_{p^2}; only rational residues are
        # meaningful here, so require it to vanish mod p
        if _padic_val(self.c[1], p) <= 0 and self.c[1] != 0:
            raise ValueError("residue not in the prime field")
        return val

    def __repr__(self):
        parts = []
        names = ("", "*e", "*pi", "*e*pi")
        for a, nm in zip(self.c, names):
            if a != 0:
                parts.append(f"{a}{nm}")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# finite fields F_{p^k}

def _find_irreducible(p: int, k: int):
    """Monic irreducible of degree k over F_p, as a coefficient tuple
    (c_0, ..., c_{k-1}) of x^k = c_0 + c_1 x + ...; found by search."""
    if k == 1:
        return (0,)
    import itertools
    for tail in itertools.product(range(p), repeat=k):
        # f = x^k - tail(x); check irreducibility by scanning for roots and
        # factors via gcd with x^(p^d) - x
        coeffs = tuple(tail)
        if _poly_is_irreducible(coeffs, p, k):
            return coeffs
    raise RuntimeError("no irreducible found")


def _poly_is_irreducible(tail, p, k):
    # f(x) = x^k - sum tail[i] x^i over F_p; irreducible iff x^(p^k) = x mod f
    # and gcd condition for proper divisors
    def mulmod(a, b):
        out = [0] * (2 * k)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = (out[i + j] + ai * bj) % p
        for i in range(2 * k - 1, k - 1, -1):
            if out[i]:
                c = out[i]
                out[i] = 0
                for j, t in enumerate(tail):
                    out[i - k + j] = (out[i - k + j] + c * t) % p
        return out[:k]

    def powx(e):
        # x^e mod f
        result = [1] + [0] * (k - 1)
        base = ([0, 1] + [0] * (k - 2))[:k] if k > 1 else [0]
        while e:
            if e & 1:
                result = mulmod(result, base)
            base = mulmod(base, base)
            e >>= 1
        return result

    xq = powx(p ** k)
    if xq != [0, 1] + [0] * (k - 2):
        return False
    for d in range(1, k):
        if k % d == 0:
            xd = powx(p ** d)
            if xd == [0, 1] + [0] * (k - 2):
                return False
    return True


class FiniteField:
    """F_{p^k} with elements encoded as integers 0..p^k-1 (base-p digit
    vectors in the power basis of a fixed monic irreducible)."""

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        self.p = p
        self.k = k
        self.q = p ** k
        self.tail = _find_irreducible(p, k)  # x^k = sum tail[i] x^i
        self._mul_table = None
        if self.q <= 128:
            self._build_tables()

    def _build_tables(self):
        q = self.q
        tbl = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                v = self._mul_raw(a, b)
                tbl[a][b] = v
                tbl[b][a] = v
        self._mul_table = tbl

    def digits(self, a: int):
        p = self.p
        return [(a // p ** i) % p for i in range(self.k)]

    def undigits(self, ds):
        p = self.p
        return sum((d % p) * p ** i for i, d in enumerate(ds))

    def add(self, a: int, b: int) -> int:
        p = self.p
        da, db = self.digits(a), self.digits(b)
        return self.undigits([(x + y) % p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        p = self.p
        return self.undigits([(-x) % p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_raw(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        da, db = self.digits(a), self.digits(b)
        out = [0] * (2 * k)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    out[i + j] = (out[i + j] + x * y) % p
        for i in range(2 * k - 1, k - 1, -1):
            if out[i]:
                c = out[i]
                out[i] = 0
                for j, t in enumerate(self.tail):
                    out[i - k + j] = (out[i - k + j] + c * t) % p
        return self.undigits(out[:k])

    def mul(self, a: int, b: int) -> int:
        if self._mul_table is not None:
            return self._mul_table[a][b]
        return self._mul_raw(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        e %= self.q - 1
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def frobenius(self, a: int) -> int:
        """x -> x^p, the arithmetic Frobenius."""
        return self.pow(a, self.p)

    def frobenius_iter(self, a: int, n: int) -> int:
        for _ in range(n % self.k if self.k else 1):
            a = self.frobenius(a)
        return a

    def elements(self):
        return range(self.q)

    def sqrt(self, a: int):
        """A square root if one exists, else None."""
        if a == 0:
            return 0
        for x in range(1, self.q):
            if self.mul(x, x) == a:
                return x
        return None

    def subfield_embed(self, sub: "FiniteField", a: int) -> int:
        """Embed F_{p^j} into self (j | k) by matching minimal relations."""
        if sub.k == 1:
            return a % self.p
        raise NotImplementedError("only prime-field embedding is needed")

    def __repr__(self):
        return f"F_{self.p}^{self.k}"


# ---------------------------------------------------------------------------
# truncated Witt-style rings

class WittRing:
    """W_m(F_{p^k}) modeled as Z/p^m [x] / (f), f a monic lift of the fixed
    degree-k irreducible, with the Frobenius lift computed by Hensel
    iteration (the unique root of f congruent to x^p mod p)."""

    def __init__(self, p: int, k: int, m: int = 8):
        if m < 1:
            raise ValueError("precision must be >= 1")
        self.p = p
        self.k = k
        self.m = m
        self.pm = p ** m
        self.ff = FiniteField(p, k)
        # f(x) = x^k - sum tail[i] x^i lifted verbatim to Z/p^m
        self.tail = tuple(int(t) for t in self.ff.tail)
        self.zero = (0,) * k
        self.one = tuple([1] + [0] * (k - 1))
        self._frob_matrix = None
        self._frob_matrix_inv = None
        if k > 1:
            self._compute_frobenius_lift()

    # elements are tuples of k ints mod p^m

    def elem(self, ints) -> tuple:
        if isinstance(ints, int):
            return tuple([ints % self.pm] + [0] * (self.k - 1))
        return tuple(int(x) % self.pm for x in ints)

    def add(self, a, b):
        pm = self.pm
        return tuple((x + y) % pm for x, y in zip(a, b))

    def neg(self, a):
        pm = self.pm
        return tuple((-x) % pm for x in a)

    def sub(self, a, b):
        pm = self.pm
        return tuple((x - y) % pm for x, y in zip(a, b))

    def mul(self, a, b):
        p, k, pm = self.p, self.k, self.pm
        out = [0] * (2 * k)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % pm
        for i in range(2 * k - 1, k - 1, -1):
            if out[i]:
                c = out[i]
                out[i] = 0
                for j, t in enumerate(self.tail):
                    out[i - k + j] = (out[i - k + j] + c * t) % pm
        return tuple(out[:k])

    def scal(self, n: int, a):
        pm = self.pm
        return tuple((n * x) % pm for x in a)

    def is_zero(self, a) -> bool:
        return all(x == 0 for x in a)

    def val(self, a):
        """p-adic valuation (min over coefficients); INF if 0 at precision."""
        if self.is_zero(a):
            return INF
        v = self.m
        for x in a:
            if x:
                w = 0
                while x % self.p == 0:
                    x //= self.p
                    w += 1
                v = min(v, w)
        return v

    def unit_inverse(self, a):
        """Inverse of a unit by Hensel lifting from F_{p^k}."""
        if self.val(a) != 0:
            raise ZeroDivisionError("not a unit")
        red = self.reduce_modp(a)
        inv0 = self.ff.inv(red)
        x = self.elem(self.ff.digits(inv0))
        # Newton: x <- x(2 - a x)
        steps = max(1, math.ceil(math.log2(self.m)))
        for _ in range(steps + 1):
            ax = self.mul(a, x)
            x = self.mul(x, self.sub(self.scal(2, self.one), ax))
        return x

    def div_exact(self, a, b):
        """a / b when v(a) >= v(b); exact division by p-powers then a unit."""
        vb = self.val(b)
        if vb == INF:
            raise ZeroDivisionError
        if vb > 0:
            pf = self.p ** vb
            if any(x % pf for x in a):
                raise PrecisionError("inexact division")
            a = tuple(x // pf for x in a)
            b = tuple(x // pf for x in b)
            # NOTE: dividing by p^vb loses vb digits of absolute precision;
            # callers keep a margin via the precision policy in lattices.
        return self.mul(a, self.unit_inverse(b))

    def reduce_modp(self, a) -> int:
        return self.ff.undigits([x % self.p for x in a])

    def teichmuller_like_lift(self, a0: int):
        """Just the digit lift of a residue element (not Teichmueller)."""
        return self.elem(self.ff.digits(a0))

    def _f_eval(self, r):
        # f(r) = r^k - sum tail[i] r^i
        acc = self.one
        pw = [self.one]
        for _ in range(self.k):
            pw.append(self.mul(pw[-1], r))
        val = pw[self.k]
        for i, t in enumerate(self.tail):
            val = self.sub(val, self.scal(t, pw[i]))
        return val

    def _fprime_eval(self, r):
        pw = [self.one]
        for _ in range(self.k):
            pw.append(self.mul(pw[-1], r))
        val = self.scal(self.k, pw[self.k - 1])
        for i, t in enumerate(self.tail):
            if i >= 1:
                val = self.sub(val, self.scal(t * i, pw[i - 1]))
        return val

    def _compute_frobenius_lift(self):
        """Hensel: the root r of f with r = x^p mod p; then phi(x) = r."""
        # start from x^p in the residue field, digit-lifted
        xp = self.ff.pow(self.ff.undigits([0, 1] + [0] * (self.k - 2)), self.p)
        r = self.teichmuller_like_lift(xp)
        fp = self._fprime_eval(r)
        if self.val(fp) != 0:
            raise ValueError("modulus not separable mod p")
        for _ in range(self.m + 2):
            fr = self._f_eval(r)
            if self.is_zero(fr):
                break
            r = self.sub(r, self.mul(fr, self.unit_inverse(self._fprime_eval(r))))
        assert self.is_zero(self._f_eval(r)), "Hensel iteration failed"
        self.frob_root = r
        # matrix of phi: column i = r^i in the power basis
        cols = [self.one]
        for _ in range(1, self.k):
            cols.append(self.mul(cols[-1], r))
        self._frob_matrix = cols
        # inverse Frobenius = phi^(k-1), built by repeated application
        inv_cols = []
        for i in range(self.k):
            e = tuple(1 % self.pm if j == i else 0 for j in range(self.k))
            v = e
            for _ in range(self.k - 1):
                v = self._apply_matrix(self._frob_matrix, v)
            inv_cols.append(v)
        self._frob_matrix_inv = inv_cols

    def _apply_matrix(self, cols, a):
        out = self.zero
        for i, x in enumerate(a):
            if x:
                out = self.add(out, self.scal(x, cols[i]))
        return out

    def frobenius(self, a):
        if self.k == 1:
            return a
        return self._apply_matrix(self._frob_matrix, a)

    def frobenius_inv(self, a):
        if self.k == 1:
            return a
        return self._apply_matrix(self._frob_matrix_inv, a)

    def sqrt_unit(self, a):
        """Hensel square root of a unit whose residue is a square."""
        red = self.reduce_modp(a)
        s0 = self.ff.sqrt(red)
        if s0 is None:
            return None
        x = self.teichmuller_like_lift(s0)
        inv2 = self.unit_inverse(self.elem(2))
        for _ in range(self.m + 2):
            # x <- (x + a/x)/2
            x = self.mul(self.add(x, self.mul(a, self.unit_inverse(x))), inv2)
        if self.sub(self.mul(x, x), a) != self.zero:
            raise PrecisionError("sqrt lift failed")
        return x

    def random_element(self, rng):
        return tuple(rng.randrange(self.pm) for _ in range(self.k))

    def __repr__(self):
        return f"W_{self.m}(F_{self.p}^{self.k})"


class RamRing:
    """O_F tensor W_m(F_{p^k}): pairs a + b*pi over a WittRing, pi^2 = c
    with c = p * unit (unit = 1 or a lift of u).  v(pi) = 1, v(p) = 2."""

    def __init__(self, W: WittRing, uniformizer: str = "p", u: int | None = None):
        self.W = W
        self.uniformizer = uniformizer
        if uniformizer == "p":
            self.c_unit = W.one
        else:
            if u is None:
                u = smallest_nonresidue(W.p)
            self.c_unit = W.elem(u)
        self.c = W.scal(W.p, self.c_unit)  # the element pi^2 in W
        self.zero = (W.zero, W.zero)
        self.one = (W.one, W.zero)
        self.pi = (W.zero, W.one)

    def elem(self, a, b=0):
        W = self.W
        ea = a if isinstance(a, tuple) and len(a) == W.k else W.elem(a)
        eb = b if isinstance(b, tuple) and len(b) == W.k else W.elem(b)
        return (ea, eb)

    def add(self, x, y):
        W = self.W
        return (W.add(x[0], y[0]), W.add(x[1], y[1]))

    def neg(self, x):
        W = self.W
        return (W.neg(x[0]), W.neg(x[1]))

    def sub(self, x, y):
        W = self.W
        return (W.sub(x[0], y[0]), W.sub(x[1], y[1]))

    def mul(self, x, y):
        W = self.W
        a, b = x
        ap, bp = y
        return (W.add(W.mul(a, ap), W.mul(self.c, W.mul(b, bp))),
                W.add(W.mul(a, bp), W.mul(b, ap)))

    def is_zero(self, x):
        return self.W.is_zero(x[0]) and self.W.is_zero(x[1])

    def val(self, x):
        va = self.W.val(x[0])
        vb = self.W.val(x[1])
        va = INF if va == INF else 2 * va
        vb = INF if vb == INF else 2 * vb + 1
        return min(va, vb)

    def sigma(self, x):
        W = self.W
        return (W.frobenius(x[0]), W.frobenius(x[1]))

    def sigma_inv(self, x):
        W = self.W
        return (W.frobenius_inv(x[0]), W.frobenius_inv(x[1]))

    def conj(self, x):
        return (x[0], self.W.neg(x[1]))

    def div_pi(self, x):
        """x / pi, requires v(x) >= 1 (so the constant part is in pW)."""
        W = self.W
        a, b = x
        if not W.is_zero(a) and W.val(a) < 1:
            raise PrecisionError("division by pi of a unit-constant element")
        # (a + b pi)/pi = b + (a/c) pi
        return (b, W.div_exact(a, self.c))

    def unit_inverse(self, x):
        if self.val(x) != 0:
            raise ZeroDivisionError("not a unit")
        W = self.W
        a, b = x
        # (a + b pi)^(-1) = (a - b pi) / (a^2 - c b^2)
        nrm = W.sub(W.mul(a, a), W.mul(self.c, W.mul(b, b)))
        inv = W.unit_inverse(nrm)
        return (W.mul(a, inv), W.neg(W.mul(b, inv)))

    def __repr__(self):
        return f"RamRing({self.W}, pi^2={'p' if self.uniformizer == 'p' else 'u*p'})"


def frobenius_lift(p: int, k: int, m: int = 8) -> WittRing:
    """Construct W_m(F_{p^k}) with its stored Hensel Frobenius lift."""
    return WittRing(p, k, m)
