"""Exact arithmetic in truncated Witt rings of finite fields.

W_N(F_{p^d}) is modeled as (Z/p^N)[x]/(f) for a monic degree-d polynomial f
that is irreducible mod p, i.e. the unramified extension of Z_p of degree d
truncated at precision p^N.  Elements are coordinate vectors in the power
basis of f.  The ring comes with an exact Frobenius lift (the unique ring
automorphism reducing to the p-power map mod p), the Teichmuller section of
the residue field, and p-adic valuations capped at the working precision.

The modulus polynomial is the lexicographically smallest monic irreducible
of its degree (constant coefficient least significant), so every context is
reproducible from (p, d, N) alone.
"""

from __future__ import annotations

import json
from math import isqrt

# A single scalar may not exceed this many bits across its coordinates.
_CAPACITY_BITS = 1 << 21


class CapacityError(ValueError):
    """Raised when (p, d, N) would exceed the configured storage capacity."""


class NonInvertibleError(ArithmeticError):
    """Raised when inverting an element of positive valuation."""

    def __init__(self, valuation):
        self.valuation = valuation
        super().__init__(f"non-invertible, valuation {valuation}")


def default_precision(n, d):
    """Working precision used by the display-level drivers: 4*n*d + 8.

    Comfortably exceeds the total slope mass d*n of the linearized operator
    on a rank-2n module, so Newton polygon hull vertices stay far below the
    truncation level.
    """
    return 4 * n * d + 8


def _is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    for q in range(3, isqrt(p) + 1, 2):
        if p % q == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (lists, low degree first)


def _pstrip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pstrip(out)


def _pdivmod(a, b, p):
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    inv_lead = pow(b[-1], p - 2, p)
    quo = [0] * max(da - db + 1, 0)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        c = (a[-1] * inv_lead) % p
        quo[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _pstrip(a)
    return quo, a


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        _, r = _pdivmod(a, b, p)
        a, b = b, r
    return a


def _pext_inv(a, f, p):
    """Inverse of a modulo (f, p); a must be coprime to f."""
    r0, r1 = list(f), _pstrip(list(a))
    t0, t1 = [], [1]
    while r1:
        q, r = _pdivmod(r0, r1, p)
        r0, r1 = r1, r
        t2 = [0] * max(len(t0), len(q) + len(t1) - 1 if t1 else 0)
        qt1 = _pmul(q, t1, p)
        for i, c in enumerate(t0):
            t2[i] = c
        for i, c in enumerate(qt1):
            t2[i] = (t2[i] - c) % p
        t0, t1 = t1, _pstrip(t2)
    if len(r0) != 1:
        raise NonInvertibleError(0)
    c_inv = pow(r0[0], p - 2, p)
    return [(c * c_inv) % p for c in t0]


def _ppowmod(g, e, f, p):
    """g^e modulo (f, p) by square and multiply."""
    result = [1]
    base = _pdivmod(list(g), f, p)[1] if len(g) >= len(f) else _pstrip(list(g))
    while e > 0:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), f, p)[1]
        base = _pdivmod(_pmul(base, base, p), f, p)[1]
        e >>= 1
    return result


def _prime_factors(n):
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(f, p):
    """Rabin irreducibility test for a monic f over F_p."""
    d = len(f) - 1
    if d == 1:
        return True
    # x^(p^k) mod f, computed by iterating the p-power map
    xp = _ppowmod([0, 1], p, f, p)
    powers = {1: xp}
    t = xp
    for k in range(2, d + 1):
        # t <- t^p = t(x^p) since coefficients are in F_p
        acc = []
        for c in reversed(t):
            acc = _pdivmod(_pmul(acc, xp, p), f, p)[1] if acc else []
            if c:
                acc = _pstrip([(acc[0] + c) % p] + acc[1:]) if acc else [c]
        powers[k] = acc
        t = acc
    # x^(p^d) must equal x
    diff = list(powers[d])
    while len(diff) < 2:
        diff.append(0)
    diff[1] = (diff[1] - 1) % p
    if _pstrip(diff):
        return False
    for r in _prime_factors(d):
        g = list(powers[d // r])
        while len(g) < 2:
            g.append(0)
        g[1] = (g[1] - 1) % p
        g = _pstrip(g)
        gcd = _pgcd(f, g, p)
        if len(gcd) != 1:
            return False
    return True


def _first_irreducible(p, d):
    """Lexicographically smallest monic irreducible of degree d over F_p.

    Candidates are ordered by the integer sum(c_i * p^i) over the non-leading
    coefficients, so the constant coefficient varies fastest.
    """
    for k in range(p ** d):
        coeffs = [(k // p ** i) % p for i in range(d)]
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return tuple(coeffs)
    raise RuntimeError(f"no irreducible polynomial of degree {d} over F_{p}")


# ---------------------------------------------------------------------------
# ring context


class RingContext:
    """Immutable arithmetic context for W_N(F_{p^d}).

    All scalar operations reduce coordinates mod p^N and polynomial products
    modulo the modulus polynomial.  Construction precomputes the reduction
    table for x^d..x^(2d-2) and the power-basis images of all Frobenius
    iterates, so Frobenius twists are plain linear maps afterwards.
    """

    __slots__ = ("p", "d", "N", "q", "modulus", "_red", "_red_p", "_frob",
                 "_prec_cache")

    def __init__(self, p, d, N, modulus):
        self.p = p
        self.d = d
        self.N = N
        self.q = p ** N
        self.modulus = tuple(int(c) for c in modulus)
        if len(self.modulus) != d:
            raise ValueError("modulus must list the d non-leading coefficients")
        if any(not 0 <= c < p for c in self.modulus):
            raise ValueError("modulus coefficients must lie in [0, p)")
        if not _is_irreducible(list(self.modulus) + [1], p):
            raise ValueError("modulus is reducible mod p")
        self._prec_cache = {}
        self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _build_tables(self):
        d, q = self.d, self.q
        # x^(d+k) mod f for k = 0..d-2
        red = []
        if d > 1:
            row = tuple((-c) % q for c in self.modulus)
            red.append(row)
            for _ in range(d - 2):
                prev = red[-1]
                top = prev[d - 1]
                row = tuple(((prev[i - 1] if i else 0) + top * red[0][i]) % q
                            for i in range(d))
                red.append(row)
        self._red = tuple(red)
        self._red_p = tuple(tuple(c % self.p for c in row) for row in red)
        # power-basis images of sigma^k for k = 0..d-1
        ident = tuple(tuple(1 if i == j else 0 for j in range(d))
                      for i in range(d))
        if d == 1:
            self._frob = (ident,)
            return
        theta_p = self._wpow(ident[1], self.p)
        y = self._hensel_root(theta_p)
        tab1 = [ident[0]]
        for _ in range(d - 1):
            tab1.append(self._wmul(tab1[-1], y))
        tables = [ident, tuple(tab1)]
        for _ in range(d - 2):
            prev = tables[-1]
            tables.append(tuple(self._apply_lin(tables[1], v) for v in prev))
        self._frob = tuple(tables)

    def _hensel_root(self, y):
        """Lift y to the root of the modulus congruent to it mod p."""
        d, q = self.d, self.q
        f_coeffs = list(self.modulus) + [1]
        fprime = [(i * c) % q for i, c in enumerate(f_coeffs)][1:]

        def horner(coeffs, x):
            acc = (0,) * d
            for c in reversed(coeffs):
                acc = self._wmul(acc, x)
                acc = (acc[0] + c,) + acc[1:] if d > 1 else ((acc[0] + c) % q,)
                acc = tuple(v % q for v in acc)
            return acc

        zero = (0,) * d
        for _ in range(self.N + 2):
            fy = horner(f_coeffs, y)
            if fy == zero:
                return y
            dz = self._winv(horner(fprime, y))
            step = self._wmul(fy, dz)
            y = tuple((a - b) % q for a, b in zip(y, step))
        raise RuntimeError("Frobenius lift did not converge")

    # -- raw coordinate kernels ----------------------------------------------

    def _wmul(self, a, b):
        d, q = self.d, self.q
        if d == 1:
            return ((a[0] * b[0]) % q,)
        conv = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        out = conv[:d]
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = self._red[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return tuple(v % q for v in out)

    def _wpow(self, a, e):
        result = (1,) + (0,) * (self.d - 1)
        base = a
        while e > 0:
            if e & 1:
                result = self._wmul(result, base)
            base = self._wmul(base, base)
            e >>= 1
        return result

    def _wval(self, coords):
        p, N = self.p, self.N
        best = N
        for c in coords:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                if v < best:
                    best = v
                if best == 0:
                    return 0
        return best

    def _winv(self, a):
        v = self._wval(a)
        if v > 0:
            raise NonInvertibleError(v)
        p, q = self.p, self.q
        a_bar = _pstrip([c % p for c in a])
        inv_bar = _pext_inv(a_bar, list(self.modulus) + [1], p)
        b = tuple(inv_bar[i] if i < len(inv_bar) else 0 for i in range(self.d))
        one = (1,) + (0,) * (self.d - 1)
        for _ in range(self.N.bit_length() + 2):
            t = self._wmul(a, b)
            if t == one:
                return b
            two_minus = tuple(((2 if i == 0 else 0) - c) % q
                              for i, c in enumerate(t))
            b = self._wmul(b, two_minus)
        raise RuntimeError("inverse iteration did not converge")

    def _apply_lin(self, table, coords):
        """Linear combination sum_i coords[i] * table[i], reduced mod p^N."""
        d, q = self.d, self.q
        out = [0] * d
        for i, c in enumerate(coords):
            if c:
                row = table[i]
                for j in range(d):
                    out[j] += c * row[j]
        return tuple(v % q for v in out)

    def frobenius_coords(self, coords, power=1):
        power %= self.d
        if power == 0:
            return tuple(coords)
        return self._apply_lin(self._frob[power], coords)

    # -- public constructors --------------------------------------------------

    def zero(self):
        return PadicScalar(self, (0,) * self.d)

    def one(self):
        return PadicScalar(self, (1,) + (0,) * (self.d - 1))

    def from_int(self, k):
        return PadicScalar(self, (k % self.q,) + (0,) * (self.d - 1))

    def scalar(self, coords):
        return PadicScalar(self, coords)

    def field(self, coords):
        return FieldElement(self, coords)

    def field_from_int(self, k):
        """Decode an integer in [0, p^d) into base-p field coordinates."""
        if not 0 <= k < self.p ** self.d:
            raise ValueError(f"field element code {k} out of range [0, p^d)")
        return FieldElement(self, tuple((k // self.p ** i) % self.p
                                        for i in range(self.d)))

    def teichmuller(self, a):
        """Multiplicative lift of a residue field element.

        Iterates y -> y^(p^d) from the coordinate lift until stable, which
        takes at most N steps; the result is the unique solution of
        x^(p^d) = x with the given reduction.
        """
        if isinstance(a, PadicScalar):
            a = a.reduce_mod_p()
        if not isinstance(a, FieldElement):
            raise TypeError("teichmuller expects a residue field element")
        y = tuple(a.coords)
        zero = (0,) * self.d
        if y == zero:
            return PadicScalar(self, y)
        e = self.p ** self.d
        for _ in range(self.N + 2):
            y2 = self._wpow(y, e)
            if y2 == y:
                return PadicScalar(self, y)
            y = y2
        raise RuntimeError("Teichmuller iteration did not converge")

    def at_precision(self, N2):
        """Same extension at a different truncation level."""
        if N2 == self.N:
            return self
        cached = self._prec_cache.get(N2)
        if cached is None:
            cached = RingContext(self.p, self.d, N2, self.modulus)
            self._prec_cache[N2] = cached
        return cached

    # -- identity and serialization -------------------------------------------

    def params(self):
        return (self.p, self.d, self.N, self.modulus)

    def residue_params(self):
        return (self.p, self.d, self.modulus)

    def __eq__(self, other):
        return isinstance(other, RingContext) and self.params() == other.params()

    def __hash__(self):
        return hash(self.params())

    def __repr__(self):
        return f"RingContext(p={self.p}, d={self.d}, N={self.N})"

    def to_json(self):
        return {"p": self.p, "d": self.d, "N": self.N,
                "modulus": list(self.modulus) + [1]}


def context_from_json(obj):
    coeffs = obj["modulus"]
    if coeffs[-1] != 1:
        raise ValueError("modulus must be monic")
    return RingContext(obj["p"], obj["d"], obj["N"], coeffs[:-1])


def make_context(p, d, N):
    """Context for W_N(F_{p^d}) with the canonical modulus polynomial.

    Deterministic across runs: the modulus is the lexicographically smallest
    monic degree-d polynomial over F_p that is irreducible, lifted with
    coefficients in [0, p).
    """
    if not isinstance(p, int) or not _is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    bits = d * N * p.bit_length()
    if bits > _CAPACITY_BITS:
        raise CapacityError(
            f"capacity exceeded: a scalar for (p={p}, d={d}, N={N}) needs "
            f"about {bits} bits, limit is {_CAPACITY_BITS}")
    return RingContext(p, d, N, _first_irreducible(p, d))


# ---------------------------------------------------------------------------
# elements


class PadicScalar:
    """Element of W_N(F_{p^d}): a coordinate vector in the power basis."""

    __slots__ = ("ctx", "coords")

    def __init__(self, ctx, coords):
        self.ctx = ctx
        q = ctx.q
        self.coords = tuple(int(c) % q for c in coords)
        if len(self.coords) != ctx.d:
            raise ValueError("coordinate vector has wrong length")

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.ctx.params() != self.ctx.params():
                raise ValueError("scalars from different contexts")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        q = self.ctx.q
        return PadicScalar(self.ctx, tuple((a + b) % q for a, b in
                                           zip(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        q = self.ctx.q
        return PadicScalar(self.ctx, tuple((a - b) % q for a, b in
                                           zip(self.coords, other.coords)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        q = self.ctx.q
        return PadicScalar(self.ctx, tuple((-a) % q for a in self.coords))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PadicScalar(self.ctx, self.ctx._wmul(self.coords, other.coords))

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; the element must be a unit."""
        return PadicScalar(self.ctx, self.ctx._winv(self.coords))

    def frobenius(self, power=1):
        """The Frobenius lift: reduces to the p-power map mod p and has
        exact order d."""
        return PadicScalar(self.ctx, self.ctx.frobenius_coords(self.coords,
                                                               power))

    def valuation(self):
        """Largest v <= N with x = 0 mod p^v; the value N is the ">= N"
        sentinel and consumers must treat it as possibly nonzero beyond
        the working precision."""
        return self.ctx._wval(self.coords)

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_unit(self):
        return self.ctx._wval(self.coords) == 0

    def reduce_mod_p(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple(c % p for c in self.coords))

    def to_json(self):
        return {"coords": [str(c) for c in self.coords]}

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.from_int(other)
        return (isinstance(other, PadicScalar)
                and self.ctx.params() == other.ctx.params()
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.ctx.params(), self.coords))

    def __repr__(self):
        return f"W({list(self.coords)})"


def scalar_from_json(ctx, obj):
    return PadicScalar(ctx, tuple(int(c) for c in obj["coords"]))


class FieldElement:
    """Element of the residue field F_{p^d} of a context."""

    __slots__ = ("ctx", "coords")

    def __init__(self, ctx, coords):
        self.ctx = ctx
        p = ctx.p
        self.coords = tuple(int(c) % p for c in coords)
        if len(self.coords) != ctx.d:
            raise ValueError("coordinate vector has wrong length")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx.residue_params() != self.ctx.residue_params():
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return FieldElement(self.ctx, (other,) + (0,) * (self.ctx.d - 1))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a + b) % p for a, b in
                                            zip(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a - b) % p for a, b in
                                            zip(self.coords, other.coords)))

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((-a) % p for a in self.coords))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ctx, p, d = self.ctx, self.ctx.p, self.ctx.d
        if d == 1:
            return FieldElement(ctx, ((self.coords[0] * other.coords[0]) % p,))
        conv = [0] * (2 * d - 1)
        for i, ai in enumerate(self.coords):
            if ai:
                for j, bj in enumerate(other.coords):
                    conv[i + j] += ai * bj
        out = conv[:d]
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = ctx._red_p[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return FieldElement(ctx, tuple(v % p for v in out))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise NonInvertibleError(1)
        inv = _pext_inv(_pstrip(list(self.coords)),
                        list(self.ctx.modulus) + [1], self.ctx.p)
        return FieldElement(self.ctx, tuple(
            inv[i] if i < len(inv) else 0 for i in range(self.ctx.d)))

    def __pow__(self, e):
        result = FieldElement(self.ctx, (1,) + (0,) * (self.ctx.d - 1))
        base = self
        if e < 0:
            base = base.inverse()
            e = -e
        while e > 0:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __bool__(self):
        return not self.is_zero()

    def to_int(self):
        """Encode as sum(c_i * p^i), the inverse of field_from_int."""
        return sum(c * self.ctx.p ** i for i, c in enumerate(self.coords))

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        return (isinstance(other, FieldElement)
                and self.ctx.residue_params() == other.ctx.residue_params()
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.ctx.residue_params(), self.coords))

    def __repr__(self):
        return f"F({list(self.coords)})"


def dumps_context(ctx):
    return json.dumps(ctx.to_json())
