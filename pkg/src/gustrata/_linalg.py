"""Matrix kernels over truncated Witt rings.

Internal module: division-free characteristic polynomials (Berkowitz),
Frobenius-twisted matrix products, adjugate columns via Cayley-Hamilton,
lower convex hulls for Newton polygons, and mod-p linear algebra.  Raw
coordinate data (plain ints when d == 1, coordinate tuples otherwise) is
used throughout; the coefficient ring Z/p^N has zero divisors, so nothing
here divides by a non-unit.
"""

from __future__ import annotations

from fractions import Fraction
from operator import mul as _int_mul


class PrecisionError(ArithmeticError):
    """A result is not determined at the working precision."""


class _IntOps:
    """Raw arithmetic for d == 1: scalars are plain ints mod p^N."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.p = ctx.p
        self.q = ctx.q
        self.cap = ctx.N
        self.zero = 0
        self.one = 1

    def unwrap(self, scalar):
        return scalar.coords[0]

    def wrap(self, raw):
        return self.ctx.scalar((raw,))

    def neg(self, a):
        return (-a) % self.q

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def dot(self, u, v):
        return sum(map(_int_mul, u, v)) % self.q

    def is_zero(self, a):
        return a == 0

    def val(self, a):
        if a == 0:
            return self.cap
        p, v = self.p, 0
        while a % p == 0:
            a //= p
            v += 1
        return min(v, self.cap)

    def frob(self, a, power=1):
        return a

    def divexact_p(self, a, k):
        return a // self.p ** k

    def mod_p(self, a):
        return (a % self.p,)


class _ExtOps:
    """Raw arithmetic for d >= 2: scalars are length-d coordinate tuples."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.p = ctx.p
        self.q = ctx.q
        self.d = ctx.d
        self.cap = ctx.N
        self.zero = (0,) * ctx.d
        self.one = (1,) + (0,) * (ctx.d - 1)

    def unwrap(self, scalar):
        return scalar.coords

    def wrap(self, raw):
        return self.ctx.scalar(raw)

    def neg(self, a):
        q = self.q
        return tuple((-c) % q for c in a)

    def add(self, a, b):
        q = self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub(self, a, b):
        q = self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def _reduce(self, conv):
        d, q = self.d, self.q
        out = list(conv[:d])
        red = self.ctx._red
        for k in range(d, len(conv)):
            c = conv[k]
            if c:
                row = red[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return tuple(v % q for v in out)

    def mul(self, a, b):
        d = self.d
        conv = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        return self._reduce(conv)

    def dot(self, u, v):
        d = self.d
        conv = [0] * (2 * d - 1)
        for a, b in zip(u, v):
            for i in range(d):
                ai = a[i]
                if ai:
                    for j in range(d):
                        bj = b[j]
                        if bj:
                            conv[i + j] += ai * bj
        return self._reduce(conv)

    def is_zero(self, a):
        return all(c == 0 for c in a)

    def val(self, a):
        return self.ctx._wval(a)

    def frob(self, a, power=1):
        return self.ctx.frobenius_coords(a, power)

    def divexact_p(self, a, k):
        pk = self.p ** k
        return tuple(c // pk for c in a)

    def mod_p(self, a):
        p = self.p
        return tuple(c % p for c in a)


def ops_for(ctx):
    return _IntOps(ctx) if ctx.d == 1 else _ExtOps(ctx)


# ---------------------------------------------------------------------------
# matrices (lists of rows of raw scalars)


def unwrap_matrix(ops, rows_of_scalars):
    return [[ops.unwrap(s) for s in row] for row in rows_of_scalars]


def wrap_matrix(ops, rows):
    return tuple(tuple(ops.wrap(e) for e in row) for row in rows)


def mat_vec(ops, rows, v):
    return [ops.dot(row, v) for row in rows]


def mat_mul(ops, a, b):
    cols = list(zip(*b))
    return [[ops.dot(row, col) for col in cols] for row in a]


def frob_matrix(ops, rows, power):
    return [[ops.frob(e, power) for e in row] for row in rows]


def twisted_product(ops, rows, d):
    """A * sigma(A) * ... * sigma^(d-1)(A), the d-fold linearization of a
    sigma-semilinear operator with matrix A."""
    out = rows
    for k in range(1, d):
        out = mat_mul(ops, out, frob_matrix(ops, rows, k))
    return out


def charpoly(ops, rows):
    """Coefficients of det(xI - M), low degree first, by the Berkowitz
    algorithm (division-free, sound over Z/p^N)."""
    r = len(rows)
    if r == 0:
        return [ops.one]
    poly = [ops.one, ops.neg(rows[0][0])]  # high degree first while iterating
    for k in range(2, r + 1):
        km1 = k - 1
        sub = [row[:km1] for row in rows[:km1]]
        rvec = [ops.neg(rows[km1][j]) for j in range(km1)]
        cvec = [rows[i][km1] for i in range(km1)]
        items = [ops.one, ops.neg(rows[km1][km1]), ops.dot(rvec, cvec)]
        w = cvec
        for _ in range(k - 2):
            w = [ops.dot(sub_row, w) for sub_row in sub]
            items.append(ops.dot(rvec, w))
        new = []
        for i in range(k + 1):
            acc = ops.zero
            for j in range(max(0, i - k), min(i, km1) + 1):
                acc = ops.add(acc, ops.mul(items[i - j], poly[j]))
            new.append(acc)
        poly = new
    poly.reverse()
    return poly


def adjugate_action(ops, rows, cp):
    """Matrix B = sum_{k>=1} c_k M^(k-1) with M * B = -c_0 * I, from the
    characteristic polynomial cp of M (Cayley-Hamilton)."""
    r = len(rows)
    cols = []
    for j in range(r):
        w = [ops.zero] * r
        w[j] = ops.one
        col = [ops.mul(cp[1], e) for e in w]
        for k in range(2, r + 1):
            w = mat_vec(ops, rows, w)
            ck = cp[k]
            col = [ops.add(c, ops.mul(ck, e)) for c, e in zip(col, w)]
        cols.append(col)
    return [[cols[j][i] for j in range(r)] for i in range(r)]


# ---------------------------------------------------------------------------
# Newton polygons of p-adic polynomials


def lower_hull(points):
    """Vertices of the lower convex hull of points with ascending x."""
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def charpoly_slope_pairs(ops, cp, twist):
    """(slope, multiplicity) pairs of the p-adic Newton polygon of cp, with
    every root valuation divided by twist.

    Raises PrecisionError when a hull vertex sits at the valuation cap: the
    polygon is then not determined at this precision.
    """
    cap = ops.cap
    vals = [ops.val(c) for c in cp]
    hull = lower_hull(list(enumerate(vals)))
    for (i, v) in hull:
        if v >= cap:
            raise PrecisionError(
                f"insufficient precision: hull vertex at degree {i} has "
                f"valuation >= {cap}")
    pairs = []
    for (i1, v1), (i2, v2) in zip(hull, hull[1:]):
        pairs.append((Fraction(v1 - v2, (i2 - i1) * twist), i2 - i1))
    return pairs


# ---------------------------------------------------------------------------
# linear algebra over F_p and F_{p^d}


def gf_rank(rows, p):
    """Rank of an integer matrix over F_p (destructive on a copy)."""
    m = [[e % p for e in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    row_idx = 0
    for col in range(ncols):
        pivot = None
        for i in range(row_idx, len(m)):
            if m[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        m[row_idx], m[pivot] = m[pivot], m[row_idx]
        inv = pow(m[row_idx][col], p - 2, p)
        m[row_idx] = [(e * inv) % p for e in m[row_idx]]
        for i in range(len(m)):
            if i != row_idx and m[i][col]:
                c = m[i][col]
                m[i] = [(a - c * b) % p for a, b in zip(m[i], m[row_idx])]
        row_idx += 1
        rank += 1
        if row_idx == len(m):
            break
    return rank


def gf_mult_matrix(coords, ctx):
    """d x d matrix over F_p of multiplication by a residue field element."""
    p, d = ctx.p, ctx.d
    cols = []
    for s in range(d):
        conv = [0] * (s + d)
        for i, c in enumerate(coords):
            conv[s + i] = c % p
        out = conv[:d] + [0] * (d - len(conv[:d]))
        for k in range(d, len(conv)):
            c = conv[k]
            if c:
                row = ctx._red_p[k - d]
                for i in range(d):
                    out[i] = (out[i] + c * row[i]) % p
        cols.append(out)
    return [[cols[s][t] for s in range(d)] for t in range(d)]


def gf_blowup(coord_rows, ctx, sigma_power=None):
    """F_p matrix of the map x -> M.sigma^k(x) on F_{p^d}-coordinate vectors.

    coord_rows holds residue field elements as coordinate tuples; the result
    is the (rows*d) x (cols*d) matrix acting on stacked F_p coordinates.
    """
    p, d = ctx.p, ctx.d
    nr = len(coord_rows)
    nc = len(coord_rows[0]) if nr else 0
    sig = None
    if sigma_power is not None and sigma_power % d != 0:
        tab = ctx._frob[sigma_power % d]
        sig = [[tab[s][t] % p for s in range(d)] for t in range(d)]
    big = [[0] * (nc * d) for _ in range(nr * d)]
    for i in range(nr):
        for j in range(nc):
            coords = coord_rows[i][j]
            if all(c % p == 0 for c in coords):
                continue
            block = gf_mult_matrix(coords, ctx)
            if sig is not None:
                block = [[sum(block[t][u] * sig[u][s] for u in range(d)) % p
                          for s in range(d)] for t in range(d)]
            for t in range(d):
                row = big[i * d + t]
                bt = block[t]
                for s in range(d):
                    row[j * d + s] = bt[s]
    return big
