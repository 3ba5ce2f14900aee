"""Displayed Dieudonne modules and their isogeny invariants.

A display fixes a basis split into u- and v-graded families, the matrix of
the sigma-semilinear operator F (column j = coordinates of F applied to
basis vector j), and the Gram matrix of the quasipolarization.  V is never
stored: it is derived from F via F V = V F = p, so that relation holds by
construction once integrality of p * A^(-1) is checked.

Newton slopes are computed from the p-adic Newton polygon of the
characteristic polynomial of the d-fold twisted product
A * sigma(A) * ... * sigma^(d-1)(A), divided by d.  Every polygon is
recomputed at doubled precision and must agree, otherwise the computation
fails instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _linalg
from ._linalg import PrecisionError, ops_for
from .wittring import context_from_json, scalar_from_json

__all__ = [
    "BasisLabel", "NewtonPolygon", "DieudonneDisplay", "ValidationReport",
    "CheckResult", "PrecisionError", "validate_display", "newton_slopes",
    "polarization_check", "a_number", "p_rank", "signature",
    "display_from_json",
]


@dataclass(frozen=True, order=True)
class BasisLabel:
    """A basis vector name: family 'u' or 'v' plus a nonnegative index."""
    family: str
    index: int

    def __str__(self):
        return f"{self.family}{self.index}"

    @classmethod
    def parse(cls, text):
        family, index = text[0], text[1:]
        if family not in ("u", "v") or not index.isdigit():
            raise ValueError(f"bad basis label {text!r}")
        return cls(family, int(index))


def U(i):
    return BasisLabel("u", i)


def V(i):
    return BasisLabel("v", i)


class NewtonPolygon:
    """Multiset of rational slopes in [0, 1], kept sorted ascending."""

    __slots__ = ("slopes",)

    def __init__(self, pairs):
        merged = {}
        for slope, mult in pairs:
            slope = Fraction(slope)
            if mult <= 0:
                raise ValueError("multiplicities must be positive")
            merged[slope] = merged.get(slope, 0) + int(mult)
        object.__setattr__(self, "slopes",
                           tuple(sorted(merged.items())))

    def __setattr__(self, name, value):
        raise AttributeError("NewtonPolygon is immutable")

    @property
    def rank(self):
        return sum(m for _, m in self.slopes)

    def min_slope(self):
        return self.slopes[0][0]

    def multiplicity(self, slope):
        slope = Fraction(slope)
        for s, m in self.slopes:
            if s == slope:
                return m
        return 0

    def slope_sum(self):
        return sum(s * m for s, m in self.slopes)

    def is_symmetric(self):
        return all(self.multiplicity(1 - s) == m for s, m in self.slopes)

    def has_integral_breakpoints(self):
        return all(m % s.denominator == 0 for s, m in self.slopes)

    def in_unit_interval(self):
        return all(0 <= s <= 1 for s, _ in self.slopes)

    def union(self, other):
        return NewtonPolygon(list(self.slopes) + list(other.slopes))

    def to_json(self):
        return {"slopes": [{"num": s.numerator, "den": s.denominator,
                            "mult": m} for s, m in self.slopes]}

    @classmethod
    def from_json(cls, obj):
        return cls([(Fraction(e["num"], e["den"]), e["mult"])
                    for e in obj["slopes"]])

    def __eq__(self, other):
        return isinstance(other, NewtonPolygon) and self.slopes == other.slopes

    def __hash__(self):
        return hash(self.slopes)

    def __repr__(self):
        inner = ", ".join(f"{s} x {m}" for s, m in self.slopes)
        return f"NewtonPolygon({inner})"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: tuple = ()

    def to_json(self):
        return {"name": self.name, "passed": self.passed,
                "details": list(self.details)}


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}


class DieudonneDisplay:
    """One quasipolarized module with an action splitting it into u/v parts.

    Immutable after construction; invariant computations are cached.
    """

    def __init__(self, ctx, basis, columns, pairing, summands=None):
        self.ctx = ctx
        self.basis = tuple(basis)
        rank = len(self.basis)
        if len(set(self.basis)) != rank:
            raise ValueError("basis labels must be distinct")
        if any(b.family not in ("u", "v") for b in self.basis):
            raise ValueError("basis families must be 'u' or 'v'")
        if len(columns) != rank or any(len(c) != rank for c in columns):
            raise ValueError("frobenius matrix shape mismatch")
        if len(pairing) != rank or any(len(r) != rank for r in pairing):
            raise ValueError("pairing matrix shape mismatch")
        self.frobenius = tuple(tuple(columns[j][i] for j in range(rank))
                               for i in range(rank))  # stored by rows
        self.pairing = tuple(tuple(row) for row in pairing)
        self.summands = summands
        self._cache = {}

    # -- shape ----------------------------------------------------------------

    @property
    def rank(self):
        return len(self.basis)

    @property
    def half_rank(self):
        return len(self.basis) // 2

    @property
    def u_indices(self):
        return tuple(i for i, b in enumerate(self.basis) if b.family == "u")

    @property
    def v_indices(self):
        return tuple(i for i, b in enumerate(self.basis) if b.family == "v")

    def entry(self, i, j):
        return self.frobenius[i][j]

    def column(self, j):
        return tuple(self.frobenius[i][j] for i in range(self.rank))

    def label_index(self, label):
        return self.basis.index(label)

    # -- cached raw data --------------------------------------------------------

    def _ops(self):
        ops = self._cache.get("ops")
        if ops is None:
            ops = ops_for(self.ctx)
            self._cache["ops"] = ops
        return ops

    def _raw_frobenius(self):
        raw = self._cache.get("rawA")
        if raw is None:
            raw = _linalg.unwrap_matrix(self._ops(), self.frobenius)
            self._cache["rawA"] = raw
        return raw

    def _charpoly_frobenius(self):
        """Characteristic polynomial of the (untwisted) matrix of F."""
        cp = self._cache.get("cpA")
        if cp is None:
            cp = _linalg.charpoly(self._ops(), self._raw_frobenius())
            self._cache["cpA"] = cp
        return cp

    def _verschiebung(self):
        """(context, matrix rows) of V = sigma^(-1)(p A^(-1)).

        Dividing by det(A) = p^v * unit costs v - 1 digits of precision, so
        the result lives at precision N - v + 1.  Raises PrecisionError when
        A is singular mod p^N and ValueError when p A^(-1) is not integral.
        """
        cached = self._cache.get("vmat")
        if cached is not None:
            return cached
        ops = self._ops()
        ctx = self.ctx
        cp = self._charpoly_frobenius()
        c0 = cp[0]
        v = ops.val(c0)
        if v >= ctx.N:
            raise PrecisionError("V not computable at this precision")
        adj = _linalg.adjugate_action(ops, self._raw_frobenius(), cp)
        bad = [(i, j) for i, row in enumerate(adj) for j, e in enumerate(row)
               if ops.val(e) < v - 1]
        if bad:
            raise ValueError(
                f"p*A^(-1) is not integral (first offending entry {bad[0]})")
        nv = ctx.N - v + 1
        ctx_v = ctx.at_precision(nv)
        ops_v = ops_for(ctx_v)
        u_unit = ops.divexact_p(c0, v)
        u_scalar = ctx_v.scalar((u_unit,) if ctx.d == 1 else u_unit)
        u_inv_raw = ops_v.unwrap(u_scalar.inverse())
        d = ctx.d
        rows = []
        for row in adj:
            out = []
            for e in row:
                # p * B_ij / p^v, exact on the integer coordinates
                if v >= 1:
                    w = ops.divexact_p(e, v - 1)
                elif d == 1:
                    w = e * ctx.p
                else:
                    w = tuple(c * ctx.p for c in e)
                w_raw = (w % ctx_v.q) if d == 1 else tuple(
                    c % ctx_v.q for c in w)
                t = ops_v.neg(ops_v.mul(w_raw, u_inv_raw))
                out.append(ops_v.frob(t, d - 1))
            rows.append(out)
        cached = (ctx_v, rows)
        self._cache["vmat"] = cached
        return cached

    def verschiebung_matrix(self):
        """Matrix of V as (context at reduced precision, rows of scalars)."""
        ctx_v, rows = self._verschiebung()
        return ctx_v, _linalg.wrap_matrix(ops_for(ctx_v), rows)

    # -- semilinear application (mainly for tests and diagnostics) -------------

    def apply_frobenius(self, vec):
        """F(sum x_j e_j) = sum_i (sum_j A_ij sigma(x_j)) e_i."""
        twisted = [x.frobenius() for x in vec]
        return tuple(
            sum((self.frobenius[i][j] * twisted[j] for j in range(self.rank)),
                self.ctx.zero())
            for i in range(self.rank))

    def apply_verschiebung(self, vec):
        """V(sum x_j e_j) at the reduced precision of the derived V."""
        ctx_v, rows = self._verschiebung()
        ops_v = ops_for(ctx_v)
        twisted = [ctx_v.frobenius_coords(x.coords, ctx_v.d - 1)
                   for x in vec]
        raws = [ops_v.unwrap(ctx_v.scalar(t)) for t in twisted]
        out = _linalg.mat_vec(ops_v, rows, raws)
        return tuple(ops_v.wrap(e) for e in out)

    # -- serialization ----------------------------------------------------------

    def to_json(self):
        rank = self.rank
        return {
            "context": self.ctx.to_json(),
            "basis": [str(b) for b in self.basis],
            "frobenius": [[self.frobenius[i][j].to_json()
                           for i in range(rank)] for j in range(rank)],
            "pairing": [[e.to_json() for e in row] for row in self.pairing],
            "grading": {"u": list(self.u_indices), "v": list(self.v_indices)},
        }

    def __eq__(self, other):
        return (isinstance(other, DieudonneDisplay)
                and self.ctx.params() == other.ctx.params()
                and self.basis == other.basis
                and self.frobenius == other.frobenius
                and self.pairing == other.pairing)

    def __repr__(self):
        return (f"DieudonneDisplay(rank={self.rank}, "
                f"p={self.ctx.p}, d={self.ctx.d}, N={self.ctx.N})")

    # -- invariants --------------------------------------------------------------

    def validate(self):
        return validate_display(self)

    def newton_slopes(self, certify=True):
        return newton_slopes(self, certify=certify)

    def polarization_check(self):
        return polarization_check(self)

    def a_number(self):
        return a_number(self)

    def p_rank(self):
        return p_rank(self)

    def signature(self):
        return signature(self)


def display_from_json(obj, ctx=None):
    if ctx is None:
        ctx = context_from_json(obj["context"])
    basis = [BasisLabel.parse(t) for t in obj["basis"]]
    columns = [[scalar_from_json(ctx, e) for e in col]
               for col in obj["frobenius"]]
    pairing = [[scalar_from_json(ctx, e) for e in row]
               for row in obj["pairing"]]
    disp = DieudonneDisplay(ctx, basis, columns, pairing)
    grading = obj.get("grading")
    if grading is not None:
        if (tuple(grading["u"]) != disp.u_indices
                or tuple(grading["v"]) != disp.v_indices):
            raise ValueError("grading does not match basis families")
    return disp


# ---------------------------------------------------------------------------
# operations


def validate_display(display):
    """Check the display axioms; each failure reports offending entries."""
    ops = display._ops()
    ctx = display.ctx
    rank = display.rank
    raw = display._raw_frobenius()
    checks = []

    checks.append(CheckResult("frobenius_integral", True,
                              ("entries live in W_N by construction",)))

    try:
        cp = display._charpoly_frobenius()
        det_val = ops.val(cp[0])
        singular = det_val >= ctx.N
    except PrecisionError:
        singular = True
        det_val = ctx.N
    if singular:
        checks.append(CheckResult(
            "frobenius_invertible", False,
            ("V not computable at this precision",)))
        checks.append(CheckResult(
            "verschiebung_integral", False,
            ("skipped: V not computable at this precision",)))
    else:
        checks.append(CheckResult("frobenius_invertible", True,
                                  (f"val det = {det_val}",)))
        adj = _linalg.adjugate_action(ops, raw, cp)
        bad = [(i, j, ops.val(e)) for i, row in enumerate(adj)
               for j, e in enumerate(row) if ops.val(e) < det_val - 1]
        checks.append(CheckResult(
            "verschiebung_integral", not bad,
            tuple(f"entry ({i},{j}) valuation {v} < {det_val - 1}"
                  for i, j, v in bad[:8])))

    bad_alt = []
    for i in range(rank):
        if not display.pairing[i][i].is_zero():
            bad_alt.append((i, i))
        for j in range(i + 1, rank):
            if not (display.pairing[i][j] + display.pairing[j][i]).is_zero():
                bad_alt.append((i, j))
    checks.append(CheckResult(
        "pairing_alternating", not bad_alt,
        tuple(f"entry ({i},{j})" for i, j in bad_alt[:8])))

    raw_j = _linalg.unwrap_matrix(ops, display.pairing)
    cp_j = _linalg.charpoly(ops, raw_j)
    det_j_val = ops.val(cp_j[0])
    checks.append(CheckResult(
        "pairing_unimodular", det_j_val == 0,
        () if det_j_val == 0 else (f"val det J = {det_j_val}",)))

    bad_grading = [
        (i, j) for i in range(rank) for j in range(rank)
        if display.basis[i].family == display.basis[j].family
        and not display.frobenius[i][j].is_zero()]
    checks.append(CheckResult(
        "grading_block_antidiagonal", not bad_grading,
        tuple(f"entry ({i},{j})" for i, j in bad_grading[:8])))

    return ValidationReport(tuple(checks))


def newton_slopes(display, certify=True):
    """Newton polygon of the display.

    Computes the characteristic polynomial of the d-fold twisted product of
    the F-matrix (division-free), takes the lower hull of coefficient
    valuations, and divides all slopes by d.  With certify=True (the
    default) the same integer entries are recomputed at precision 2N and
    the polygons must agree bit for bit.
    """
    cached = display._cache.get(("slopes", certify))
    if cached is not None:
        return cached
    poly = _slopes_at(display.ctx, display._raw_frobenius())
    if certify:
        ctx2 = display.ctx.at_precision(2 * display.ctx.N)
        poly2 = _slopes_at(ctx2, display._raw_frobenius())
        if poly2 != poly:
            raise PrecisionError(
                "slopes unstable under precision doubling: "
                f"{poly!r} at N={display.ctx.N} vs {poly2!r} at 2N")
    display._cache[("slopes", certify)] = poly
    return poly


def _slopes_at(ctx, raw_rows):
    ops = ops_for(ctx)
    pi = _linalg.twisted_product(ops, raw_rows, ctx.d)
    cp = _linalg.charpoly(ops, pi)
    return NewtonPolygon(_linalg.charpoly_slope_pairs(ops, cp, ctx.d))


def polarization_check(display):
    """Violations of <F e_i, e_j> = sigma(<e_i, V e_j>) over all basis pairs.

    V is only determined at precision N - val(det A) + 1, so discrepancies
    are measured there.  Returns (label_i, label_j, discrepancy) triples;
    an empty list means the pairing is compatible with F and V.
    """
    ctx_v, vrows = display._verschiebung()
    ops_v = ops_for(ctx_v)
    qv = ctx_v.q
    rank = display.rank

    def shrink(scalar):
        if ctx_v.d == 1:
            return scalar.coords[0] % qv
        return tuple(c % qv for c in scalar.coords)

    raw_a = [[shrink(e) for e in row] for row in display.frobenius]
    raw_j = [[shrink(e) for e in row] for row in display.pairing]

    lhs = _linalg.mat_mul(ops_v, [[raw_a[k][i] for k in range(rank)]
                                  for i in range(rank)], raw_j)
    # lhs[i][j] = sum_k A_ki J_kj = <F e_i, e_j>
    rhs = _linalg.mat_mul(ops_v, raw_j, vrows)
    violations = []
    for i in range(rank):
        for j in range(rank):
            diff = ops_v.sub(lhs[i][j], ops_v.frob(rhs[i][j], 1))
            if not ops_v.is_zero(diff):
                violations.append((display.basis[i], display.basis[j],
                                   ops_v.wrap(diff)))
    return violations


def a_number(display):
    """dim over F_{p^d} of ker(F mod p) intersected with ker(V mod p)."""
    ctx = display.ctx
    ops = display._ops()
    d = ctx.d
    ctx_v, vrows = display._verschiebung()
    ops_v = ops_for(ctx_v)
    a_bar = [[ops.mod_p(e) for e in row] for row in display._raw_frobenius()]
    b_bar = [[ops_v.mod_p(e) for e in row] for row in vrows]
    if d == 1:
        stacked = ([[e[0] for e in row] for row in a_bar]
                   + [[e[0] for e in row] for row in b_bar])
        kernel = display.rank - _linalg.gf_rank(stacked, ctx.p)
        return kernel
    mf = _linalg.gf_blowup(a_bar, ctx, sigma_power=1)
    mv = _linalg.gf_blowup(b_bar, ctx, sigma_power=d - 1)
    stacked = mf + mv
    kernel = display.rank * d - _linalg.gf_rank(stacked, ctx.p)
    if kernel % d:
        raise RuntimeError("kernel is not stable under the residue field")
    return kernel // d


def p_rank(display):
    """Multiplicity of slope 0 in the Newton polygon."""
    return newton_slopes(display).multiplicity(0)


def signature(display):
    """Dimensions over the residue field of the u- and v-graded parts of
    D / V D."""
    ctx = display.ctx
    d = ctx.d
    ctx_v, vrows = display._verschiebung()
    ops_v = ops_for(ctx_v)
    b_bar = [[ops_v.mod_p(e) for e in row] for row in vrows]
    uu, vv = display.u_indices, display.v_indices

    def block_rank(rows_idx, cols_idx):
        sub = [[b_bar[i][j] for j in cols_idx] for i in rows_idx]
        if not sub or not sub[0]:
            return 0
        if d == 1:
            return _linalg.gf_rank([[e[0] for e in row] for row in sub],
                                   ctx.p)
        return _linalg.gf_rank(_linalg.gf_blowup(sub, ctx), ctx.p) // d

    dim_u = len(uu) - block_rank(uu, vv)
    dim_v = len(vv) - block_rank(vv, uu)
    return (dim_u, dim_v)
