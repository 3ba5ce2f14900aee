"""Constructors for the standard displays and their deformations.

The zoo contains the rank-2 module N, the rank-2m modules M(m), direct
sums, the per-stratum decompositions M(2(floor(n/2)+1-j)) + N^r(j), the
supersingular module for each n, and the n-1 parameter family deforming the
supersingular module, specialized at residue field points through
Teichmuller lifts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fcrystal import BasisLabel, DieudonneDisplay, U, V
from .wittring import FieldElement

__all__ = [
    "module_N", "module_M", "direct_sum", "expected_module",
    "supersingular_module", "DeformationPoint", "deformation_display",
    "ModuleSpec", "parse_module_spec",
]


def _build(ctx, labels, relations, pairing_entries, summands=None):
    """Assemble a display from sparse column data.

    relations maps source label -> list of (target label, coefficient);
    pairing_entries maps (row label, col label) -> coefficient.
    """
    idx = {lab: k for k, lab in enumerate(labels)}
    rank = len(labels)
    zero = ctx.zero()
    columns = [[zero] * rank for _ in range(rank)]
    for frm, targets in relations.items():
        for to, coeff in targets:
            columns[idx[frm]][idx[to]] = _as_scalar(ctx, coeff)
    pairing = [[zero] * rank for _ in range(rank)]
    for (a, b), coeff in pairing_entries.items():
        pairing[idx[a]][idx[b]] = _as_scalar(ctx, coeff)
    return DieudonneDisplay(ctx, labels, columns, pairing, summands=summands)


def _as_scalar(ctx, coeff):
    if isinstance(coeff, int):
        return ctx.from_int(coeff)
    return coeff


def module_N(ctx):
    """The rank-2 display with F v0 = -u0 and u0 = V v0; both slopes 1/2."""
    labels = (U(0), V(0))
    relations = {
        V(0): [(U(0), -1)],
        U(0): [(V(0), ctx.p)],  # from u0 = V v0 and F V = p
    }
    pairing = {(U(0), V(0)): 1, (V(0), U(0)): -1}
    return _build(ctx, labels, relations, pairing)


def module_M(ctx, m):
    """The rank-2m display on u_1..u_m, v_1..v_m.

    F u_1 = (-1)^m v_m, F v_k = u_{k-1} for k >= 2, and the V-relations
    v_1 = V u_m, u_k = V v_{k-1} give F v_1 = p u_m, F u_k = p v_{k-1}.
    The pairing is <u_i, v_j> = (-1)^i delta_ij.
    """
    if m < 2:
        raise ValueError(f"module_M needs m >= 2, got {m}")
    labels = tuple(U(i) for i in range(1, m + 1)) + tuple(
        V(i) for i in range(1, m + 1))
    relations = {U(1): [(V(m), (-1) ** m)], V(1): [(U(m), ctx.p)]}
    for k in range(2, m + 1):
        relations[V(k)] = [(U(k - 1), 1)]
        relations[U(k)] = [(V(k - 1), ctx.p)]
    pairing = {}
    for i in range(1, m + 1):
        sign = (-1) ** i
        pairing[(U(i), V(i))] = sign
        pairing[(V(i), U(i))] = -sign
    return _build(ctx, labels, relations, pairing)


def direct_sum(d1, d2):
    """Block sum of two displays over the same context.

    Colliding labels in the second summand are bumped to the smallest free
    index of their family; the mapping is recorded in the summands field.
    """
    if d1.ctx.params() != d2.ctx.params():
        raise ValueError("context mismatch between summands")
    ctx = d1.ctx
    used = {"u": set(), "v": set()}
    labels = []
    mappings = []
    for disp in (d1, d2):
        mapping = []
        for lab in disp.basis:
            fam, idx = lab.family, lab.index
            if idx in used[fam]:
                idx = 0
                while idx in used[fam]:
                    idx += 1
            used[fam].add(idx)
            new = BasisLabel(fam, idx)
            labels.append(new)
            mapping.append((str(lab), str(new)))
        mappings.append(tuple(mapping))
    r1, r2 = d1.rank, d2.rank
    rank = r1 + r2
    zero = ctx.zero()
    columns = [[zero] * rank for _ in range(rank)]
    pairing = [[zero] * rank for _ in range(rank)]
    for i in range(r1):
        for j in range(r1):
            columns[j][i] = d1.frobenius[i][j]
            pairing[i][j] = d1.pairing[i][j]
    for i in range(r2):
        for j in range(r2):
            columns[r1 + j][r1 + i] = d2.frobenius[i][j]
            pairing[r1 + i][r1 + j] = d2.pairing[i][j]
    prev = []
    for disp, mapping in zip((d1, d2), mappings):
        if disp.summands is not None:
            prev.extend(disp.summands)
        else:
            prev.append(mapping)
    return DieudonneDisplay(ctx, labels, columns, pairing,
                            summands=tuple(prev))


def expected_module(ctx, n, j):
    """The module on the stratum with the j-th smallest positive slope gap:
    M(2(floor(n/2)+1-j)) + N^r with r forced by total rank 2n."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not 1 <= j <= n // 2:
        raise ValueError(f"j must lie in [1, {n // 2}], got {j}")
    m = 2 * (n // 2 + 1 - j)
    r = n - m
    disp = module_M(ctx, m)
    for _ in range(r):
        disp = direct_sum(disp, module_N(ctx))
    return disp


def supersingular_module(ctx, n):
    """M(n) for odd n, M(n-1) + N for even n; all slopes 1/2."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if n % 2:
        return module_M(ctx, n)
    return direct_sum(module_M(ctx, n - 1), module_N(ctx))


@dataclass(frozen=True)
class DeformationPoint:
    """A residue-field specialization of the deformation parameters.

    Odd n uses coordinates s_2..s_n; even n uses s_0, s_2..s_{n-1}.  Both
    parameter vectors have length n-1.
    """
    n: int
    values: tuple

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need n >= 3, got {self.n}")
        if len(self.values) != self.n - 1:
            raise ValueError(
                f"expected {self.n - 1} parameters, got {len(self.values)}")
        if not all(isinstance(v, FieldElement) for v in self.values):
            raise TypeError("parameters must be residue field elements")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def indices(self):
        if self.n % 2:
            return tuple(range(2, self.n + 1))
        return (0,) + tuple(range(2, self.n))

    def as_dict(self):
        return dict(zip(self.indices, self.values))

    def parameter(self, index):
        return self.as_dict()[index]

    @classmethod
    def from_ints(cls, ctx, n, ints):
        return cls(n, tuple(ctx.field_from_int(k) for k in ints))

    def to_ints(self):
        return tuple(v.to_int() for v in self.values)

    def at_context(self, ctx):
        """Rebind the coordinates to another context with the same residue
        field (used when re-running at doubled precision)."""
        return DeformationPoint(
            self.n, tuple(ctx.field(v.coords) for v in self.values))

    def __str__(self):
        parts = ", ".join(f"s{i}={v.to_int()}"
                          for i, v in zip(self.indices, self.values))
        return f"def({self.n}; {parts})"


def deformation_display(ctx, point):
    """The universal-family display specialized at a residue field point.

    Parameters enter through their Teichmuller lifts.  At the zero point
    this reproduces supersingular_module(point.n) entrywise.

    The coefficient of the top-index term in the F u_2 sum is +s (not the
    alternating sign), and for even n the sum carries the extra term
    p * s_0 * v_0: with the convention F v_1 = p(u - s u_1) and
    F v_0 = -u_0 - s_0 u_1 these are the unique coefficients for which the
    pairing satisfies <F x, y> = sigma(<x, V y>) identically in the
    parameters; polarization_check verifies this on every specialization.
    """
    n = point.n
    s = {i: ctx.teichmuller(v) for i, v in zip(point.indices, point.values)}
    for v in point.values:
        if v.ctx.residue_params() != ctx.residue_params():
            raise ValueError("point lives over a different residue field")
    p = ctx.p
    if n % 2:
        labels = tuple(U(i) for i in range(1, n + 1)) + tuple(
            V(i) for i in range(1, n + 1))
        relations = {
            U(1): [(V(n), -1)],
            U(2): [(V(1), p)]
            + [(V(j), p * (-1) ** j * s[j]) for j in range(2, n)]
            + [(V(n), p * s[n])],
            V(1): [(U(n), p), (U(1), -p * s[n])],
            V(2): [(U(1), 1)],
        }
        for k in range(3, n + 1):
            relations[U(k)] = [(V(k - 1), p)]
            relations[V(k)] = [(U(k - 1), 1), (U(1), s[k - 1])]
        pairing = {}
        for i in range(1, n + 1):
            sign = (-1) ** i
            pairing[(U(i), V(i))] = sign
            pairing[(V(i), U(i))] = -sign
    else:
        m = n - 1
        labels = (tuple(U(i) for i in range(1, m + 1))
                  + tuple(V(i) for i in range(1, m + 1))
                  + (U(0), V(0)))
        relations = {
            U(1): [(V(m), -1)],
            U(2): [(V(1), p)]
            + [(V(j), p * (-1) ** j * s[j]) for j in range(2, m)]
            + [(V(m), p * s[m]), (V(0), p * s[0])],
            V(1): [(U(m), p), (U(1), -p * s[m])],
            V(2): [(U(1), 1)],
            U(0): [(V(0), p)],
            V(0): [(U(0), -1), (U(1), -s[0])],
        }
        for k in range(3, m + 1):
            relations[U(k)] = [(V(k - 1), p)]
            relations[V(k)] = [(U(k - 1), 1), (U(1), s[k - 1])]
        pairing = {(U(0), V(0)): 1, (V(0), U(0)): -1}
        for i in range(1, m + 1):
            sign = (-1) ** i
            pairing[(U(i), V(i))] = sign
            pairing[(V(i), U(i))] = -sign
    relations = {frm: [(to, c) for to, c in targets
                       if not _is_zero_coeff(c)]
                 for frm, targets in relations.items()}
    return _build(ctx, labels, relations, pairing)


def _is_zero_coeff(c):
    if isinstance(c, int):
        return c == 0
    return c.is_zero()


# ---------------------------------------------------------------------------
# the module-spec mini grammar: N, M(m), ss(n), def(n; s2=..), sums, powers


@dataclass(frozen=True)
class ModuleSpec:
    """Parsed module expression; build(ctx) constructs the display."""
    terms: tuple

    @property
    def half_rank(self):
        total = 0
        for term in self.terms:
            kind = term[0]
            if kind == "N":
                total += 1
            elif kind == "M":
                total += term[1]
            else:
                total += term[1]
        return total

    def build(self, ctx):
        displays = []
        for term in self.terms:
            kind = term[0]
            if kind == "N":
                displays.append(module_N(ctx))
            elif kind == "M":
                displays.append(module_M(ctx, term[1]))
            elif kind == "ss":
                displays.append(supersingular_module(ctx, term[1]))
            elif kind == "def":
                n, assignments = term[1], dict(term[2])
                point = _point_from_assignments(ctx, n, assignments)
                displays.append(deformation_display(ctx, point))
            else:
                raise ValueError(f"unknown term {term!r}")
        out = displays[0]
        for disp in displays[1:]:
            out = direct_sum(out, disp)
        return out

    def __str__(self):
        parts = []
        for term in self.terms:
            kind = term[0]
            if kind == "N":
                parts.append("N")
            elif kind == "M":
                parts.append(f"M({term[1]})")
            elif kind == "ss":
                parts.append(f"ss({term[1]})")
            else:
                assigns = ", ".join(f"s{i}={v}" for i, v in term[2])
                parts.append(f"def({term[1]}; {assigns})")
        return " + ".join(parts)


def _point_from_assignments(ctx, n, assignments):
    indices = ((0,) + tuple(range(2, n))) if n % 2 == 0 else tuple(
        range(2, n + 1))
    bad = set(assignments) - set(indices)
    if bad:
        raise ValueError(
            f"parameter indices {sorted(bad)} invalid for n={n}; "
            f"valid indices are {list(indices)}")
    ints = tuple(assignments.get(i, 0) for i in indices)
    return DeformationPoint.from_ints(ctx, n, ints)


def parse_module_spec(text):
    """Parse the module mini-grammar.

    Examples: "N", "M(4)", "ss(6)", "M(2)+N^2", "def(5; s2=1, s4=2)".
    """
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError("empty term in module spec")
        power = 1
        if "^" in chunk:
            chunk, _, ptext = chunk.partition("^")
            chunk = chunk.strip()
            power = _parse_int(ptext.strip(), "power")
            if power < 1:
                raise ValueError(f"power must be >= 1, got {power}")
        terms.extend([_parse_term(chunk)] * power)
    if not terms:
        raise ValueError("empty module spec")
    return ModuleSpec(tuple(terms))


def _parse_term(chunk):
    if chunk == "N":
        return ("N",)
    for head in ("M", "ss", "def"):
        if chunk.startswith(head + "(") and chunk.endswith(")"):
            inner = chunk[len(head) + 1:-1]
            if head == "M":
                m = _parse_int(inner.strip(), "M argument")
                return ("M", m)
            if head == "ss":
                n = _parse_int(inner.strip(), "ss argument")
                return ("ss", n)
            npart, _, rest = inner.partition(";")
            n = _parse_int(npart.strip(), "def argument")
            assignments = []
            rest = rest.strip()
            if rest:
                for piece in rest.split(","):
                    key, _, val = piece.partition("=")
                    key = key.strip()
                    if not key.startswith("s"):
                        raise ValueError(f"bad parameter assignment {piece!r}")
                    idx = _parse_int(key[1:], "parameter index")
                    assignments.append((idx, _parse_int(val.strip(),
                                                        "parameter value")))
            return ("def", n, tuple(sorted(assignments)))
    raise ValueError(f"cannot parse module term {chunk!r}")


def _parse_int(text, what):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"bad {what}: {text!r}") from None
