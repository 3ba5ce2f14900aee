"""Admissible Newton polygon catalog, classification, and the local
stratum verification harness.

For rank 2n there are exactly 1 + floor(n/2) admissible polygons: the
supersingular one (all slopes 1/2) and, for 1 <= j <= floor(n/2), the
polygon xi_{2j} with smallest slope 1/2 - 1/(2(floor(n/2)+1-j)), realized
by M(2(floor(n/2)+1-j)) + N^(n-m).  The harness specializes the universal
deformation at every residue field point (or a seeded random sample),
computes the polygon by the characteristic polynomial route, classifies
it, and compares with the vanishing-pattern prediction; it also checks the
cycle-slope upper bound and reports on the min-cycle-slope equality.
"""

from __future__ import annotations

import itertools
import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction

from ._version import __version__
from .displayzoo import DeformationPoint, deformation_display
from .fcrystal import NewtonPolygon, PrecisionError, U, newton_slopes
from .slopegraph import (build_graph, cycles_through, karp_min_cycle_mean,
                         min_cycle_slope)
from .wittring import default_precision, make_context

__all__ = [
    "StratumDescriptor", "StrataReport", "BudgetError", "lambda_min",
    "catalog", "classify", "predicted_stratum", "verify_local_strata",
    "DEFAULT_POINT_BUDGET", "BUDGET_ENV_VAR",
]

DEFAULT_POINT_BUDGET = 100_000
BUDGET_ENV_VAR = "GUSTRATA_POINT_BUDGET"


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured point budget."""


@dataclass(frozen=True)
class StratumDescriptor:
    """Catalog entry: label, minimal slope, full polygon, codimension
    (metadata), and the module decomposition (m, r)."""
    label: str
    j: int | None
    lambda_min: Fraction
    polygon: NewtonPolygon
    codim: int
    decomposition: tuple

    def to_json(self):
        return {
            "label": self.label,
            "j": self.j,
            "lambda_min": _frac_str(self.lambda_min),
            "polygon": self.polygon.to_json(),
            "codim": self.codim,
            "decomposition": {"m": self.decomposition[0],
                              "r": self.decomposition[1]},
        }


def _frac_str(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def lambda_min(n, j):
    """Smallest slope of the stratum xi_{2j}: 1/2 - 1/(2(floor(n/2)+1-j)).

    Equals 0 exactly at j = floor(n/2), the locus with positive p-rank.
    """
    if not 1 <= j <= n // 2:
        raise ValueError(f"j must lie in [1, {n // 2}], got {j}")
    return Fraction(1, 2) - Fraction(1, 2 * (n // 2 + 1 - j))


def catalog(n):
    """All 1 + floor(n/2) admissible polygons for rank 2n, supersingular
    first, then xi_2, xi_4, ... (decreasing minimal slope)."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    out = []
    ss_decomp = (n, 0) if n % 2 else (n - 1, 1)
    out.append(StratumDescriptor(
        label="sigma", j=None, lambda_min=Fraction(1, 2),
        polygon=NewtonPolygon([(Fraction(1, 2), 2 * n)]),
        codim=(n - 1) - (n - 1) // 2, decomposition=ss_decomp))
    for j in range(1, n // 2 + 1):
        h = n // 2 + 1 - j
        m = 2 * h
        r = n - m
        parts = [(Fraction(h - 1, 2 * h), 2 * h),
                 (Fraction(h + 1, 2 * h), 2 * h)]
        if r:
            parts.append((Fraction(1, 2), 2 * r))
        out.append(StratumDescriptor(
            label=f"xi_{2 * j}", j=j, lambda_min=lambda_min(n, j),
            polygon=NewtonPolygon(parts), codim=n // 2 - j,
            decomposition=(m, r)))
    return out


def classify(n, polygon):
    """Label for a rank-2n polygon: the catalog entry it equals, or
    "inadmissible"."""
    if polygon.rank != 2 * n:
        raise ValueError(
            f"rank mismatch: polygon has rank {polygon.rank}, expected {2 * n}")
    for desc in catalog(n):
        if polygon == desc.polygon:
            return desc.label
    return "inadmissible"


def predicted_stratum(point):
    """Stratum predicted from the vanishing pattern of the even-index
    parameters alone.

    Odd n: the stratum is xi_{2j*} for j* = max{j : s_{2j} != 0}, sigma
    when all even-index parameters vanish.  Even n: a nonzero s_{2i} with
    2 <= 2i <= n-2 contributes stratum index j = i + 1, a nonzero s_0
    contributes j = 1, and the stratum is the largest contributed index.
    The even-n bookkeeping (the index shift and the role of s_0) is the
    rule calibrated against brute-force slope computations at n = 4 and
    n = 6 and frozen; the table ships in calibration/ in the repo.
    """
    n = point.n
    values = point.as_dict()
    if n % 2:
        nonzero = [i for i in range(2, n, 2) if values[i]]
        if not nonzero:
            return "sigma"
        return f"xi_{max(nonzero)}"
    contributed = [1] if values[0] else []
    contributed += [i // 2 + 1 for i in range(2, n - 1, 2) if values[i]]
    if not contributed:
        return "sigma"
    return f"xi_{2 * max(contributed)}"


@dataclass
class StrataReport:
    """Deterministic summary of one verification sweep."""
    n: int
    p: int
    d: int
    mode: dict
    points: int
    agreement: dict
    agreement_rate: Fraction
    counts_by_stratum: dict
    lemma_violations: list
    remark_violations: list
    karp_disagreements: list
    extra_edge_effects: list
    precision_retries: int
    precision_failures: list
    s0_effect: dict | None
    context: dict
    version: str = __version__
    retained: list = field(default_factory=list, repr=False)

    @property
    def all_agree(self):
        return self.agreement_rate == 1

    def to_json_obj(self):
        return {
            "n": self.n,
            "p": self.p,
            "d": self.d,
            "mode": self.mode,
            "points": self.points,
            "agreement": self.agreement,
            "agreement_rate": _frac_str(self.agreement_rate),
            "counts_by_stratum": self.counts_by_stratum,
            "lemma_violations": self.lemma_violations,
            "remark_violations": self.remark_violations,
            "karp_disagreements": self.karp_disagreements,
            "extra_edge_effects": self.extra_edge_effects,
            "precision_retries": self.precision_retries,
            "precision_failures": self.precision_failures,
            "s0_effect": self.s0_effect,
            "context": self.context,
            "version": self.version,
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=2)

    def to_tsv(self):
        lines = [f"# n\t{self.n}", f"# p\t{self.p}", f"# d\t{self.d}",
                 f"# mode\t{json.dumps(self.mode)}",
                 f"# points\t{self.points}",
                 f"# agreement_rate\t{_frac_str(self.agreement_rate)}",
                 f"# lemma_violations\t{len(self.lemma_violations)}",
                 f"# remark_violations\t{len(self.remark_violations)}",
                 f"# karp_disagreements\t{len(self.karp_disagreements)}",
                 f"# extra_edge_effects\t{len(self.extra_edge_effects)}",
                 f"# precision_retries\t{self.precision_retries}",
                 f"# version\t{self.version}",
                 "stratum\tpoints"]
        for label in sorted(self.counts_by_stratum):
            lines.append(f"{label}\t{self.counts_by_stratum[label]}")
        return "\n".join(lines) + "\n"


def _resolve_budget(budget):
    if budget is not None:
        return budget
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_POINT_BUDGET


def _enumerate_points(n, q_res, mode, count, seed, budget):
    """Yield parameter vectors as integer tuples, deterministically."""
    width = n - 1
    if mode == "exhaustive":
        total = q_res ** width
        if total > budget:
            raise BudgetError(
                f"exhaustive sweep needs {total} points, budget is {budget} "
                f"(override with {BUDGET_ENV_VAR} or --budget)")
        yield from itertools.product(range(q_res), repeat=width)
    elif mode == "random":
        if count is None or seed is None:
            raise ValueError("random mode needs count and seed")
        if count > budget:
            raise BudgetError(
                f"random sweep of {count} points exceeds budget {budget}")
        rng = random.Random(seed)
        for _ in range(count):
            yield tuple(rng.randrange(q_res) for _ in range(width))
    else:
        raise ValueError(f"unknown mode {mode!r}")


def verify_local_strata(n, p, d, mode="exhaustive", count=None, seed=None,
                        budget=None, precision=None, retain=False):
    """Sweep deformation points and compare three slope computations.

    For every point: the characteristic-polynomial Newton polygon (with its
    built-in doubled-precision certification), the catalog classification,
    the vanishing-pattern prediction, and the cycle slopes through u_1.
    Checks that the minimal Newton slope never exceeds any cycle slope, and
    reports (without failing) whenever the min-cycle-slope equality or the
    Karp cross-check disagrees.  Deterministic for a fixed seed.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    budget = _resolve_budget(budget)
    nprec = precision if precision is not None else default_precision(n, d)
    ctx = make_context(p, d, nprec)
    q_res = p ** d
    u1 = U(1)

    agreement = {}
    counts = {}
    lemma_violations = []
    remark_violations = []
    karp_disagreements = []
    extra_edge_effects = []
    precision_failures = []
    retained = []
    retries = 0
    matches = 0
    total = 0
    s0_map = {} if n % 2 == 0 else None

    base_point = DeformationPoint.from_ints(ctx, n, (0,) * (n - 1))
    base_edges = {(str(a), str(b))
                  for a, b, _ in build_graph(
                      deformation_display(ctx, base_point)).edges}

    for ints in _enumerate_points(n, q_res, mode, count, seed, budget):
        total += 1
        point = DeformationPoint.from_ints(ctx, n, ints)
        point_doc = {f"s{i}": v for i, v in zip(point.indices, ints)}
        display = deformation_display(ctx, point)
        polygon = None
        try:
            polygon = newton_slopes(display)
        except PrecisionError:
            retries += 1
            ctx2 = ctx.at_precision(2 * nprec)
            display = deformation_display(ctx2, point.at_context(ctx2))
            try:
                polygon = newton_slopes(display)
            except PrecisionError as exc:
                precision_failures.append(
                    {"point": point_doc, "error": str(exc)})
                continue

        label = classify(n, polygon)
        predicted = predicted_stratum(point)
        agreement.setdefault(predicted, {})
        agreement[predicted][label] = agreement[predicted].get(label, 0) + 1
        counts[label] = counts.get(label, 0) + 1
        if label == predicted:
            matches += 1

        graph = build_graph(display)
        cycles = cycles_through(graph, u1)
        min_newton = polygon.min_slope()
        min_cycle = min(c.slope for c in cycles) if cycles else None
        if cycles:
            bad = [c for c in cycles if min_newton > c.slope]
            if bad:
                lemma_violations.append({
                    "point": point_doc,
                    "min_newton": _frac_str(min_newton),
                    "cycle": bad[0].to_json(),
                })
            if min_newton != min_cycle:
                remark_violations.append({
                    "point": point_doc,
                    "min_newton": _frac_str(min_newton),
                    "min_cycle": _frac_str(min_cycle),
                })
            karp = karp_min_cycle_mean(graph)
            if karp != min_cycle:
                karp_disagreements.append({
                    "point": point_doc,
                    "min_cycle_u1": _frac_str(min_cycle),
                    "karp_global": _frac_str(karp) if karp is not None
                    else None,
                })
            reduced = graph.subgraph_edges(
                lambda e: e[2] == 0 or (str(e[0]), str(e[1])) in base_edges)
            reduced_min = min_cycle_slope(reduced, u1)
            if reduced_min != min_cycle:
                extra_edge_effects.append({
                    "point": point_doc,
                    "full": _frac_str(min_cycle),
                    "without_extra_black_edges": _frac_str(reduced_min),
                })
        else:
            lemma_violations.append({
                "point": point_doc,
                "error": "no cycles through u1",
            })

        if s0_map is not None:
            key = ints[1:]
            s0_map.setdefault(key, set()).add(label)
        if retain:
            retained.append((point, display, polygon, min_cycle))

    s0_effect = None
    if s0_map is not None:
        rest_indices = tuple(range(2, n))
        changed = sorted(
            sorted({f"s{i}": v for i, v in zip(rest_indices, key)}.items())
            for key, labels in s0_map.items() if len(labels) > 1)
        s0_effect = {
            "changes_stratum": bool(changed),
            "patterns_checked": len(s0_map),
            "changed_patterns": [dict(c) for c in changed],
        }

    mode_doc = {"kind": mode, "budget": budget, "precision": nprec}
    if mode == "random":
        mode_doc["count"] = count
        mode_doc["seed"] = seed

    evaluated = total - len(precision_failures)
    rate = Fraction(matches, evaluated) if evaluated else Fraction(0)
    return StrataReport(
        n=n, p=p, d=d, mode=mode_doc, points=total,
        agreement={k: dict(sorted(v.items()))
                   for k, v in sorted(agreement.items())},
        agreement_rate=rate,
        counts_by_stratum=dict(sorted(counts.items())),
        lemma_violations=lemma_violations,
        remark_violations=remark_violations,
        karp_disagreements=karp_disagreements,
        extra_edge_effects=extra_edge_effects,
        precision_retries=retries,
        precision_failures=precision_failures,
        s0_effect=s0_effect,
        context=ctx.to_json(),
        retained=retained,
    )
