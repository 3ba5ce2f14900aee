#!/usr/bin/env python3
"""Regenerate the frozen even-n stratum rule table.

For even n the bookkeeping between deformation coordinates and strata is
calibrated against brute-force slope computations rather than assumed:
for every vanishing pattern of the coordinates (s_0, s_2, .., s_{n-1})
this script enumerates all residue-field points with that pattern,
computes their Newton polygons through the characteristic-polynomial
route, checks that the stratum only depends on the pattern, and records
pattern -> stratum.  The committed table is what predicted_stratum's
even-n branch is frozen against.

Usage: python3 calibration/generate_calibration.py > calibration/even_stratum_rule.json
"""

import itertools
import json
import sys

from gustrata import (DeformationPoint, classify, deformation_display,
                      default_precision, make_context, newton_slopes,
                      predicted_stratum, __version__)

CASES = [(4, 2), (4, 3), (6, 2), (6, 3)]


def pattern_table(n, p):
    ctx = make_context(p, 1, default_precision(n, 1))
    by_pattern = {}
    for ints in itertools.product(range(p), repeat=n - 1):
        pt = DeformationPoint.from_ints(ctx, n, ints)
        label = classify(n, newton_slopes(deformation_display(ctx, pt)))
        pattern = tuple(1 if v else 0 for v in ints)
        by_pattern.setdefault(pattern, set()).add(label)
        assert label == predicted_stratum(pt), (n, p, ints, label)
    table = {}
    for pattern, labels in sorted(by_pattern.items()):
        assert len(labels) == 1, (n, p, pattern, labels)
        table["".join(map(str, pattern))] = labels.pop()
    return table


def main():
    doc = {
        "description": "stratum by vanishing pattern of the deformation "
                       "coordinates (1 = nonzero), even n; coordinate "
                       "order s_0, s_2, .., s_{n-1}",
        "version": __version__,
        "cases": [
            {"n": n, "p": p, "patterns": pattern_table(n, p)}
            for n, p in CASES
        ],
    }
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
