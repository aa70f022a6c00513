"""Exact arithmetic toolkit for elliptic curves of large Mordell-Weil rank.

Subpackage map:

- intmath, _linalg: integer/rational utility layers
- arith: polynomials, rational functions, series at infinity
- padic: Hensel lifting and rational reconstruction
- curves: Weierstrass models, group law, reduction, torsion
- families: one-parameter families, the rank-11 quintic construction,
  the pencil-of-cubics section machinery
- heights: canonical heights, height pairing, rank certification
- sieve: reduction-count tables and the Mestre-style search score
- lattices: integral quadratic lattices, root systems, Mordell-Weil
  lattice bookkeeping for elliptic surfaces
- fixtures: hard-coded reference data (curves, families, lattices)
- cli: command-line entry points
"""

__version__ = "0.1.0"
