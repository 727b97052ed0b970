"""tangentcalc: exact symbolic exterior calculus on tangent bundles.

The package implements, over an m-dimensional chart with tangent
coordinates (x^i, v^j):

* an exact rational coefficient ring with formal derivatives of abstract
  function symbols (:mod:`tangentcalc.scalar`),
* differential forms, vector fields and vector-valued forms with the
  Cartan calculus (:mod:`tangentcalc.forms`),
* the natural lifts to the tangent bundle, the tautological field and the
  mirror map (:mod:`tangentcalc.lifts`),
* the derivation calculus i_K / L_K / d_B and constructive cohomology
  solvers (:mod:`tangentcalc.operators`),
* chart transitions and naturality checks (:mod:`tangentcalc.transitions`),
* a text DSL, renderers, a mechanical identity suite, an HTTP service and
  a command-line client.
"""

__version__ = "0.1.0"
