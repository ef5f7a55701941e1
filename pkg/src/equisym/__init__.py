"""equisym: exact classification of Z_m^2 x| D3 actions on Riemann surfaces.

Library layout:

- groups      group arithmetic, presentations, subgroups, automorphisms
- words       parser/evaluator for words in named generators
- signatures  orbifold signatures, Riemann-Hurwitz, extension candidates
- actions     surface-kernel epimorphisms, braid moves, equisymmetric strata
- quotients   intermediate quotients X/H, fixed points, gonality
- extensions  order-12p^2 and 24p^2 supergroups, action restriction
- cyclo       exact arithmetic in Q(zeta_p)
- pencil      the plane pencil x^2p + y^2p + z^2p + t(x^p y^p + ...)
- report      machine-readable reproduction reports
- cli         command-line front end
"""

__version__ = "0.1.0"
