"""Semidirect products of left loops with groups over finite carriers.

Standard products B x| H for transassociants H <= Sym_1(B), internal
products from transversal decompositions G = BH, external products
B x|_(sigma,l,m) H, the loop-identity calculus connecting them, and
floating-point realizations of the Moebius disk and polar-decomposition
examples.
"""

__version__ = "0.1.0"
