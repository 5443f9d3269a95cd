"""Toolkit for quantum-error-correction experiments on 2D trapped-ion lattices.

Two halves, one story: a circuit-level Monte Carlo of the rotated surface
code under gate, idle, and parallel-gate crosstalk noise (with an exact
minimum-weight matching decoder), and a pulse designer for simultaneous
Molmer-Sorensen gates whose residual couplings feed the same crosstalk
model.  Analytic scaling formulas tie the two together.
"""

__version__ = "0.1.0"
