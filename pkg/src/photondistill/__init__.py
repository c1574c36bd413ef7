"""Simulator and circuit compiler for linear-optical photon distillation.

Subpackages by concern: :mod:`numerics` (permanents, Haar sampling),
:mod:`fock` (occupation vectors and indistinguishable statistics),
:mod:`interference` (partial distinguishability and the exact oracle),
:mod:`circuits` (elements, QFT, Reck/Clements/Cooley-Tukey engines),
:mod:`distillation` (heralded protocols and suppression laws),
:mod:`mesh` (the recirculating bricks lattice and placement), and the
:mod:`cli` front end.
"""

from . import circuits, distillation, fock, interference, mesh, numerics

__all__ = ["circuits", "distillation", "fock", "interference", "mesh", "numerics"]
__version__ = "0.1.0"
