"""Numerical toolkit for reducible representations of QED.

Wave-vector indexed quantum fields, transverse photons, Dirac fermions on the
16-dimensional Clifford space, the photon-electron interaction, variational
bound states and the emergent Coulomb transformation.
"""

__version__ = "0.1.0"
