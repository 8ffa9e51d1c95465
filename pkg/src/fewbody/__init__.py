"""Few-body matter-wave interference toolkit.

Second-quantized two-mode beamsplitters for bosons and fermions, exact
spin coupling and Young-symmetrizer wavefunction algebra for three and
four spin-1/2 particles, MO-LCAO Gaussian orbitals, and spin-traced
probability-density maps.
"""

__version__ = "0.1.0"
