"""Log-regime Gibbs partitions and the lattice walks that produce them."""

__version__ = "0.1.0"
