"""Split-quaternion geometry: algebra, hypersymplectic potentials on flat
space, split 3-Sasakian checks on the pseudo-sphere and a Nahm-Schmid
simulator."""

__version__ = "0.1.0"
