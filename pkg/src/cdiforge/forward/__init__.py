"""The forward model shared by training, refinement and retrieval."""

from cdiforge.forward.model import oversampling_ratio, simulate_diffraction

__all__ = ["oversampling_ratio", "simulate_diffraction"]
