"""MEMS-to-isospectral-target convertibility under non-entangling and separable maps."""

from memsconv.qcore import Spectrum

__all__ = ["Spectrum"]
__version__ = "0.1.0"
