"""gqkit: finite generalized quadrangles, their substructures, spectra and scissor rings."""

__version__ = "0.1.0"
