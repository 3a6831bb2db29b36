"""Classical and quantum chi-2 waveguide processes with scattering loss."""

__version__ = "1.0.0"
