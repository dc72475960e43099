"""Delone sets, Meyer sets, substitution m-sets and tilings, computed exactly."""
__version__ = "0.1.0"
