"""SAT-based safety model checking for finite-state transition systems."""

__version__ = "0.1.0"
