"""Entanglement structure of graph-diagonal states: partial-transpose spectra,
separability thresholds, explicit decompositions, witnesses and distillation."""

__version__ = "0.1.0"
