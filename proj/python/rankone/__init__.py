"""Exact finite-depth analysis of rank-one cutting-and-stacking constructions.

Integers come back as Python ints and exact ratios as fractions.Fraction.
"""

from ._core import (
    RankOneError,
    Spec,
    __version__,
    canonical_occurrences,
    check_cyclic_factor,
    check_odometer_factor,
    cyclic_discrepancy,
    height,
    index_set,
    mass_check,
    odometers_isomorphic,
    preset_names,
    preset_target,
    residue_histogram,
    run_config,
    supernatural_of,
    supernatural_of_power,
    symmetric_difference_fit,
    total_ergodicity_probe,
    word,
)

__all__ = [
    "RankOneError",
    "Spec",
    "canonical_occurrences",
    "check_cyclic_factor",
    "check_odometer_factor",
    "cyclic_discrepancy",
    "height",
    "index_set",
    "mass_check",
    "odometers_isomorphic",
    "preset_names",
    "preset_target",
    "residue_histogram",
    "run_config",
    "supernatural_of",
    "supernatural_of_power",
    "symmetric_difference_fit",
    "total_ergodicity_probe",
    "word",
]
