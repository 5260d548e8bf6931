"""Modular robot arm design synthesis.

Thin Python layer over the C++ core: kinematic models, design evaluation,
Pareto utilities and the optimize/report/export commands.
"""

from ._core import (
    InputError,
    Model,
    StateError,
    decode,
    dominates,
    evaluate,
    export_trial,
    hypervolume,
    load_urdf,
    nondominated_sort,
    optimize,
    parse_urdf,
    report,
)

__all__ = [
    "InputError",
    "Model",
    "StateError",
    "decode",
    "dominates",
    "evaluate",
    "export_trial",
    "hypervolume",
    "load_urdf",
    "nondominated_sort",
    "optimize",
    "parse_urdf",
    "report",
]
