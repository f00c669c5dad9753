"""Exact finite-field exponential sums for quivers with potential."""

import json as _json

from ._core import (
    BudgetExceeded,
    CyclotomicValue,
    Error,
    commuting_twisted_count,
    gauss_sum,
    gl_order,
    nc_hilb_twisted_count,
    power_character_sum,
)
from . import _core

__all__ = [
    "BudgetExceeded",
    "CyclotomicValue",
    "Error",
    "check_classes",
    "check_cmps",
    "check_dimred",
    "check_feit_fine",
    "check_preprojective",
    "check_sigma_oracle",
    "check_wallcross",
    "commuting_twisted_count",
    "gauss_sum",
    "gl_order",
    "nc_hilb_twisted_count",
    "power_character_sum",
]


def _report(fn):
    def wrapped(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = "Runs the check and returns its report as a dict."
    return wrapped


check_cmps = _report(_core.check_cmps)
check_feit_fine = _report(_core.check_feit_fine)
check_dimred = _report(_core.check_dimred)
check_wallcross = _report(_core.check_wallcross)
check_preprojective = _report(_core.check_preprojective)
check_sigma_oracle = _report(_core.check_sigma_oracle)
check_classes = _report(_core.check_classes)
