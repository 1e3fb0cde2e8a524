"""Quasi-steady-state simulator of hierarchical voltage control."""

from ._core import (
    InputError,
    Network,
    OpfError,
    PowerFlowError,
    Profile,
    __version__,
    compare,
    constant_profile,
    cost_savings,
    load_case,
    load_profile,
    opf,
    parse_case,
    power_flow,
    run,
)

__all__ = [
    "InputError",
    "Network",
    "OpfError",
    "PowerFlowError",
    "Profile",
    "__version__",
    "compare",
    "constant_profile",
    "cost_savings",
    "load_case",
    "load_profile",
    "opf",
    "parse_case",
    "power_flow",
    "run",
]
