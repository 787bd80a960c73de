"""Problem abstraction and the built-in registry.

Registry names: ``wb``, ``hsNNN`` for the coded Hock-Schittkowski subset,
and ``lp-<seed>`` for seeded random standard-form LPs.
"""
from __future__ import annotations

from .base import (
    LpData,
    LpParseError,
    ProblemError,
    ProblemSpec,
    build_problem,
    lp_from_file,
    lp_problem,
    random_lp,
)
from .catalog import HS_PROBLEMS, wb_problem


class UnknownProblemError(KeyError):
    def __str__(self):
        return str(self.args[0])


def available() -> list:
    return ["wb", *sorted(HS_PROBLEMS), "lp-<seed>"]


def registry(name: str) -> ProblemSpec:
    if name == "wb":
        return wb_problem()
    if name in HS_PROBLEMS:
        return HS_PROBLEMS[name]()
    if name.startswith("lp-"):
        try:
            seed = int(name[3:])
        except ValueError:
            seed = None
        if seed is not None and seed >= 0:
            return lp_problem(random_lp(seed), name=name)
    raise UnknownProblemError(
        f"unknown problem {name!r}; available: {', '.join(available())}"
    )


def builtin_set(name: str) -> list:
    """Named problem lists for suite runs: ``hs``, ``all``, ``lp<N>``."""
    if name == "hs":
        return sorted(HS_PROBLEMS)
    if name == "all":
        return ["wb", *sorted(HS_PROBLEMS)]
    if name.startswith("lp") and name[2:].isdigit():
        return [f"lp-{i}" for i in range(int(name[2:]))]
    raise UnknownProblemError(f"unknown builtin set {name!r}; available: hs, all, lp<N>")


__all__ = [
    "LpData", "LpParseError", "ProblemError", "ProblemSpec", "UnknownProblemError",
    "available", "build_problem", "builtin_set", "lp_from_file", "lp_problem",
    "random_lp", "registry", "wb_problem", "HS_PROBLEMS",
]
