from .heuristics import COOK_KINDS, LBF_KINDS, HeuristicAgent, HeuristicPolicy, heuristic_action
from .lbf import LbfConfig, LbfEnv, LbfState
from .matrix import MatrixGameEnv, convention_game, row_bandit
from .overcooked import (
    CRAMPED_ROOM,
    Layout,
    OvercookedConfig,
    OvercookedEnv,
    OvercookedState,
    load_layout,
)

__all__ = [
    "make_env",
    "LbfConfig",
    "LbfEnv",
    "LbfState",
    "OvercookedConfig",
    "OvercookedEnv",
    "OvercookedState",
    "Layout",
    "load_layout",
    "CRAMPED_ROOM",
    "MatrixGameEnv",
    "convention_game",
    "row_bandit",
    "HeuristicAgent",
    "HeuristicPolicy",
    "heuristic_action",
    "LBF_KINDS",
    "COOK_KINDS",
]


def make_env(name: str, **overrides):
    """Environment registry used by the CLI (``lbf``, ``overcooked_cramped``)."""
    if name == "lbf":
        return LbfEnv(LbfConfig(**overrides))
    if name == "overcooked_cramped":
        return OvercookedEnv(OvercookedConfig(**overrides))
    if name == "matrix_convention":
        return convention_game()
    raise ValueError(f"unknown environment {name!r}")
