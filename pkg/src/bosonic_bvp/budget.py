"""Node-count budget shared by rule construction and basis building.

The cap comes from the environment variable ``BOSONIC_BVP_BUDGET`` (an
integer node count) and is read on every check, so tests and the CLI can
change it at runtime.
"""
import os

from .errors import BudgetError

ENV_VAR = "BOSONIC_BVP_BUDGET"
DEFAULT_BUDGET = 20_000_000


def node_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise BudgetError(f"{ENV_VAR}={raw!r} is not an integer") from None
    if value <= 0:
        raise BudgetError(f"{ENV_VAR} must be positive, got {value}")
    return value


def check_budget(count: int, what: str) -> None:
    cap = node_budget()
    if count > cap:
        raise BudgetError(f"{what} needs {count} nodes, budget is {cap} (set {ENV_VAR} to raise it)")
