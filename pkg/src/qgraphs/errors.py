"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: validation problems exit with 2,
budget overruns with 3 and broken internal invariants with 4.
"""


class QGraphError(Exception):
    """Base class for every error raised by :mod:`qgraphs`."""

    exit_code = 1


class ValidationError(QGraphError, ValueError):
    exit_code = 2


class UnsupportedFieldError(ValidationError):
    """No modulus table entry for the requested (p, t)."""


class AmbientMismatchError(ValidationError):
    """Objects over different fields or ambient dimensions were combined."""


class FoulserConditionError(ValidationError):
    def __init__(self, condition: int, message: str):
        super().__init__(f"Foulser condition ({condition}) violated: {message}")
        self.condition = condition


class NotAutomorphismError(ValidationError):
    """A group generator does not stabilise the edge set."""

    def __init__(self, generator_index: int, group_name: str = ""):
        label = f"{group_name}[{generator_index}]" if group_name else f"generator {generator_index}"
        super().__init__(f"G is not a subgroup of Aut(Gamma): {label} moves an edge off the edge set")
        self.generator_index = generator_index


class BudgetExceededError(QGraphError):
    exit_code = 3

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds budget {cap}")
        self.size = size
        self.cap = cap


class InvariantViolation(QGraphError, AssertionError):
    exit_code = 4
