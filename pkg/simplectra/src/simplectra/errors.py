class SimplectraError(Exception):
    """Base class for every error raised by simplectra."""


class ValidationError(SimplectraError, ValueError):
    """Invalid parameters, malformed input files or a failed consistency check."""


class BudgetExceeded(SimplectraError):
    """An enumeration was refused or aborted by the state budget."""

    def __init__(self, message, projected=None, budget=None):
        super(BudgetExceeded, self).__init__(message)
        self.projected = projected
        self.budget = budget
