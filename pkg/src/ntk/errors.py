"""Exception types shared across the toolkit."""


class ContractViolationError(ValueError):
    """An argument breaks a documented precondition (dimension mismatch,
    out-of-range parameter, malformed index set, unknown algorithm token)."""


class EnumerationBudgetError(ContractViolationError):
    """A brute-force enumeration was refused because the candidate count
    exceeds the documented budget. The message names the bound."""
