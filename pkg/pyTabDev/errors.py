"""Exception hierarchy shared by every pyTabDev module.

Each exception carries a stable ``code`` string which the command line front
end prints alongside the message. The classes also derive from the matching
builtin exception so that callers catching ``ValueError`` and friends keep
working.
"""


class TabDevError(Exception):
    """Base class for all pyTabDev errors"""

    code = "E_TABDEV"


class DomainError(TabDevError, ValueError):
    """A numeric argument lies outside the domain of the operation"""

    code = "E_DOMAIN"


class ConfigurationError(TabDevError, ValueError):
    """A test or simulation configuration violates its invariants"""

    code = "E_CONFIG"


class DegenerateScaleError(TabDevError, ArithmeticError):
    """The variance scale of a statistic vanishes (e.g. constant data)"""

    code = "E_DEGENERATE"


class FactorizationError(TabDevError, ArithmeticError):
    """A covariance matrix could not be factorised"""

    code = "E_FACTOR"


class ParseError(TabDevError, ValueError):
    """Malformed numeric input file.

    Args:
      message (str): Human readable description.
      line (int, optional): One-based line number of the offending record.
      column (int, optional): One-based column number of the offending cell.
    """

    code = "E_PARSE"

    def __init__(self, message, line=None, column=None):
        """Constructor for ParseError. See help(ParseError)."""
        super(ParseError, self).__init__(message)
        self.line = line
        self.column = column


class SimulationError(TabDevError, RuntimeError):
    """A Monte Carlo cell failed; the message names the cell"""

    code = "E_SIM"
