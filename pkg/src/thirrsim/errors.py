"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes, so library code should raise the
most specific class that applies:

* ConfigError        -> exit 2  (bad or inconsistent user input)
* SingularityError   -> exit 3  (a requested quantity is undefined at this
                                 point of parameter space, e.g. balanced
                                 control fields make the drift velocity vanish)
* DomainError        -> exit 3  (argument outside the formula's domain)
* NumericalError     -> exit 4  (NaN/overflow, non-convergence, instability)
"""


class ThirrsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ThirrsimError, ValueError):
    pass


class SingularityError(ThirrsimError, ValueError):
    pass


class DomainError(ThirrsimError, ValueError):
    pass


class NumericalError(ThirrsimError, ArithmeticError):
    pass


class StabilityError(NumericalError):
    """Time step violates the integrator's stability/accuracy bound."""
