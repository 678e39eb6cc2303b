"""Domain error types raised across the package.

Plain precondition violations (bad arguments, malformed inputs) raise
ValueError; the classes here are the named conditions callers may want to
catch and the CLI maps to exit code 1.
"""


class CqlabError(Exception):
    """Base class for cqlab domain errors."""


class InstanceTooLarge(CqlabError):
    """Brute-force guard tripped; see CQLAB_BRUTE_CAP."""


class CyclePresent(CqlabError):
    """Alternating cycle found where the operation requires none."""


class POutOfRange(CqlabError):
    """Entropy argument p fell to 1/2 or below (infeasible m)."""


class NoCrossing(CqlabError):
    """Density threshold search found no sign change in the eta range."""


class RootDiagnostic(CqlabError):
    """Root search failed an internal sanity check (should not happen)."""


class AdaptivityViolation(CqlabError):
    """A strategy requested same-round feedback."""


class BudgetExceeded(CqlabError):
    """Total queries passed the floor(n**delta) budget."""
