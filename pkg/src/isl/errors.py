"""Exception hierarchy shared by every module.

The CLI maps :class:`InputError` to exit code 2 and :class:`VerificationError`
to exit code 3; :class:`AnalysisError` subclasses describe negative analysis
outcomes (exit code 1).
"""


class ISLError(Exception):
    """Base class for all library errors."""


class InputError(ISLError, ValueError):
    """Malformed or inconsistent input (dimension mismatch, bad precondition)."""


class AnalysisError(ISLError):
    """The analysis ran but its answer is negative (degenerate point, etc)."""


class VerificationError(ISLError):
    """A post-hoc check of a computed object failed."""


class NotAFixedPoint(InputError):
    pass


class SingularLinearPart(InputError):
    pass


class DegreeCapExceeded(AnalysisError):
    def __init__(self, cap, pending):
        super().__init__(
            f"Hilbert basis completion exceeded degree cap {cap} "
            f"with {pending} candidates pending; raise the cap")
        self.cap = cap
        self.pending = pending


class GenericityError(AnalysisError):
    pass


class DegenerateError(AnalysisError):
    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class UnsupportedEigenvalues(AnalysisError):
    """Eigenvalues outside the Gaussian rationals; no exact path available."""


class DivisionError(AnalysisError):
    pass
