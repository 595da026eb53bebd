"""Exception hierarchy shared across the toolkit.

Every failure mode that callers are expected to handle has its own class so
that the CLI can emit machine-readable error records without string matching.
"""


class SuperradError(Exception):
    """Base class for all toolkit errors."""


# --- parameter validation ---------------------------------------------------

class InvalidParams(SuperradError):
    """One or more physical-parameter invariants are violated."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NegativeRate(InvalidParams):
    def __init__(self, field):
        self.field = field
        SuperradError.__init__(self, f"rate '{field}' must be >= 0")
        self.violations = [str(self)]


class ZeroEmitters(InvalidParams):
    def __init__(self):
        SuperradError.__init__(self, "n_emitters must be >= 1")
        self.violations = [str(self)]


class NonPositiveEnergy(InvalidParams):
    def __init__(self, field):
        self.field = field
        SuperradError.__init__(self, f"energy '{field}' must be > 0")
        self.violations = [str(self)]


# --- exact Lindblad solver ---------------------------------------------------

class DimensionCap(SuperradError):
    """Requested Hilbert space exceeds the configured dimension cap."""


class DegenerateSteadyState(SuperradError):
    """The Liouvillian null space is not one-dimensional."""


class StepSizeUnderflow(SuperradError):
    """Adaptive time integration could not take a valid step."""


class UnknownObservable(SuperradError):
    pass


class IndexOutOfRange(SuperradError):
    pass


class CutoffNotConverged(SuperradError):
    """Photon-number cutoff sweep hit the dimension cap before converging."""


class VacuumState(SuperradError):
    """Photon statistics are undefined: steady-state photon number ~ 0."""


# --- cumulant solver ----------------------------------------------------------

class NoConvergence(SuperradError):
    """Moment integration did not reach steady state within the time budget."""


class NonFiniteState(SuperradError):
    """Moment integration produced NaN or Inf."""


# --- scaling harness ---------------------------------------------------------

class DegenerateRates(SuperradError):
    """All rates in a denominator vanish."""


class InsufficientPoints(SuperradError):
    pass


class NonPositiveValue(SuperradError):
    pass


# --- cavity optics -------------------------------------------------------------

class AngleOutOfRange(SuperradError):
    pass


class PeakNotFound(SuperradError):
    """Emission filter and emitter line are separated by far more than their widths."""


class ZeroLinewidth(SuperradError):
    pass


# --- configuration / CLI -------------------------------------------------------

class ConfigError(SuperradError):
    """Base class for configuration-document problems."""


class ConfigSyntaxError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownKey(ConfigError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"unknown configuration key '{key}'")


class MissingSection(ConfigError):
    def __init__(self, section):
        self.section = section
        super().__init__(f"missing required configuration section or key '{section}'")


class TypeMismatch(ConfigError):
    def __init__(self, key, expected, got):
        self.key = key
        super().__init__(f"key '{key}' expects {expected}, got {got!r}")
