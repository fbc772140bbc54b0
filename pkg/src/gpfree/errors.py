"""Exception hierarchy shared across the package."""


class GPFreeError(Exception):
    """Base class for all library errors."""


class DomainError(GPFreeError):
    """An argument lies outside an operation's stated domain."""


class NotAGeometricProgression(DomainError):
    """The given sequence has non-constant ratio or non-integer terms."""


class TrivialProgression(DomainError):
    """All terms equal; ratio-1 progressions are excluded throughout."""


class TooFewSurvivors(DomainError):
    """A gap report needs at least two survivors >= 16."""


class MalformedSelection(DomainError):
    """A candidate selection violates the pairing constraint."""


class ResourceLimit(GPFreeError):
    """A configured memory/node/time budget would be exceeded."""
