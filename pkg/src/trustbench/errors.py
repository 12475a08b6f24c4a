"""Exception hierarchy shared across the engine."""


class TrustbenchError(Exception):
    """Base class for all engine errors."""


class SchemaError(TrustbenchError):
    """A serialized document is missing a required field or has a bad type."""


class RangeError(TrustbenchError):
    """A numeric field is outside its allowed interval."""


class UnknownDomain(TrustbenchError):
    """No plugin is loaded for the request's domain_id."""


class EmptyInput(TrustbenchError):
    """An operation that requires at least one element received none."""


class EmptyReferences(EmptyInput):
    """n-gram overlap needs at least one reference text."""


class InsufficientPerturbations(TrustbenchError):
    """Robustness scoring needs at least two perturbation scores."""


class ParseError(TrustbenchError):
    """A judge completion contained no usable JSON verdict."""


class BackendTimeout(TrustbenchError):
    """A judge or agent backend exceeded its deadline."""


class JudgeFailed(TrustbenchError):
    """Judge verdict could not be obtained even after the single retry."""


class ConfigParseError(TrustbenchError):
    """A plugin or engine config file failed to parse or validate."""


class InvalidPattern(ConfigParseError):
    """A deny pattern does not compile."""


class InvalidWeights(ConfigParseError):
    """Runtime weights are negative, or no weight is positive."""


class NoRuntimeDimensions(ConfigParseError):
    """A plugin declares no verify-path dimensions; rejected at startup."""


class MissingLabels(TrustbenchError):
    """Ablation corpus records must all carry harmful_label."""


class FileNotFound(TrustbenchError):
    """Referenced dataset/replay/config file does not exist."""


class EmptyDataset(TrustbenchError):
    """Dataset file parsed but yielded zero usable records."""
