"""Exception hierarchy shared by all pbbc modules."""


class PbbcError(Exception):
    """Base class for all pbbc errors."""


class InvalidBound(PbbcError):
    """Error-bound value is not a positive finite real."""


class DegenerateRange(PbbcError):
    """Relative bound requested but the coordinate range is zero."""


class InvalidEpsilon(PbbcError):
    """Absolute epsilon is not positive."""


class EmptySelection(PbbcError):
    """An operation was given an empty particle selection."""


class MissingLeafBox(PbbcError):
    """A live leaf has no bit box assigned during index initialization."""


class NoLiveBoxes(PbbcError):
    """Box selection requested while no live boxes remain."""


class OutOfRange(PbbcError):
    """Value lies outside the predictable range of the given box."""


class CodeOutOfRange(PbbcError):
    """Quantization code outside the alphabet for its bit width."""


class WidthOverflow(PbbcError):
    """Width field value cannot be represented in the serialized format."""


class BackendMismatch(PbbcError):
    """Unknown lossless backend id in a container."""


class CorruptContainer(PbbcError):
    """Container magic, version, or checksum is invalid."""


class TruncatedPayload(PbbcError):
    """Container payload is shorter than its header claims."""


class MissingSidecar(PbbcError):
    """Verification requires the index permutation sidecar."""


class MismatchedCounts(PbbcError):
    """Two particle sets that must correspond have different sizes."""


class SizeMismatch(PbbcError):
    """Raw input file size is inconsistent with the declared shape."""


class NonFiniteValue(PbbcError):
    """NaN or infinity encountered in particle coordinates."""
