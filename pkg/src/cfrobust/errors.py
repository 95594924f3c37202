"""Exception hierarchy shared by all modules."""


class CFRobustError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CFRobustError):
    """Config file could not be read or is not valid JSON of the right shape."""


class ValidationError(CFRobustError):
    """A parameter violates one of its documented invariants."""


class DomainError(CFRobustError, ValueError):
    """Imperfection level outside the admissible interval."""


class InvalidMaskError(CFRobustError, ValueError):
    """Cluster mask leaves some UE without any serving antenna."""


class DimensionError(CFRobustError, ValueError):
    """Array shapes are inconsistent with each other."""


class RankError(CFRobustError, ValueError):
    """Channel matrix is too ill-conditioned for zero-forcing."""


class SingularHError(RankError):
    """Gram matrix of the alpha-dependent ZF precoder is numerically singular."""


class DegenerateColumnError(CFRobustError, ValueError):
    """Precoder has an all-zero column and cannot be normalized."""


class DegenerateError(CFRobustError, ValueError):
    """Power vector is identically zero."""


class DivergenceError(CFRobustError, RuntimeError):
    """Fixed-step descent increased its objective."""


class CombinatoricsError(CFRobustError, ValueError):
    """Exhaustive enumeration exceeds the configured guard."""


class EmptyResultError(CFRobustError, ValueError):
    """No rows to export."""
