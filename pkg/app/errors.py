"""Exception hierarchy.

Every error is a ValueError so that routes can keep mapping ValueError to HTTP 400.
"""


class FlsatError(ValueError):
    """Base class for all flsat errors"""


class UnknownPredicate(FlsatError):
    def __init__(self, name: str):
        super().__init__(f"unknown predicate '{name}'")
        self.name = name


class FlutedSyntaxError(FlsatError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ArityExceedsContext(FlsatError):
    def __init__(self, predicate: str, arity: int, depth: int):
        super().__init__(f"atom '{predicate}' of arity {arity} used at context depth {depth}")
        self.predicate = predicate
        self.arity = arity
        self.depth = depth


class ContextTooShort(FlsatError):
    pass


class NotASentence(FlsatError):
    pass


class VariableBoundExceeded(FlsatError):
    pass


class SignatureNotTwoVariable(FlsatError):
    pass


class NotQuadratic(FlsatError):
    pass


class NotWellFormed(FlsatError):
    pass


class InvalidCertificate(FlsatError):
    pass


class IndexSetTooLarge(FlsatError):
    pass


class NotReducible(FlsatError):
    pass


class BoundExceeded(FlsatError):
    pass


class MissingInitialTile(FlsatError):
    pass


class MissingTiles(FlsatError):
    pass


class InvalidDocument(FlsatError):
    pass
