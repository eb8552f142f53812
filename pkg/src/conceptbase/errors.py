"""Exception hierarchy for the concept base."""


class ConceptBaseError(Exception):
    pass


class InvalidEvent(ConceptBaseError, ValueError):
    pass


class BaseMismatch(ConceptBaseError):
    pass


class PathNotFound(ConceptBaseError, KeyError):
    pass


class CannotDetachBase(ConceptBaseError):
    pass


class DanglingEndpoint(ConceptBaseError):
    pass


class LinkConflict(ConceptBaseError):
    """A link would shadow an existing child with the target's base label."""


class UnknownTree(ConceptBaseError, KeyError):
    pass


class NotLinked(ConceptBaseError):
    pass


class EmptyQuery(ConceptBaseError, ValueError):
    pass


class EmptyList(ConceptBaseError, ValueError):
    pass


class CorruptSnapshot(ConceptBaseError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VersionMismatch(ConceptBaseError):
    pass
