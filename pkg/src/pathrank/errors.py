"""Exception types shared across the package."""


class PathRankError(Exception):
    """Base class for all package errors."""


class ParseError(PathRankError, ValueError):
    """Malformed input text.

    ``line`` is the 1-based line number for file input and ``offset`` the
    0-based byte offset for path expressions; either may be None.
    """

    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class PathSyntaxError(ParseError):
    pass


class SchemaError(PathRankError, ValueError):
    """Input that is well formed but inconsistent with the network schema."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"{message} (line {line})" if line is not None else message)


class PathError(SchemaError):
    """A path expression that does not fit the schema."""


class NotSymmetricError(PathRankError, ValueError):
    pass
