"""Exception hierarchy shared by every module."""


class TerrainError(Exception):
    """Base class for all package errors."""


class InvalidArgument(TerrainError, ValueError):
    pass


class BoundsError(TerrainError, ValueError):
    pass


class SaturationError(TerrainError, ArithmeticError):
    """Effective mass reached zero or below (robot fully buoyant)."""


class CapacityError(TerrainError):
    pass


class SpecError(TerrainError):
    """Base for terrain-spec failures; carries a JSON-ish path like ``calls[0].args.count``."""

    def __init__(self, message, path=None, index=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.index = index

    def to_dict(self):
        return {
            "error": type(self).__name__,
            "message": self.message,
            "path": self.path,
            "index": self.index,
        }

    def __str__(self):
        if self.path:
            return f"{self.path}: {self.message}"
        return self.message


class SpecParseError(SpecError):
    """Malformed JSON. ``offset`` is the byte offset of the failure."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset

    def to_dict(self):
        d = super().to_dict()
        d["offset"] = self.offset
        return d


class UnknownToolError(SpecError):
    def __init__(self, tool, index=None):
        path = f"calls[{index}].tool" if index is not None else None
        super().__init__(f"unknown tool {tool!r}", path=path, index=index)
        self.tool = tool


class SchemaError(SpecError):
    pass


class RangeError(SchemaError):
    pass


class VLMError(TerrainError):
    pass


class EmptyResponseError(VLMError):
    pass


class NetworkError(VLMError):
    pass


class GenerationFailed(VLMError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace
