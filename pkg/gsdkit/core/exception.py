"""
Error hierarchy of gsdkit.

Every error knows the entry id or file path it is about, so the CLI can
print one machine-readable line per failure.
"""

from typing import Optional


class GsdError(Exception):
    """
    Base class of all toolkit errors.
    """

    def __init__(self, message: str, id: Optional[str] = None, path: Optional[str] = None):
        """"""
        super().__init__(message)
        self.message = message
        self.id = id
        self.path = path

    def to_dict(self) -> dict:
        data = {"error": type(self).__name__, "message": self.message}
        if self.id is not None:
            data["id"] = self.id
        if self.path is not None:
            data["path"] = str(self.path)
        return data


class ConfigError(GsdError):
    pass


class EmptyDataset(GsdError):
    pass


class MissingMask(GsdError):
    pass


class GeometryError(GsdError):
    pass


class IoError(GsdError):
    pass


class ManifestError(GsdError):
    pass


class MaskValueError(GsdError):
    pass


class TooFewEntries(GsdError):
    pass


class UnknownParent(GsdError):
    pass


class InvalidDegradeTarget(GsdError):
    pass


class GridError(GsdError):
    pass


class PairSpecError(GsdError):
    pass


class EnhancerSpecError(GsdError):
    pass


class EnhancerFailed(GsdError):
    pass


class EnhancerTimeout(GsdError):
    pass


class OutputMissing(GsdError):
    pass


class PredictionMissing(GsdError):
    pass


class EmptyEvaluation(GsdError):
    pass


class DuplicateEvaluation(GsdError):
    pass
