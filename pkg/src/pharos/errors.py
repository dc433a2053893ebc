"""Exception hierarchy shared by all pharos modules."""


class PharosError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(PharosError, ValueError):
    pass


class CoincidentPoints(PharosError, ValueError):
    pass


class OutOfProjectionRange(PharosError, ValueError):
    pass


class ParseError(PharosError, ValueError):
    """Malformed input document. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionError(PharosError, ValueError):
    pass


class ObserverOutsideGrid(PharosError, ValueError):
    pass


class EmptyManifest(PharosError, ValueError):
    pass


class MalformedRecord(PharosError, ValueError):
    def __init__(self, message, row):
        self.row = row
        super().__init__(f"row {row}: {message}")


class WindowLargerThanImage(PharosError, ValueError):
    pass


class ImageSmallerThanWindow(PharosError, ValueError):
    pass


class EmptyRecordSet(PharosError, ValueError):
    pass


class UnsupportedGeometry(PharosError, ValueError):
    pass


class TooFewPoints(PharosError, ValueError):
    pass


class LandmarkCoincidesWithPoint(PharosError, ValueError):
    pass


class IdMismatch(PharosError, ValueError):
    def __init__(self, image_id, where):
        self.image_id = image_id
        super().__init__(f"image_id {image_id!r} has no match in {where}")
