"""Exception types shared across the package."""


class RasterpackError(Exception):
    """Base class for all package errors."""


class EmptyRaster(RasterpackError):
    """No pixel center fell inside the shape; resolution too low for this piece."""


class InconsistentEncoding(RasterpackError):
    """Row and column scanlines of a shape decode to different cell sets."""


class NoValidPosition(RasterpackError):
    """A piece cannot be placed inside the container along the requested axis."""


class PieceExceedsWidth(RasterpackError):
    """A piece is wider than the container at orientation 0."""

    def __init__(self, piece_id, width, container_width):
        self.piece_id = piece_id
        super().__init__(
            f"piece {piece_id} has raster width {width} > container width {container_width}"
        )


class ParseError(RasterpackError):
    """Instance or result file could not be parsed; carries line/field context."""


class ValidationError(RasterpackError):
    """A parsed file violates a structural invariant; message names the invariant."""
