"""Fixed-size RGB rasters with bit-exact binary PPM (P6) serialization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PpmError(ValueError):
    """Raised when bytes cannot be decoded as a binary PPM image."""


@dataclass(frozen=True, eq=False)
class RasterImage:
    """An immutable height x width RGB image.

    The pixel array is always a private, non-writeable uint8 copy, so a
    RasterImage can be shared freely; drawing operations return new images.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.uint8, copy=True)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected a (height, width, 3) array, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))

    @classmethod
    def blank(cls, width: int, height: int, color: tuple[int, int, int] = (255, 255, 255)) -> "RasterImage":
        arr = np.empty((height, width, 3), dtype=np.uint8)
        arr[:, :] = color
        return cls(arr)

    def mutable_pixels(self) -> np.ndarray:
        """A writeable copy for draw routines."""
        return np.array(self.pixels, dtype=np.uint8, copy=True)

    def to_ppm(self) -> bytes:
        """Serialize as binary PPM: P6, maxval 255, single-newline separators."""
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.pixels.tobytes()

    @classmethod
    def from_ppm(cls, data: bytes) -> "RasterImage":
        """Decode binary PPM, tolerating comments and arbitrary whitespace."""
        if not data.startswith(b"P6"):
            raise PpmError("not a binary PPM (missing P6 magic)")
        pos = 2
        fields: list[int] = []
        while len(fields) < 3:
            while pos < len(data) and data[pos : pos + 1].isspace():
                pos += 1
            if pos < len(data) and data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
                continue
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise PpmError(f"bad header token {token!r}")
            fields.append(int(token))
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise PpmError("missing separator after maxval")
        pos += 1  # exactly one whitespace byte separates the header from pixels
        width, height, maxval = fields
        if maxval != 255:
            raise PpmError(f"unsupported maxval {maxval} (must be 255)")
        expected = width * height * 3
        raw = data[pos : pos + expected]
        if len(raw) != expected:
            raise PpmError(f"expected {expected} pixel bytes, found {len(raw)}")
        arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
        return cls(arr)
