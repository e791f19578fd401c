"""
Plot-ready CSV files.

Every file starts with a fixed header and uses LF line endings. Numbers are
written in the shortest decimal form that reads back to the same float, so
``99.5`` is written as ``99.5``.

=================  ==================================
File               Header
=================  ==================================
observations       ``frame,u,v``
ground truth       ``frame,x,y,z``
estimates          ``frame,x,y,z,diag``
board corners      ``corner,x,y,z,u,v``
detected corners   ``frame,u1,v1,...,u9,v9`` (header optional)
=================  ==================================
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path

from vistrack.exceptions import FormatError, FrameMismatchError
from vistrack.geometry import HomPoint, Pixel, normalize
from vistrack.tracks import EstimateRecord, GroundTruthTrack, ObservationTrack

logger = logging.getLogger(__name__)

OBSERVATION_HEADER = ("frame", "u", "v")
TRUTH_HEADER = ("frame", "x", "y", "z")
ESTIMATE_HEADER = ("frame", "x", "y", "z", "diag")
CORNER_HEADER = ("corner", "x", "y", "z", "u", "v")

BOARD_CORNERS = 9
"""Corners detected on the 3×3 board"""

TRACKED_CORNER = 5
"""The board's middle corner (1-based), the point that is tracked"""


def _format_number(value: float | int) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _write_rows(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[float | int]],
) -> None:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_number(value) for value in row])
            count += 1
    logger.info("Wrote %d rows to %s", count, path)


def _parse_float(path: str | Path, line: int, name: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(path, line, f"{name}: '{text}' is not a number") from None
    if not math.isfinite(value):
        raise FormatError(path, line, f"{name}: '{text}' is not finite")
    return value


def _parse_frame(path: str | Path, line: int, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(path, line, f"frame: '{text}' is not an integer") from None


def _decoded_lines(path: str | Path, f: Iterable[bytes]) -> Iterator[str]:
    for line, raw in enumerate(f, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(path, line, "not valid UTF-8 text") from None


def _read_rows(
    path: str | Path,
    header: Sequence[str] | None,
    width: int,
) -> Iterator[tuple[int, int, list[float]]]:
    """
    Yield ``(line, frame, values)`` for every data row. When ``header`` is
    ``None`` a non-numeric first row is skipped as a header.
    """
    with open(path, "rb") as f:
        reader = csv.reader(_decoded_lines(path, f))
        first = True
        for row in reader:
            line = reader.line_num
            if first:
                first = False
                if header is not None:
                    if tuple(field.strip() for field in row) != tuple(header):
                        raise FormatError(
                            path, line, f"expected header '{','.join(header)}'"
                        )
                    continue
                if row and not _is_number(row[0]):
                    continue
            if not row:
                continue
            if len(row) != width:
                raise FormatError(
                    path, line, f"expected {width} fields, found {len(row)}"
                )
            names = header or [f"field {i + 1}" for i in range(width)]
            frame = _parse_frame(path, line, row[0].strip())
            values = [
                _parse_float(path, line, name, text.strip())
                for name, text in zip(names[1:], row[1:])
            ]
            yield line, frame, values
        if first:
            raise FormatError(path, 1, "file is empty")


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _check_frame(path: str | Path, line: int, frame: int, expected: int) -> None:
    if frame != expected:
        raise FrameMismatchError(
            f"{path}:{line}: expected frame {expected}, found {frame}"
        )


def read_observations(path: str | Path) -> ObservationTrack:
    track = ObservationTrack()
    for line, frame, (u, v) in _read_rows(path, OBSERVATION_HEADER, 3):
        _check_frame(path, line, frame, len(track))
        track.append(frame, Pixel(u, v))
    return track


def read_truth(path: str | Path) -> GroundTruthTrack:
    track = GroundTruthTrack()
    for line, frame, (x, y, z) in _read_rows(path, TRUTH_HEADER, 4):
        _check_frame(path, line, frame, len(track))
        track.append(frame, HomPoint(x, y, z))
    return track


def read_estimates(path: str | Path) -> list[EstimateRecord]:
    records: list[EstimateRecord] = []
    for line, frame, (x, y, z, diag) in _read_rows(path, ESTIMATE_HEADER, 5):
        _check_frame(path, line, frame, len(records))
        records.append(EstimateRecord(frame, x, y, z, diag))
    return records


def ingest_corners(path: str | Path) -> ObservationTrack:
    """
    Read per-frame chessboard corner detections (9 pixel pairs in row-major
    board order) and keep the middle corner of each frame as the
    observation.
    """
    track = ObservationTrack()
    i = 2 * (TRACKED_CORNER - 1)
    for line, frame, values in _read_rows(path, None, 1 + 2 * BOARD_CORNERS):
        _check_frame(path, line, frame, len(track))
        track.append(frame, Pixel(values[i], values[i + 1]))
    return track


def write_track(path: str | Path, track: ObservationTrack) -> None:
    _write_rows(
        path,
        OBSERVATION_HEADER,
        ((frame, pixel.u, pixel.v) for frame, pixel in track),
    )


write_observations = write_track


def write_truth(path: str | Path, truth: GroundTruthTrack) -> None:
    rows = []
    for frame, point in truth:
        p = normalize(point)
        rows.append((frame, p.x, p.y, p.z))
    _write_rows(path, TRUTH_HEADER, rows)


def write_estimates(path: str | Path, estimates: Iterable[EstimateRecord]) -> None:
    _write_rows(
        path,
        ESTIMATE_HEADER,
        ((e.frame, e.x, e.y, e.z, e.diag) for e in estimates),
    )


def write_corners(
    path: str | Path,
    corners: Sequence[HomPoint],
    pixels: Sequence[Pixel],
) -> None:
    """
    Write virtual board corners and their projections, numbered from 1.
    """
    if len(corners) != len(pixels):
        raise ValueError(f"{len(corners)} corners but {len(pixels)} pixels")
    rows = []
    for i, (corner, pixel) in enumerate(zip(corners, pixels), start=1):
        p = normalize(corner)
        rows.append((i, p.x, p.y, p.z, pixel.u, pixel.v))
    _write_rows(path, CORNER_HEADER, rows)
