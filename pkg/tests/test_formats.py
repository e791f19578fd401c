import pytest

from vistrack.exceptions import FormatError, FrameMismatchError
from vistrack.formats import (
    ingest_corners,
    read_estimates,
    read_observations,
    read_truth,
    write_corners,
    write_estimates,
    write_observations,
    write_truth,
)
from vistrack.geometry import HomPoint, Pixel
from vistrack.tracks import EstimateRecord, GroundTruthTrack, ObservationTrack


def test_write_observations(tmp_path):
    track = ObservationTrack()
    track.append(0, Pixel(200.0, 240.0))
    track.append(1, Pixel(199.5, 240.25))
    path = tmp_path / "obs.csv"
    write_observations(path, track)
    assert path.read_bytes() == b"frame,u,v\n0,200.0,240.0\n1,199.5,240.25\n"
    assert read_observations(path) == track


def test_write_truth_normalizes(tmp_path):
    truth = GroundTruthTrack()
    truth.append(0, HomPoint(-72, 0, 300, 2))
    path = tmp_path / "truth.csv"
    write_truth(path, truth)
    assert path.read_text() == "frame,x,y,z\n0,-36.0,0.0,150.0\n"
    assert read_truth(path)[0].point == HomPoint(-36, 0, 150)


def test_estimates_keep_every_digit(tmp_path):
    records = [EstimateRecord(0, 0.1 + 0.2, -1 / 3, 149.5, 1e-7)]
    path = tmp_path / "est.csv"
    write_estimates(path, records)
    assert path.read_text().splitlines()[0] == "frame,x,y,z,diag"
    assert read_estimates(path) == records


def test_write_corners(tmp_path):
    corners = [HomPoint(-2, -2, 150), HomPoint(0, 0, 150)]
    pixels = [Pixel(313.3333333333333, 233.33333333333334), Pixel(320.0, 240.0)]
    path = tmp_path / "corners.csv"
    write_corners(path, corners, pixels)
    lines = path.read_text().splitlines()
    assert lines[0] == "corner,x,y,z,u,v"
    assert lines[1] == "1,-2.0,-2.0,150.0,313.3333333333333,233.33333333333334"
    assert lines[2] == "2,0.0,0.0,150.0,320.0,240.0"
    with pytest.raises(ValueError):
        write_corners(path, corners, pixels[:1])


def _write(tmp_path, text, name="obs.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_blank_lines_are_skipped(tmp_path):
    path = _write(tmp_path, "frame,u,v\n0,1,2\n\n1,3,4\n")
    assert read_observations(path).frames == [0, 1]


def test_header_only(tmp_path):
    assert len(read_observations(_write(tmp_path, "frame,u,v\n"))) == 0


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("", 1, "file is empty"),
        ("frame,x,y\n0,1,2\n", 1, "expected header 'frame,u,v'"),
        ("frame,u,v\n0,1,2\n1,NaN,4\n", 3, "u: 'NaN' is not finite"),
        ("frame,u,v\n0,1,abc\n", 2, "v: 'abc' is not a number"),
        ("frame,u,v\n0,1,2,3\n", 2, "expected 3 fields, found 4"),
        ("frame,u,v\n0.5,1,2\n", 2, "frame: '0.5' is not an integer"),
    ],
)
def test_format_errors(tmp_path, text, line, message):
    path = _write(tmp_path, text)
    with pytest.raises(FormatError) as e:
        read_observations(path)
    assert e.value.line == line
    assert e.value.path == str(path)
    assert str(e.value) == f"{path}:{line}: {message}"


def test_frames_must_be_consecutive(tmp_path):
    path = _write(tmp_path, "frame,u,v\n0,1,2\n2,3,4\n")
    with pytest.raises(FrameMismatchError, match=":3: expected frame 1, found 2"):
        read_observations(path)
    path = _write(tmp_path, "frame,x,y,z\n1,0,0,150\n", "truth.csv")
    with pytest.raises(FrameMismatchError):
        read_truth(path)


def _corner_row(frame, middle):
    values = []
    for k in range(1, 10):
        values += list(middle) if k == 5 else [k * 10, k * 10 + 1]
    return ",".join(str(v) for v in [frame, *values])


def test_ingest_corners(tmp_path):
    header = "frame," + ",".join(f"u{k},v{k}" for k in range(1, 10))
    body = "\n".join([_corner_row(0, (200, 240)), _corner_row(1, (199.5, 240))])
    track = ingest_corners(_write(tmp_path, f"{header}\n{body}\n", "corners.csv"))
    assert [tuple(p) for _, p in track] == [(200, 240), (199.5, 240)]

    track = ingest_corners(_write(tmp_path, body + "\n", "bare.csv"))
    assert track.frames == [0, 1]


def test_ingest_corners_field_count(tmp_path):
    path = _write(tmp_path, "0,1,2,3\n", "corners.csv")
    with pytest.raises(FormatError, match=":1: expected 19 fields, found 4"):
        ingest_corners(path)


def test_middle_corner_is_selected(tmp_path):
    pairs = [(u, v) for v in (1, 2, 3) for u in (1, 2, 3)]
    row = ",".join(str(x) for x in [0, *[c for p in pairs for c in p]])
    track = ingest_corners(_write(tmp_path, row + "\n", "corners.csv"))
    assert track[0].pixel == Pixel(2, 2)


def test_non_numeric_corner(tmp_path):
    values = ["0"] + ["1"] * 18
    values[9] = "x"
    path = _write(tmp_path, ",".join(values) + "\n", "corners.csv")
    with pytest.raises(FormatError) as e:
        ingest_corners(path)
    assert e.value.line == 1


def test_missing_column(tmp_path):
    with pytest.raises(FormatError) as e:
        read_observations(_write(tmp_path, "frame,u,v\n0,320.0\n"))
    assert e.value.line == 2


def test_empty_track_writes_header_only(tmp_path):
    path = tmp_path / "obs.csv"
    write_observations(path, ObservationTrack())
    assert path.read_bytes() == b"frame,u,v\n"
    write_estimates(path, [])
    assert path.read_bytes() == b"frame,x,y,z,diag\n"


def test_undecodable_bytes(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_bytes(b"frame,u,v\n0,200,240\n1,\xff\xfe,240\n")
    with pytest.raises(FormatError) as e:
        read_observations(path)
    assert e.value.line == 3
    assert "not valid UTF-8" in str(e.value)
