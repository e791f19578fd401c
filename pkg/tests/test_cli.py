import json
import logging

import pytest

from vistrack.cli import EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from vistrack.metadata import read_metadata


@pytest.fixture(autouse=True)
def _restore_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def _simulate(tmp_path, *extra):
    truth, obs = tmp_path / "truth.csv", tmp_path / "obs.csv"
    code = main(
        ["simulate", "--scenario", "left36", "--out-truth", str(truth), "--out-obs", str(obs), *extra]
    )
    assert code == EXIT_OK
    return truth, obs


def _config(tmp_path, **values):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(values))
    return path


def test_simulate_track_eval(tmp_path, capsys):
    truth, obs = _simulate(tmp_path)
    assert truth.read_text().splitlines()[:2] == ["frame,x,y,z", "0,-36.0,0.0,150.0"]
    assert len(obs.read_text().splitlines()) == 61

    config = _config(tmp_path)
    for name in ("ekf", "pf"):
        est = tmp_path / f"{name}.csv"
        code = main(
            ["track", "--filter", name, "--obs", str(obs), "--config", str(config), "--out", str(est)]
        )
        assert code == EXIT_OK
        assert est.read_text().startswith("frame,x,y,z,diag\n0,")

        capsys.readouterr()
        assert main(["eval", "--est", str(est), "--truth", str(truth), "--camera", "500,320,240"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[:2] == ["frames=60", "tail=10"]
        assert lines[2].startswith("rmse_x=")
        assert lines[-1].startswith("reproj_final=")


def test_pipeline_is_deterministic(tmp_path):
    outputs = []
    for run in ("a", "b"):
        directory = tmp_path / run
        directory.mkdir()
        truth, obs = _simulate(directory, "--seed", "3")
        config = _config(directory, seed=9, particles=100)
        files = [truth, obs, directory / "truth.meta.json", directory / "obs.meta.json"]
        for name in ("ekf", "pf"):
            est = directory / f"{name}.csv"
            main(["track", "--filter", name, "--obs", str(obs), "--config", str(config), "--out", str(est)])
            files += [est, directory / f"{name}.meta.json"]
        outputs.append([f.read_bytes() for f in files])
    assert outputs[0] == outputs[1]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["fly"],
        ["simulate", "--scenario", "left36"],
        ["simulate", "--scenario", "middle", "--out-truth", "t", "--out-obs", "o"],
        ["calib-check", "--camera", "500,320", "--board-center", "0,0,150", "--square-size", "4", "--out", "c"],
        ["-v", "-q", "eval", "--est", "e", "--truth", "t"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_help(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "calib-check" in capsys.readouterr().out


def test_bad_observation_file(tmp_path, capsys):
    obs = tmp_path / "obs.csv"
    obs.write_text("frame,u,v\n0,200,240\n1,nan,240\n")
    code = main(
        ["track", "--filter", "ekf", "--obs", str(obs), "--config", str(_config(tmp_path)), "--out", str(tmp_path / "e.csv")]
    )
    assert code == EXIT_DATA
    assert f"{obs}:3:" in capsys.readouterr().err


def test_missing_file(tmp_path):
    code = main(["eval", "--est", str(tmp_path / "nope.csv"), "--truth", str(tmp_path / "nope.csv")])
    assert code == EXIT_DATA


def test_unknown_config_key(tmp_path):
    _, obs = _simulate(tmp_path)
    config = _config(tmp_path, partcles=10)
    code = main(["track", "--filter", "pf", "--obs", str(obs), "--config", str(config), "--out", str(tmp_path / "e.csv")])
    assert code == EXIT_DATA


def test_initial_point_behind_camera(tmp_path, capsys):
    _, obs = _simulate(tmp_path)
    config = _config(tmp_path, initial_point=[0, 0, -150])
    code = main(["track", "--filter", "ekf", "--obs", str(obs), "--config", str(config), "--out", str(tmp_path / "e.csv")])
    assert code == EXIT_NUMERICAL
    assert "ERROR" in capsys.readouterr().err


def test_eval_frame_mismatch(tmp_path):
    truth, _ = _simulate(tmp_path)
    (tmp_path / "short").mkdir()
    short, _ = _simulate(tmp_path / "short", "--frames", "5")
    est = tmp_path / "est.csv"
    est.write_text("frame,x,y,z,diag\n" + "".join(f"{t},0,0,150,1\n" for t in range(5)))
    assert main(["eval", "--est", str(est), "--truth", str(truth)]) == EXIT_DATA
    assert main(["eval", "--est", str(est), "--truth", str(short)]) == EXIT_OK


def test_calib_check(tmp_path):
    plain, shifted = tmp_path / "plain.csv", tmp_path / "shifted.csv"
    common = ["calib-check", "--camera", "500,320,240", "--board-center", "0,0,150", "--square-size", "4"]
    assert main([*common, "--out", str(plain)]) == EXIT_OK
    assert main([*common, "--shift", "10,0,0", "--out", str(shifted)]) == EXIT_OK

    rows = plain.read_text().splitlines()
    assert rows[0] == "corner,x,y,z,u,v"
    assert len(rows) == 10
    assert rows[5] == "5,0.0,0.0,150.0,320.0,240.0"

    for a, b in zip(rows[1:], shifted.read_text().splitlines()[1:]):
        du = float(b.split(",")[4]) - float(a.split(",")[4])
        assert du == pytest.approx(500 * 10 / 150, abs=1e-9)


def test_track_from_corners(tmp_path):
    corners = tmp_path / "corners.csv"
    rows = []
    for t in range(5):
        values = []
        for k in range(1, 10):
            values += [200 - 0.5 * t, 240] if k == 5 else [0, 0]
        rows.append(",".join(str(v) for v in [t, *values]))
    corners.write_text("\n".join(rows) + "\n")
    est = tmp_path / "est.csv"
    code = main(
        ["track", "--filter", "ekf", "--corners", str(corners), "--config", str(_config(tmp_path)), "--out", str(est)]
    )
    assert code == EXIT_OK
    assert len(est.read_text().splitlines()) == 6
    first = est.read_text().splitlines()[1].split(",")
    assert float(first[1]) < 0


def test_experiment(tmp_path, capsys):
    out = tmp_path / "runs"
    code = main(["experiment", "--out-dir", str(out), "--frames", "20", "--tail", "5"])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "left36.ekf.frames=20" in lines
    assert "right30.pf.tail=5" in lines
    for scenario in ("left36", "right30"):
        for kind in ("truth", "obs", "ekf", "pf"):
            assert (out / f"{scenario}_{kind}.csv").exists()
    metadata = read_metadata(out / "metadata.json")
    assert metadata["tail"] == 5
    assert sorted(metadata["scenarios"]) == ["left36", "right30"]
    assert metadata["scenarios"]["right30"]["frames"] == 20
    assert metadata["filters"]["ekf"]["filter"] == "ekf"
    assert metadata["filters"]["pf"]["particle"]["particles"] == 1000


def test_simulate_records_parameters(tmp_path):
    truth, obs = _simulate(tmp_path, "--camera", "800,300,200", "--seed", "7", "--frames", "12")
    metadata = read_metadata(tmp_path / "obs.meta.json")
    assert metadata == read_metadata(tmp_path / "truth.meta.json")
    assert metadata["scenario"] == "left36"
    assert metadata["seed"] == 7
    assert metadata["frames"] == 12
    assert metadata["start"] == [-36.0, 0.0, 150.0]
    assert metadata["camera"]["P"][0] == [800.0, 0.0, 300.0, 0.0]
    assert metadata["camera"]["P"][1] == [0.0, 800.0, 200.0, 0.0]
    assert metadata["camera"]["image_size"] == [640, 480]


@pytest.mark.parametrize("name", ["ekf", "pf"])
def test_track_records_parameters(tmp_path, name):
    _, obs = _simulate(tmp_path, "--frames", "5", "--camera", "800,300,200")
    config = _config(tmp_path, seed=9, particles=100, camera=[800, 300, 200])
    est = tmp_path / "est.csv"
    code = main(["track", "--filter", name, "--obs", str(obs), "--config", str(config), "--out", str(est)])
    assert code == EXIT_OK

    metadata = read_metadata(tmp_path / "est.meta.json")
    assert metadata["filter"] == name
    assert metadata["seed"] == 9
    assert metadata["camera"]["P"][0] == [800.0, 0.0, 300.0, 0.0]
    if name == "ekf":
        assert "particle" not in metadata
        assert len(metadata["kalman"]["R"]) == 2
    else:
        assert "kalman" not in metadata
        assert metadata["particle"]["particles"] == 100
        assert metadata["particle"]["resampler"] == "systematic"


def test_calib_check_records_parameters(tmp_path):
    out = tmp_path / "board.csv"
    argv = ["calib-check", "--camera", "500,320,240", "--board-center", "0,0,150", "--square-size", "4"]
    assert main([*argv, "--shift", "10,0,0", "--out", str(out)]) == EXIT_OK
    metadata = read_metadata(tmp_path / "board.meta.json")
    assert metadata["board_center"] == [0.0, 0.0, 150.0]
    assert metadata["shift"] == [10.0, 0.0, 0.0]
    assert metadata["rows"] == metadata["cols"] == 3


def test_calib_check_board_behind_camera(tmp_path, capsys):
    argv = ["calib-check", "--camera", "500,320,240", "--board-center", "0,0,-150", "--square-size", "4"]
    assert main([*argv, "--out", str(tmp_path / "board.csv")]) == EXIT_DATA
    assert "Board cannot be projected" in capsys.readouterr().err
    assert not (tmp_path / "board.csv").exists()


def test_undecodable_observation_file(tmp_path, capsys):
    obs = tmp_path / "obs.csv"
    obs.write_bytes(b"frame,u,v\n0,200,240\n1,\xff\xfe,240\n")
    argv = ["track", "--filter", "ekf", "--obs", str(obs), "--config", str(_config(tmp_path))]
    assert main([*argv, "--out", str(tmp_path / "est.csv")]) == EXIT_DATA
    assert f"{obs}:3:" in capsys.readouterr().err


def test_undecodable_config_file(tmp_path, capsys):
    _, obs = _simulate(tmp_path, "--frames", "3")
    config = tmp_path / "config.json"
    config.write_bytes(b'{\n  "seed": "\xff"\n}\n')
    argv = ["track", "--filter", "pf", "--obs", str(obs), "--config", str(config)]
    assert main([*argv, "--out", str(tmp_path / "est.csv")]) == EXIT_DATA
    assert f"{config}:2:" in capsys.readouterr().err
