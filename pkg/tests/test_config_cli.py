import dataclasses
from pathlib import Path

import numpy as np
import pytest

from conftest import planar_static_scenario
from gvfsim.cli import main
from gvfsim.config import (
    bundled_config_path,
    load_bundled,
    parse_config,
    scenario_to_dict,
    serialize_config,
)
from gvfsim.csvio import write_trajectory_csv
from gvfsim.errors import ConfigError
from gvfsim.gridsample import FieldSampleGrid, sample_field
from gvfsim.lowering import lower_scenario
from gvfsim.paths import numeric_path
from gvfsim.sim import TrajectoryRecord, run

STATIC_CONFIG = """
name: static-ellipse
path:
  builtin: ellipse
transform:
  kind: static
agents:
  - {x_m: [3.0, 0.5], theta: 0.0}
gains:
  k: [1.0, 1.0]
integrator:
  t_end_s: 1.0
"""

# frozen bytes of a deterministic numpy-backend run; schema changes must be deliberate
GOLDEN_CSV = """\
# name=golden
# spatial_dim=2
# num_agents=1
# transform_kind=static
# dt_s=0.25
# t_start_s=0.0
# t_end_s=0.5
# record_stride=1
# parameter_gain=1.0
# consensus_gain=0.0
# orientation=1
# backend=numpy
t_s,agent,xI_1,xI_2,xP_1,xP_2,theta,V,phi_norm
0.0,1,3.0,0.5,3.0,0.5,0.0,0.625,1.118033988749895
0.25,1,2.699633077294238,0.6425046407319477,2.699633077294238,0.6425046407319477,0.2848591517874792,0.36971463464263254,0.859900732227427
0.5,1,2.3408988365770305,0.7889862654352326,2.3408988365770305,0.7889862654352326,0.4861016417287758,0.21570110217031452,0.6568121530092368
"""


def test_bundled_sim1_parameters():
    sc = load_bundled("sim1")
    assert sc.name == "sim1"
    assert sc.transform_kind == "se2_unicycle"
    np.testing.assert_array_equal(sc.gains.error_weights, [1.0, 1.0])
    assert sc.gains.parameter_gain == 1.0
    assert sc.gains.consensus_gain == 1.0
    np.testing.assert_allclose(sc.pattern.theta_star, [np.pi / 4, 0.0])
    assert sc.graph.edges == ((0, 1),)
    assert sc.dt == 1e-3 and sc.t_end == 30.0 and sc.record_stride == 10
    np.testing.assert_array_equal(sc.initial_positions, [[2.0, 1.0], [1.0, -2.0]])


def test_bundled_sim2_parameters():
    sc = load_bundled("sim2")
    assert sc.num_agents == 4 and sc.spatial_dim == 3
    assert sc.gains.consensus_gain == 5.0
    assert sc.graph.edges == ((0, 1), (1, 2), (2, 3))
    np.testing.assert_allclose(sc.pattern.theta_star, [np.pi / 2, np.pi / 3, np.pi / 6, 0.0])
    # successive pattern offsets are pi/6
    diffs = np.diff(sc.pattern.theta_star)
    np.testing.assert_allclose(diffs, [-np.pi / 6] * 3)
    assert sc.t_end == 60.0


@pytest.mark.parametrize("name", ["sim1", "sim2"])
def test_round_trip_preserves_scenario(name):
    sc = load_bundled(name)
    text = serialize_config(sc)
    sc2 = parse_config(text)
    assert serialize_config(sc2) == text
    a, b = lower_scenario(sc), lower_scenario(sc2)
    assert np.array_equal(a.y0, b.y0)
    assert np.array_equal(a.path_terms, b.path_terms)
    assert np.array_equal(a.profile_terms, b.profile_terms)
    assert np.array_equal(a.laplacian, b.laplacian)
    assert np.array_equal(a.theta_star, b.theta_star)
    assert a.consensus_gain == b.consensus_gain and a.wedge_sign == b.wedge_sign


def test_round_trip_custom_trig_path():
    custom = STATIC_CONFIG.replace(
        "  builtin: ellipse",
        "  trig:\n    - [{a: 1.5, k: 1.0}, {b: 0.25, k: 3.0}]\n    - [{b: 1.0, k: 1.0}]",
    )
    sc = parse_config(custom)
    assert sc.path.dim == 2
    text = serialize_config(sc)
    assert serialize_config(parse_config(text)) == text


def test_defaults_applied():
    sc = parse_config(STATIC_CONFIG)
    assert sc.dt == 1e-3
    assert sc.record_stride == 10
    assert sc.t_start == 0.0
    assert sc.gains.parameter_gain == 1.0  # g defaults to 1
    np.testing.assert_array_equal(sc.gains.traversal, [1.0, 1.0, 1.0])
    assert sc.graph is None
    assert sc.output_basename == "static-ellipse"


@pytest.mark.parametrize(
    "mangle, fragment",
    [
        (lambda s: s.replace("x_m", "x_meters"), "agents[0]"),
        (lambda s: s + "\nunknown_section: 1\n", "unknown"),
        (lambda s: s.replace("  t_end_s: 1.0", "  pace: 1.0"), "t_end_s"),
        (lambda s: s.replace("k: [1.0, 1.0]", "k: [1.0, 1.0]\n  g: 1.0\n  convergence: [1.0, 1.0, 1.0]"), "either"),
        (lambda s: s.replace("builtin: ellipse", "builtin: parabola"), "parabola"),
        (lambda s: s.replace("kind: static", "kind: warp"), "warp"),
    ],
)
def test_schema_rejections_carry_context(mangle, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(mangle(STATIC_CONFIG))
    assert fragment in str(exc.value)


def test_not_yaml_rejected():
    with pytest.raises(ConfigError):
        parse_config("]{[ not yaml")
    with pytest.raises(ConfigError):
        parse_config("- just\n- a\n- list\n")


def test_gain_gate_applies_at_parse_time():
    text = load_bundled("sim1") and bundled_config_path("sim1").read_text()
    bad = text.replace("g: 1.0", "g: 1.5")
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    assert "g(1-g)" in str(exc.value)


def test_edge_and_pattern_validation():
    text = bundled_config_path("sim1").read_text()
    with pytest.raises(ConfigError) as exc:
        parse_config(text.replace("edges: [[1, 2]]", "edges: [[0, 1]]"))
    assert "1-based" in str(exc.value)
    with pytest.raises(ConfigError):
        parse_config(text.replace("theta_star: [0.7853981633974483, 0.0]", "theta_star: [0.0]"))


def test_profile_term_validation():
    text = bundled_config_path("sim1").read_text()
    with pytest.raises(ConfigError) as exc:
        parse_config(text.replace("kind: sin", "kind: sawtooth"))
    assert "sawtooth" in str(exc.value)
    with pytest.raises(ConfigError) as exc:
        parse_config(text.replace(", frequency_radps: 1.0", ""))
    assert "frequency" in str(exc.value)


def test_scientific_notation_accepted():
    sc = parse_config(STATIC_CONFIG.replace("t_end_s: 1.0", "t_end_s: 1.0\n  dt_s: 1e-3"))
    assert sc.dt == 1e-3


def test_serialize_rejects_opaque_path():
    with pytest.warns(UserWarning):
        path = numeric_path(lambda th: np.array([np.cos(th), np.sin(th)]), dim=2)
    sc = planar_static_scenario()
    sc = dataclasses.replace(sc, path=path)
    with pytest.raises(ValueError):
        scenario_to_dict(sc)


def test_trajectory_csv_golden(tmp_path):
    sc = planar_static_scenario(agents=((3.0, 0.5),), t_end=0.5, dt=0.25, stride=1)
    sc = dataclasses.replace(sc, name="golden", output_basename=None)
    record = run(sc, backend="numpy")
    out = tmp_path / "golden.csv"
    written = write_trajectory_csv(record, out)
    assert written == [out]
    assert out.read_text() == GOLDEN_CSV


def test_trajectory_csv_empty_guard(tmp_path):
    empty = TrajectoryRecord(
        t=np.empty(0),
        x_inertial=np.empty((0, 1, 2)),
        x_path_frame=np.empty((0, 1, 2)),
        theta=np.empty((0, 1)),
        target_state=np.empty((0, 0)),
        lyapunov=np.empty((0, 1)),
        error_norm=np.empty((0, 1)),
        edge_errors=np.empty((0, 0)),
        composite=np.empty(0),
        edges=(),
    )
    out = tmp_path / "never.csv"
    with pytest.raises(ValueError):
        write_trajectory_csv(empty, out)
    assert not out.exists()


def test_trajectory_csv_edges_companion(tmp_path):
    record = run(load_bundled("sim1") and dataclasses.replace(load_bundled("sim1"), t_end=0.02))
    written = write_trajectory_csv(record, tmp_path / "s1.csv")
    assert [p.name for p in written] == ["s1.csv", "s1_edges.csv"]
    lines = [l for l in (tmp_path / "s1_edges.csv").read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "t_s,agent_i,agent_j,theta_error"
    assert len(lines) - 1 == record.num_samples * 1
    assert lines[1].split(",")[1:3] == ["1", "2"]


def test_field_sample_static_hand_value():
    sc = parse_config(STATIC_CONFIG)
    grid = FieldSampleGrid(x_bounds=(-3.0, 3.0), y_bounds=(-3.0, 3.0), nx=3, ny=3)
    result = sample_field(sc, grid)
    assert result.num_singular == 0
    row = result.rows[0]  # (-3, -3, theta 0)
    np.testing.assert_allclose(row[:3], [-3.0, -3.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(row[3:6], [5.0, 4.0, -2.0], atol=1e-13)
    assert row[6] == pytest.approx(np.sqrt(45.0), rel=1e-13)


def test_cli_run_and_field(tmp_path):
    cfg = tmp_path / "static.yaml"
    cfg.write_text(STATIC_CONFIG)
    assert main(["run", str(cfg), "--out", str(tmp_path / "out"), "--dt", "0.01", "--t-end", "0.5"]) == 0
    body = (tmp_path / "out" / "static-ellipse.csv").read_text()
    assert "# dt_s=0.01" in body  # flag override lands in the header
    assert "# t_end_s=0.5" in body

    assert main(["field", str(cfg), "--grid=-3:3:5,-3:3:5", "--out", str(tmp_path / "f.csv")]) == 0
    header = (tmp_path / "f.csv").read_text().splitlines()
    assert header[0].startswith("# min_field_norm=")


def test_cli_demo(tmp_path):
    assert main(["demo", "sim1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "sim1.csv").exists()
    assert (tmp_path / "sim1_edges.csv").exists()


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text(bundled_config_path("sim1").read_text().replace("g: 1.0", "g: 1.5"))
    assert main(["run", str(bad)]) == 1
    assert main(["no-such-command"]) == 1
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_cli_output_basename(tmp_path):
    cfg = tmp_path / "named.yaml"
    cfg.write_text(STATIC_CONFIG + "output:\n  basename: custom-stem\n")
    assert main(["run", str(cfg), "--out", str(tmp_path), "--t-end", "0.05"]) == 0
    assert (tmp_path / "custom-stem.csv").exists()


def test_cli_bench():
    assert main(["bench", "--t-end", "0.1", "--repeats", "1"]) == 0
