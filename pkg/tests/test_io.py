import numpy as np
import pytest

from swarmbt.bt import parse
from swarmbt.io import (
    TrajectoryFormatError, format_trajectory, parse_trajectory, read_metrics, read_trajectory,
    write_metrics, write_trajectory,
)
from swarmbt.metrics import compute_metrics
from swarmbt.sim import ArenaConfig, init_state, simulate


@pytest.fixture
def traj():
    cfg = ArenaConfig(steps=5, agent_count=4)
    rng = np.random.default_rng(3)
    return simulate(parse("seq(random,northeast)"), init_state(cfg, rng), cfg, rng)


def test_round_trip_exact(traj, tmp_path):
    path = tmp_path / "obs.csv"
    write_trajectory(traj, path)
    back = read_trajectory(path)
    assert back.same_as(traj)
    assert back.config.agent_count == 4 and back.steps == 5


def test_layout(traj):
    lines = format_trajectory(traj).splitlines()
    assert lines[0] == "t,agent,x,y"
    assert len(lines) == 1 + 6 * 4
    assert lines[1].startswith("0,0,") and lines[5].startswith("1,0,")
    # at least 9 significant digits
    assert len(lines[1].split(",")[2].replace(".", "").lstrip("0")) >= 9


def test_truncated_names_row(traj):
    text = "\n".join(format_trajectory(traj).splitlines()[:-2]) + "\n"
    with pytest.raises(TrajectoryFormatError, match="line 24"):
        parse_trajectory(text)


def test_bad_value_names_row(traj):
    lines = format_trajectory(traj).splitlines()
    lines[3] = "0,2,abc,1.0"
    with pytest.raises(TrajectoryFormatError, match="line 4"):
        parse_trajectory("\n".join(lines))


def test_out_of_order(traj):
    lines = format_trajectory(traj).splitlines()
    lines[2], lines[3] = lines[3], lines[2]
    with pytest.raises(TrajectoryFormatError, match="line 3"):
        parse_trajectory("\n".join(lines))


def test_bad_header():
    with pytest.raises(TrajectoryFormatError, match="header"):
        parse_trajectory("a,b,c\n")


def test_missing_file(tmp_path):
    with pytest.raises(OSError, match="nope.csv"):
        read_trajectory(tmp_path / "nope.csv")


def test_metrics_round_trip(traj, tmp_path):
    m = compute_metrics(traj)
    write_metrics(m, tmp_path / "m.csv")
    assert np.array_equal(read_metrics(tmp_path / "m.csv").values, m.values)
    header = (tmp_path / "m.csv").read_text().splitlines()[0]
    assert header == ("t,com_x,com_y,max_shift,mode_index,longest_path,max_radius,"
                      "avg_local_density,avg_nn_distance,beta_index")
