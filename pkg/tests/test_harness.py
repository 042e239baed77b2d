import json
import math

import numpy as np
import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from distbb.diagnostics import IterationRecord
from distbb.exceptions import ConfigParseError, ConfigurationError, UsageError
from distbb.harness.cli import main
from distbb.harness.config import (ExperimentConfig, build_config, normalize, parse_config,
                                   serialize_config)
from distbb.harness.csvio import emit_csv, format_value, read_csv
from distbb.harness.presets import run_preset
from distbb.harness.runner import build_problem, initial_point, run_experiment, seed_streams

MINIMAL = "mode: centralized\nobjective: least_squares\nmax_iter: 50\n"

FULL_DISTRIBUTED = """
mode: distributed
objective: quadratic_network
n: 100
p: 10
topology: complete
weights: sinkhorn
condition_cap: 30
rule: bb1
max_iter: 50
eps: 1e-8
seed: 7
output_path: out/run.csv
"""


def test_minimal_config_gets_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.eps == 1e-8 and cfg.clamp_mode == "raw" and cfg.alpha0 is None
    assert cfg.n == 1 and cfg.m == cfg.p == 10


def test_centralized_forces_one_agent():
    assert parse_config(MINIMAL + "n: 40\n").n == 1


@pytest.mark.parametrize("extra, key", [
    ("n: 0\n", "n"), ("eps: -1\n", "eps"), ("colour: red\n", "colour"),
    ("rule: bb9\n", "rule"), ("max_iter: 2.5\n", "max_iter"), ("aligned: 3\n", "aligned"),
    ("m: 3\n", "m"), ("er_prob: 0.3\n", "er_prob"), ("condition_cap: 0.5\n", "condition_cap"),
    ("seed: -1\n", "seed"),
])
def test_bad_values_name_the_key(extra, key):
    with pytest.raises(ConfigParseError) as info:
        parse_config(MINIMAL + extra)
    assert info.value.key == key


@pytest.mark.parametrize("missing", ["mode", "objective", "max_iter"])
def test_missing_required_key(missing):
    text = "".join(l + "\n" for l in MINIMAL.splitlines() if not l.startswith(missing))
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    assert info.value.key == missing


def test_distributed_needs_two_agents():
    with pytest.raises(ConfigParseError):
        parse_config(FULL_DISTRIBUTED.replace("n: 100", "n: 1"))


def test_numeric_strings_are_coerced():
    cfg = parse_config(MINIMAL.replace("50", "'50'") + "eps: '1e-6'\n")
    assert cfg.max_iter == 50 and cfg.eps == 1e-6


def test_malformed_yaml():
    with pytest.raises(ConfigParseError):
        parse_config("mode: [unclosed\n")
    with pytest.raises(ConfigParseError):
        parse_config("- a list\n")


def test_full_config_round_trip():
    raw = yaml.safe_load(FULL_DISTRIBUTED)
    cfg = parse_config(FULL_DISTRIBUTED)
    assert yaml.safe_load(serialize_config(cfg)) == normalize(raw)
    assert parse_config(serialize_config(cfg)) == cfg


configs = st.fixed_dictionaries(
    {"mode": st.sampled_from(["centralized", "distributed"]),
     "objective": st.sampled_from(["quadratic_network", "least_squares", "identity"]),
     "max_iter": st.integers(1, 10**4)},
    optional={"n": st.integers(2, 500), "p": st.integers(1, 50),
              "topology": st.sampled_from(["complete", "ring"]),
              "weights": st.sampled_from(["metropolis", "sinkhorn"]),
              "condition_cap": st.floats(1.0, 1e4), "aligned": st.booleans(),
              "rule": st.sampled_from(["bb1", "bb2", "decay", "const_harmonic"]),
              "alpha0": st.floats(1e-6, 10.0), "clamp_mode": st.sampled_from(["raw", "bb_range"]),
              "alternate_every": st.integers(1, 20), "eps": st.floats(1e-300, 1.0),
              "seed": st.integers(0, 2**64 - 1), "output_path": st.text("abc/_.", min_size=1)})


@given(configs)
def test_serialize_parse_is_stable(raw):
    cfg = build_config(raw)
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert serialize_config(again) == text


def test_config_replace_revalidates():
    cfg = parse_config(MINIMAL)
    assert cfg.replace(rule="bb2").rule == "bb2"
    with pytest.raises(ConfigParseError):
        cfg.replace(max_iter=0)


def _record(k, ratio=0.5):
    return IterationRecord(k, 0.0, 0.1, ratio, 1e-3, 0.1, 0.2, 0, 1, math.inf, 0.9)


def test_emit_one_record(tmp_path):
    path = emit_csv([_record(1, math.nan)], tmp_path / "a.csv")
    text = path.read_bytes().decode("utf-8")
    assert text.count("\n") == 2 and "\r" not in text
    assert text.splitlines()[0] == ",".join(IterationRecord.columns())
    assert text.splitlines()[1] == "1,0.0,0.1,nan,0.001,0.1,0.2,0,1,inf,0.9"


def test_emit_rejects_empty(tmp_path):
    with pytest.raises(ConfigurationError):
        emit_csv([], tmp_path / "a.csv")


def test_emit_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_csv([_record(1)], tmp_path / "missing" / "dir" / "a.csv")


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_value(x)) == x


def test_csv_round_trip(tmp_path):
    records = [_record(k, 0.1 * k) for k in range(1, 5)]
    assert read_csv(emit_csv(records, tmp_path / "r.csv")) == records


def test_seed_streams_are_independent_and_stable():
    a, b = seed_streams(3), seed_streams(3)
    assert np.array_equal(initial_point(5, a["x0"]), initial_point(5, b["x0"]))
    assert not np.array_equal(initial_point(5, a["x0"]), initial_point(5, a["graph"]))
    assert np.linalg.norm(initial_point(5, a["x0"])) == pytest.approx(10.0)


def test_build_problem_for_least_squares_network():
    cfg = build_config(dict(mode="distributed", objective="least_squares", n=4, p=3, m=5,
                            topology="ring", max_iter=5))
    problem = build_problem(cfg)
    assert problem.objective.n == 4 and problem.mixing.n == 4


def test_run_writes_csv_and_sidecar(tmp_path):
    cfg = build_config(dict(mode="distributed", objective="quadratic_network", n=5, p=3,
                            topology="erdos_renyi", er_prob=0.7, max_iter=20, seed=11,
                            output_path=str(tmp_path / "x" / "run.csv")))
    result = run_experiment(cfg)
    meta = json.loads(result.meta_path.read_text())
    assert meta["seed"] == 11 and meta["config"] == normalize(meta["config"])
    assert len(result.csv_path.read_text().splitlines()) == len(result.records) + 1


def test_same_seed_same_bytes(tmp_path):
    base = dict(mode="distributed", objective="quadratic_network", n=8, p=3,
                weights="sinkhorn", max_iter=15, seed=5)
    a = run_experiment(build_config({**base, "output_path": str(tmp_path / "a.csv")}))
    b = run_experiment(build_config({**base, "output_path": str(tmp_path / "b.csv")}))
    assert a.csv_path.read_bytes() == b.csv_path.read_bytes()


def test_fig1_preset(tmp_path):
    results = run_preset("fig1_centralized", tmp_path)
    assert sorted(p.name for p in tmp_path.glob("*.csv")) == \
        ["fig1_centralized_bb1.csv", "fig1_centralized_decay.csv"]
    for r in results:
        assert len(r.csv_path.read_text().splitlines()) == 51


def test_superlinear_preset(tmp_path):
    central, distributed = run_preset("superlinear", tmp_path)
    assert {r.round: r.opt_err for r in central.records}[2] < 1e-12
    assert distributed.final.opt_err < 1e-10


def test_unknown_preset(tmp_path):
    with pytest.raises(UsageError):
        run_preset("fig3", tmp_path)


def test_cli_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(MINIMAL + f"output_path: {tmp_path / 'r.csv'}\n")
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "r.csv").exists() and (tmp_path / "r.json").exists()
    assert main(["preset", "nope", "--out", str(tmp_path)]) == 2
    assert main(["frobnicate"]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("mode: centralized\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run", "--config", str(tmp_path / "absent.yaml")]) == 2
    assert "objective" in capsys.readouterr().err
    assert main(["preset", "superlinear", "--out", str(tmp_path / "s")]) == 0
