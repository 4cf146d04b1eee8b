import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypertruss.benchmarks import BENCHMARK_IDS, build_benchmark
from hypertruss.io import (CSV_HEADER, ModelFileError, dump_model, format_rows, load_model,
                           load_run_config, model_from_dict, model_to_dict, read_results_csv,
                           validate_run_config, write_results_csv)
from hypertruss.model import Candidate, InvalidModelError
from hypertruss.svg import emit_svg, render_svg


def test_shipped_eight_member_file_matches_registry():
    path = resources.files("hypertruss") / "data" / "eight-member.json"
    assert load_model(path) == build_benchmark("eight-member")


@pytest.mark.parametrize("bid", BENCHMARK_IDS)
def test_dump_load_round_trip(bid, tmp_path):
    m = build_benchmark(bid)
    dump_model(m, tmp_path / "m.json")
    assert load_model(tmp_path / "m.json") == m


def _doc():
    return model_to_dict(build_benchmark("two-bar-oracle"))


def test_members_may_give_modulus_and_area():
    doc = _doc()
    doc["members"][0] = {"a": 0, "b": 1, "E": 100.0, "A": 1000.0}
    assert model_from_dict(doc).members[0].axial_stiffness == 1e5


def test_unknown_key_rejected():
    doc = _doc()
    doc["nodes"][0]["colour"] = "red"
    with pytest.raises(ModelFileError, match="nodes/0"):
        model_from_dict(doc)
    doc = _doc()
    doc["extra"] = 1
    with pytest.raises(ModelFileError):
        model_from_dict(doc)


def test_missing_node_names_member():
    doc = _doc()
    doc["members"][1]["b"] = 99
    with pytest.raises(InvalidModelError, match="member 1"):
        model_from_dict(doc)


def test_zero_variable_load_is_invalid():
    doc = _doc()
    doc["loads"]["variable"] = []
    with pytest.raises(InvalidModelError, match="variable load"):
        model_from_dict(doc)


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "nodes": [\n    {"id": 0,,}\n  ]\n}\n')
    with pytest.raises(ModelFileError, match="line 3"):
        load_model(p)


def test_run_config_validation(tmp_path):
    ok = {"model": "eight-member", "strategy": "single", "single": {"runs": 2}}
    assert validate_run_config(ok) is ok
    with pytest.raises(ModelFileError, match="strategy"):
        validate_run_config({"model": "eight-member", "strategy": "random"})
    with pytest.raises(ModelFileError):
        validate_run_config({**ok, "verbose": True})
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(ok))
    assert load_run_config(p) == ok


row = st.fixed_dictionaries({
    "run_id": st.integers(-1, 10**6), "strategy": st.sampled_from(["single", "hypersphere"]),
    "sphere_index": st.integers(-1, 1000), "is_center": st.booleans(),
    "d_mm": st.floats(allow_nan=False), "lambda": st.floats(allow_nan=False),
    "objective": st.floats(0, allow_nan=False), "generations": st.integers(0, 10**6),
    "seed": st.integers(0, 2**63 - 1),
})


@given(st.lists(row, max_size=20))
def test_csv_round_trip_is_lossless(rows):
    import tempfile
    from pathlib import Path
    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "r.csv"
        write_results_csv(rows, p)
        assert read_results_csv(p) == rows
        assert p.read_text().splitlines()[0] == ",".join(CSV_HEADER)


def test_csv_format_is_stable():
    text = format_rows([{"run_id": 0, "strategy": "single", "sphere_index": -1,
                         "is_center": False, "d_mm": 0.1, "lambda": -2.0, "objective": 1e-6,
                         "generations": 12, "seed": 7}])
    assert text == (
        "run_id,strategy,sphere_index,is_center,d_mm,lambda,objective,generations,seed\n"
        "0,single,-1,0,0.1,-2.0,1e-06,12,7\n")


def test_svg_overlays_and_determinism(tmp_path, eight):
    mirror = Candidate([0, 0, -2000.0], 0.0)
    a = emit_svg(eight, mirror, tmp_path / "a.svg").read_bytes()
    b = emit_svg(eight, mirror, tmp_path / "b.svg").read_bytes()
    assert a == b
    text = a.decode()
    assert 'data-node="0" data-x="0.000" data-y="0.000" data-z="-1000.000"' in text
    assert "#000000" in text and "#1f4fd8" in text


def test_svg_zero_displacement_overlays_exactly(eight):
    text = render_svg(eight, Candidate(np.zeros(3), 0.0))
    lines = [l for l in text.splitlines() if l.startswith("<line")]
    black = [l.split(' stroke=')[0] for l in lines if "#000000" in l]
    blue = [l.split(' stroke=')[0] for l in lines if "#1f4fd8" in l]
    assert black == blue and len(black) == 2 * len(eight.members)
