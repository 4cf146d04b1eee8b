"""Model files, run-configuration files and the results CSV.

Model file (JSON)::

    {
      "name": "eight-member",
      "nodes": [{"id": 0, "coords": [0, 0, 1000], "fixed": [false, false, false]}, ...],
      "members": [{"a": 0, "b": 1, "k": 451500.0}, {"a": 0, "b": 2, "E": 70, "A": 6450}, ...],
      "loads": {"permanent": [], "variable": [{"node": 0, "force": [0, 0, -4450]}]},
      "control": {"mode": "node-axis", "node": 0, "axis": "z", "sign": -1}
    }

Unknown keys are rejected. Units are mm / N / MPa.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import jsonschema

from .model import (AXES, ControlPoint, InvalidModelError, MemberSpec, NodeSpec,
                    TrussModel)


class ModelFileError(ValueError):
    """The file could not be parsed or does not follow the schema."""


_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_LOAD = {
    "type": "object",
    "properties": {"node": {"type": "integer"}, "force": _VEC3},
    "required": ["node", "force"],
    "additionalProperties": False,
}

MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "nodes": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "integer"},
                    "coords": _VEC3,
                    "fixed": {"type": "array", "items": {"type": "boolean"},
                              "minItems": 3, "maxItems": 3},
                },
                "required": ["id", "coords"],
                "additionalProperties": False,
            },
        },
        "members": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "a": {"type": "integer"},
                    "b": {"type": "integer"},
                    "k": {"type": "number"},
                    "E": {"type": "number"},
                    "A": {"type": "number"},
                },
                "required": ["a", "b"],
                "oneOf": [{"required": ["k"]}, {"required": ["E", "A"]}],
                "additionalProperties": False,
            },
        },
        "loads": {
            "type": "object",
            "properties": {
                "permanent": {"type": "array", "items": _LOAD},
                "variable": {"type": "array", "items": _LOAD},
            },
            "additionalProperties": False,
        },
        "control": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["node-axis", "norm"]},
                "node": {"type": "integer"},
                "axis": {"enum": ["x", "y", "z", 0, 1, 2]},
                "sign": {"type": "number"},
            },
            "required": ["mode"],
            "additionalProperties": False,
        },
    },
    "required": ["nodes", "members", "loads"],
    "additionalProperties": False,
}


def _validate(doc, schema, what):
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ModelFileError(f"{what}: at {where}: {err.message}")


def _parse_json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(
            f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def model_from_dict(doc: dict, source="model") -> TrussModel:
    _validate(doc, MODEL_SCHEMA, source)
    nodes = [NodeSpec(n["id"], n["coords"], n.get("fixed", (False, False, False)))
             for n in doc["nodes"]]
    members = []
    for m in doc["members"]:
        k = m["k"] if "k" in m else m["E"] * m["A"]
        members.append(MemberSpec(m["a"], m["b"], k))

    def loads(kind):
        out = {}
        for item in doc["loads"].get(kind, []):
            prev = out.get(item["node"], (0.0, 0.0, 0.0))
            out[item["node"]] = tuple(p + f for p, f in zip(prev, item["force"]))
        return out

    c = doc.get("control", {"mode": "norm"})
    axis = c.get("axis", 2)
    control = ControlPoint(c["mode"], c.get("node"), AXES.get(axis, axis), c.get("sign", -1.0))
    try:
        return TrussModel(nodes, members, loads("permanent"), loads("variable"), control,
                          doc.get("name", ""))
    except InvalidModelError as exc:
        raise InvalidModelError(f"{source}: {exc}") from None


def model_to_dict(model: TrussModel) -> dict:
    c = model.control
    control = {"mode": c.mode}
    if c.mode == "node-axis":
        control.update(node=c.node, axis="xyz"[c.axis], sign=c.sign)
    return {
        "name": model.name,
        "nodes": [{"id": n.id, "coords": list(n.coords), "fixed": list(n.fixed)}
                  for n in model.nodes],
        "members": [{"a": m.node_a, "b": m.node_b, "k": m.axial_stiffness}
                    for m in model.members],
        "loads": {
            "permanent": [{"node": i, "force": list(v)} for i, v in model.permanent_load],
            "variable": [{"node": i, "force": list(v)} for i, v in model.variable_load],
        },
        "control": control,
    }


def load_model(path) -> TrussModel:
    path = Path(path)
    return model_from_dict(_parse_json(path.read_text(), str(path)), str(path))


def dumps_model(model: TrussModel) -> str:
    """JSON text with one node, member or load per line."""
    doc = model_to_dict(model)

    def items(xs, indent):
        if not xs:
            return "[]"
        pad = " " * indent
        return "[\n" + ",\n".join(pad + json.dumps(x) for x in xs) + "\n" + pad[:-2] + "]"

    loads = doc["loads"]
    return (
        "{\n"
        f'  "name": {json.dumps(doc["name"])},\n'
        f'  "nodes": {items(doc["nodes"], 4)},\n'
        f'  "members": {items(doc["members"], 4)},\n'
        '  "loads": {\n'
        f'    "permanent": {items(loads["permanent"], 6)},\n'
        f'    "variable": {items(loads["variable"], 6)}\n'
        "  },\n"
        f'  "control": {json.dumps(doc["control"])}\n'
        "}\n"
    )


def dump_model(model: TrussModel, path):
    Path(path).write_text(dumps_model(model))


# -- run configuration ------------------------------------------------------------

_RANGE = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

RUN_SCHEMA = {
    "type": "object",
    "properties": {
        "model": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "strategy": {"enum": ["single", "informed", "hypersphere"]},
        "seed": {"type": "integer"},
        "optimizer": {
            "type": "object",
            "properties": {
                "algorithm": {"type": "string"},
                "population_size": {"type": "integer", "minimum": 1},
                "max_generations": {"type": "integer", "minimum": 1},
                "target_objective": {"type": "number", "exclusiveMinimum": 0},
                "params": {"type": "object"},
            },
            "additionalProperties": False,
        },
        "domain": {
            "type": "object",
            "properties": {
                "displacement": _RANGE,
                "lambda": _RANGE,
                "along_control": {"type": "boolean"},
                "lower": {"type": "array", "items": {"type": "number"}},
                "upper": {"type": "array", "items": {"type": "number"}},
            },
            "additionalProperties": False,
        },
        "single": {
            "type": "object",
            "properties": {"runs": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
        "informed": {
            "type": "object",
            "properties": {
                "control_intervals": {"type": "array", "items": _RANGE, "minItems": 1},
                "variable_stages": {"type": "array", "items": _RANGE},
                "trials_per_cell": {"type": "integer", "minimum": 1},
            },
            "required": ["control_intervals"],
            "additionalProperties": False,
        },
        "hypersphere": {
            "type": "object",
            "properties": {
                "r0": {"type": "number", "exclusiveMinimum": 0},
                "schedule": {"enum": ["fixed", "halving", "additive"]},
                "additive_increment": {"type": "number"},
                "min_radius": {"type": "number", "exclusiveMinimum": 0},
                "trials_per_sphere": {"type": "integer", "minimum": 1},
                "d_max": {"type": "number"},
                "max_spheres": {"type": "integer", "minimum": 1},
                "max_stalls": {"type": "integer", "minimum": 1},
                "seed_box": _RANGE,
                "lambda_ratio": {"type": "number", "exclusiveMinimum": 0},
                "lambda_weight": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "dir": {"type": "string"},
                "csv": {"type": "string"},
                "profile_csv": {"type": "string"},
                "svg": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
    "required": ["model", "strategy"],
    "additionalProperties": False,
}


def validate_run_config(doc: dict, source="config") -> dict:
    _validate(doc, RUN_SCHEMA, source)
    return doc


def load_run_config(path) -> dict:
    path = Path(path)
    return validate_run_config(_parse_json(path.read_text(), str(path)), str(path))


# -- results CSV --------------------------------------------------------------------

CSV_HEADER = ["run_id", "strategy", "sphere_index", "is_center", "d_mm", "lambda",
              "objective", "generations", "seed"]


def format_rows(rows) -> str:
    """Serialize result rows; floats use the shortest round-tripping repr."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([int(r["run_id"]), r["strategy"], int(r["sphere_index"]),
                    int(bool(r["is_center"])), repr(float(r["d_mm"])), repr(float(r["lambda"])),
                    repr(float(r["objective"])), int(r["generations"]), int(r["seed"])])
    return buf.getvalue()


def write_results_csv(rows, path):
    Path(path).write_text(format_rows(rows))


def read_results_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ModelFileError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for r in reader:
            out.append({
                "run_id": int(r["run_id"]), "strategy": r["strategy"],
                "sphere_index": int(r["sphere_index"]), "is_center": bool(int(r["is_center"])),
                "d_mm": float(r["d_mm"]), "lambda": float(r["lambda"]),
                "objective": float(r["objective"]), "generations": int(r["generations"]),
                "seed": int(r["seed"]),
            })
        return out
