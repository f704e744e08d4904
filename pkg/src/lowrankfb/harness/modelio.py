"""JSON model files and serialization of rational data."""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ModelFileError, UnstableA
from ..ratcore import Polynomial, RationalFunction, RationalMatrix
from ..ssreal import Realization

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"sqrt": math.sqrt}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_node(node.operand))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
            and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ModelFileError(f"unsupported expression element: {ast.dump(node)}")


def parse_number(x) -> float:
    """Accept numbers or arithmetic strings such as ``"3/2"`` or ``"-1/sqrt(2)"``."""
    if isinstance(x, bool):
        raise ModelFileError("booleans are not numbers")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            tree = ast.parse(x.strip(), mode="eval")
        except SyntaxError as exc:
            raise ModelFileError(f"cannot parse number {x!r}") from exc
        return _eval_node(tree)
    raise ModelFileError(f"expected a number, got {type(x).__name__}")


def parse_matrix(data, name, shape=None) -> np.ndarray:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ModelFileError(f"{name} must be a nested list (row-major)")
    rows = [[parse_number(v) for v in r] for r in data]
    if rows and len({len(r) for r in rows}) != 1:
        raise ModelFileError(f"{name} has ragged rows")
    arr = np.array(rows, dtype=float).reshape(len(rows), len(rows[0]) if rows else 0)
    if shape is not None:
        want = tuple(shape)
        if arr.size == 0 and 0 in want:
            return np.zeros(want)
        if arr.shape != want:
            raise ModelFileError(f"{name} has shape {arr.shape}, expected {want}")
    return arr


@dataclass
class ModelFile:
    realization: Realization
    labels: list
    description: str = ""
    seed: int | None = None
    extra: dict = field(default_factory=dict)


def load_model(path_or_dict, check_stable: bool = True) -> ModelFile:
    """Read a model file and validate dimensions and stability of ``A``."""
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        try:
            data = json.loads(Path(path_or_dict).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelFileError(f"cannot read model file: {exc}") from exc
    for key in "ABCD":
        if key not in data:
            raise ModelFileError(f"model file lacks matrix {key}")
    D = parse_matrix(data["D"], "D")
    p, m = D.shape
    A = parse_matrix(data["A"], "A")
    n = A.shape[0]
    if A.shape != (n, n):
        raise ModelFileError(f"A must be square, got {A.shape}")
    B = parse_matrix(data["B"], "B", (n, m))
    C = parse_matrix(data["C"], "C", (p, n))
    R = Realization(A, B, C, D)
    if check_stable:
        rad = R.spectral_radius
        if not rad < 1:
            raise UnstableA(f"A is not a stability matrix (spectral radius {rad:.6g})", radius=rad)
    labels = data.get("labels") or [f"zeta{i + 1}" for i in range(p)]
    if len(labels) != p:
        raise ModelFileError(f"{len(labels)} labels given for {p} components")
    extra = {k: v for k, v in data.items() if k not in {"A", "B", "C", "D", "labels", "description", "seed"}}
    return ModelFile(R, list(labels), data.get("description", ""), data.get("seed"), extra)


# ---------------------------------------------------------------------------
# serialization


def fmt(x: float) -> float:
    """Round to 12 significant digits so reports are byte-stable."""
    x = float(x)
    if x == 0 or not math.isfinite(x):
        return 0.0 if x == 0 else x
    return float(f"{x:.12g}")


def clean(obj):
    """Recursively convert numpy/complex data to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [fmt(obj.real), fmt(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, RationalFunction):
        return rf_to_json(obj)
    if isinstance(obj, RationalMatrix):
        return rm_to_json(obj)
    return obj


def _real_coeffs(c):
    c = np.asarray(c)
    if np.iscomplexobj(c):
        c = c.real
    if c.size:
        # rounding noise would otherwise show up as 1e-16 entries
        c = np.where(np.abs(c) <= 1e-13 * np.max(np.abs(c)), 0.0, c)
    return [fmt(v) for v in c]


def rf_to_json(r: RationalFunction) -> dict:
    return {"num": _real_coeffs(r.num.coeffs), "den": _real_coeffs(r.den.coeffs)}


def rf_from_json(d) -> RationalFunction:
    return RationalFunction(Polynomial([parse_number(c) for c in d["num"]]),
                            Polynomial([parse_number(c) for c in d.get("den", [1.0])]))


def rm_to_json(M: RationalMatrix) -> list:
    return [[rf_to_json(e) for e in row] for row in M.entries]


def rm_from_json(data) -> RationalMatrix:
    return RationalMatrix([[rf_from_json(e) for e in row] for row in data])


def dumps(report) -> str:
    return json.dumps(clean(report), indent=2, sort_keys=True) + "\n"
