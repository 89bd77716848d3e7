"""Readers and writers for the on-disk formats."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .prob import JointDistribution
from .quantum import BipartiteState
from .spinalign import AlignmentSpec


class FormatError(ValueError):
    pass


def fmt(x) -> str:
    """Fixed six decimals with trailing zeros stripped; booleans as lowercase words."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    s = f"{float(x):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _exact_entry(v):
    if isinstance(v, bool):
        raise FormatError("boolean is not a probability")
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    raise FormatError(f"cannot read {v!r} as a probability")


def _float_entry(v):
    if isinstance(v, bool):
        raise FormatError("boolean is not a probability")
    if isinstance(v, str):
        return float(Fraction(v))
    if isinstance(v, (int, float)):
        return float(v)
    raise FormatError(f"cannot read {v!r} as a probability")


def _grid(rows, exact: bool) -> np.ndarray:
    conv = _exact_entry if exact else _float_entry
    if exact:
        out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                out[i, j] = conv(v)
        return out
    return np.array([[conv(v) for v in row] for row in rows], dtype=float)


def joint_from_json(obj, exact: bool = False) -> JointDistribution:
    try:
        x, y, p = int(obj["x"]), int(obj["y"]), obj["p"]
    except (KeyError, TypeError, ValueError) as err:
        raise FormatError(f"joint distribution needs integer 'x', 'y' and a grid 'p': {err}") from err
    if not isinstance(p, list) or len(p) != x or any(not isinstance(r, list) or len(r) != y for r in p):
        raise FormatError(f"grid 'p' must have {x} rows of {y} entries")
    try:
        return JointDistribution(_grid(p, exact))
    except (ValueError, ZeroDivisionError) as err:
        raise FormatError(str(err)) from err


def joint_from_csv(text: str, exact: bool = False) -> JointDistribution:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["i", "j", "p"]:
        raise FormatError("CSV header must be 'i,j,p'")
    cells = {}
    try:
        for row in reader:
            i, j = int(row["i"]), int(row["j"])
            if i < 0 or j < 0:
                raise FormatError("indices must be nonnegative")
            cells[(i, j)] = row["p"].strip()
    except (TypeError, ValueError, AttributeError) as err:
        raise FormatError(f"bad CSV row: {err}") from err
    if not cells:
        raise FormatError("CSV has no rows")
    dx = max(i for i, _ in cells) + 1
    dy = max(j for _, j in cells) + 1
    rows = [[cells.get((i, j), "0") for j in range(dy)] for i in range(dx)]
    try:
        return JointDistribution(_grid(rows, exact))
    except (ValueError, ZeroDivisionError) as err:
        raise FormatError(str(err)) from err


def read_joint(path, exact: bool = False) -> JointDistribution:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise FormatError(f"cannot read {path}: {err}") from err
    if path.suffix.lower() == ".csv":
        return joint_from_csv(text, exact)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: invalid JSON ({err})") from err
    return joint_from_json(obj, exact)


def joint_to_json(p: JointDistribution) -> dict:
    grid = p.probs
    if p.exact:
        rows = [[str(v) for v in row] for row in grid]
    else:
        rows = [[float(v) for v in row] for row in grid]
    return {"x": p.size_x, "y": p.size_y, "p": rows}


def joint_to_csv(p: JointDistribution) -> str:
    lines = ["i,j,p"]
    for i in range(p.size_x):
        for j in range(p.size_y):
            v = p.probs[i, j]
            lines.append(f"{i},{j},{v if p.exact else repr(float(v))}")
    return "\n".join(lines) + "\n"


def state_from_json(obj) -> BipartiteState:
    try:
        dA, dB = int(obj["dA"]), int(obj["dB"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as err:
        raise FormatError(f"state needs 'dA', 'dB', 're' and optional 'im': {err}") from err
    if re.shape != (dA * dB, dA * dB) or im.shape != re.shape:
        raise FormatError(f"state matrices must be {dA * dB}x{dA * dB}")
    try:
        return BipartiteState(re + 1j * im, dA, dB)
    except ValueError as err:
        raise FormatError(str(err)) from err


def state_to_json(rho: BipartiteState) -> dict:
    m = rho.matrix
    return {"dA": rho.dA, "dB": rho.dB, "re": m.real.tolist(), "im": m.imag.tolist()}


def read_state(path) -> BipartiteState:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise FormatError(f"cannot read state from {path}: {err}") from err
    return state_from_json(obj)


def spec_from_json(obj) -> AlignmentSpec:
    try:
        d, n = int(obj["d"]), int(obj["n"])
        mu = {int(k): float(v) for k, v in obj["mu"].items()}
        q = [float(v) for v in obj["Q_eigs"]]
    except (KeyError, TypeError, ValueError, AttributeError) as err:
        raise FormatError(f"alignment spec needs 'd', 'n', 'mu' and 'Q_eigs': {err}") from err
    try:
        return AlignmentSpec(d, n, mu, q)
    except ValueError as err:
        raise FormatError(str(err)) from err


def spec_to_json(spec: AlignmentSpec) -> dict:
    return {
        "d": spec.d,
        "n": spec.n,
        "mu": {str(k): v for k, v in spec.mu.items()},
        "Q_eigs": [float(v) for v in np.diag(spec.Q.matrix).real],
    }


def read_spec(path) -> AlignmentSpec:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise FormatError(f"cannot read alignment spec from {path}: {err}") from err
    return spec_from_json(obj)


def write_rows(rows: list[dict], fmt_name: str, stream, header: bool = True) -> None:
    """Emit rows as CSV (formatted numbers) or JSON (one array)."""
    if fmt_name == "json":
        json.dump([{k: _jsonable(v) for k, v in r.items()} for r in rows], stream)
        stream.write("\n")
        return
    if not rows:
        return
    keys = list(rows[0])
    if header:
        stream.write(",".join(keys) + "\n")
    for r in rows:
        stream.write(",".join(fmt(r[k]) for k in keys) + "\n")


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating, Fraction)):
        return float(v)
    return v
