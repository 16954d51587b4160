"""JSON encodings for matrices, quantum objects, polytopes and reports.

Matrix:   {"rows": r, "cols": c, "data": [[re, im], ...]}   (row-major)
State:    {"kind": "state", "dim": d, "rho": matrix}
POVM:     {"kind": "povm", "dim": d, "effects": [matrix, ...]}
Channel:  {"kind": "channel", "dim": d, "repr": "choi", "choi": matrix}
          {"kind": "channel", "dim": d, "repr": "kraus", "kraus": [matrix, ...]}
Polytope: {"kind": "polytope", "dim": n, "vertices": [[...], ...],
           "order_unit": [...], "point": [...]}        ("point" optional)

Floats are written with ``repr`` precision so every value round-trips.
"""
import json

import numpy as np

from .convex_base import PolytopeBase
from .errors import DimensionMismatch, ValidationError
from .qobjects import Povm, QuantumChannel, QuantumState, choi_from_kraus


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from None
    if rows < 1 or cols < 1:
        raise ValidationError("matrix must have positive rows and cols")
    if len(data) != rows * cols:
        raise DimensionMismatch(f"matrix data has {len(data)} entries, expected {rows * cols}")
    vals = []
    for entry in data:
        if isinstance(entry, (int, float)):
            vals.append(complex(entry))
        else:
            re, im = entry
            vals.append(complex(re, im))
    return np.array(vals, dtype=complex).reshape(rows, cols)


def _check_dim(obj, d):
    if "dim" in obj and int(obj["dim"]) != d:
        raise DimensionMismatch(f"declared dim {obj['dim']} but data has dimension {d}")


def state_to_json(state):
    return {"kind": "state", "dim": state.dim, "rho": matrix_to_json(state.rho)}


def povm_to_json(povm):
    return {"kind": "povm", "dim": povm.dim, "effects": [matrix_to_json(E) for E in povm.effects]}


def channel_to_json(ch, repr="choi"):
    out = {"kind": "channel", "dim": ch.dim, "repr": repr}
    if repr == "kraus":
        if ch.kraus is None:
            from .qobjects import kraus_from_choi

            kraus = kraus_from_choi(ch)
        else:
            kraus = ch.kraus
        out["kraus"] = [matrix_to_json(A) for A in kraus]
    else:
        out["choi"] = matrix_to_json(ch.choi)
    return out


def polytope_to_json(B, point=None):
    out = {"kind": "polytope", **B.to_json()}
    if point is not None:
        out["point"] = [float(v) for v in point]
    return out


def to_json(obj):
    if isinstance(obj, QuantumState):
        return state_to_json(obj)
    if isinstance(obj, Povm):
        return povm_to_json(obj)
    if isinstance(obj, QuantumChannel):
        return channel_to_json(obj)
    if isinstance(obj, PolytopeBase):
        return polytope_to_json(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def from_json(obj):
    """Decode and validate an object; polytopes with a point return ``(base, point)``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValidationError("top-level JSON value must be an object")
    kind = obj.get("kind")
    if kind is None and "vertices" in obj:
        kind = "polytope"
    if kind == "state":
        state = QuantumState(matrix_from_json(obj["rho"]))
        _check_dim(obj, state.dim)
        return state
    if kind == "povm":
        povm = Povm([matrix_from_json(E) for E in obj["effects"]])
        _check_dim(obj, povm.dim)
        return povm
    if kind == "channel":
        rep = obj.get("repr", "choi")
        if rep == "choi":
            ch = QuantumChannel(matrix_from_json(obj["choi"]))
        elif rep == "kraus":
            ch = choi_from_kraus([matrix_from_json(A) for A in obj["kraus"]])
        else:
            raise ValidationError(f"unknown channel repr {rep!r}")
        _check_dim(obj, ch.dim)
        return ch
    if kind == "polytope":
        B = PolytopeBase.from_json(obj)
        if "point" in obj:
            return B, np.asarray(obj["point"], dtype=float)
        return B
    raise ValidationError(f"unknown object kind {kind!r}")


def load(path):
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


def dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _encode_value(v):
    if isinstance(v, np.ndarray):
        if v.ndim == 2:
            return matrix_to_json(v)
        return [float(x) for x in np.real_if_close(v)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, list) and v and isinstance(v[0], np.ndarray):
        return [matrix_to_json(M) for M in v]
    return v


def report_to_json(report):
    """Serialize a :class:`~qbound.boundariness.BoundarinessReport`."""
    out = {
        "kind": report.kind,
        "b": float(report.b),
        "method": report.method,
        "optimizer": _encode_value(report.optimizer),
        "complement": _encode_value(report.complement),
        "iterations": int(report.iterations),
        "restarts_used": int(report.restarts_used),
        "converged": bool(report.converged),
        "flags": list(report.flags),
        "residuals": {k: float(v) for k, v in report.residuals.items()},
    }
    if report.kind in ("povm", "polytope"):
        out["witness_index"] = int(report.witness)
    if report.objective_history:
        out["objective_history"] = [float(v) for v in report.objective_history]
    return out
