"""JSON wire formats.

Matrices: ``{"dim": d, "re": [[...]], "im": [[...]]}`` (row-major).
Decompositions: ``{"dim": d, "weights": [...], "states": [{"re": [...],
"im": [...]}, ...]}``. Pair files carry both decompositions and both
target matrices. All floats are emitted with 17 significant digits so a
reader recovers every binary64 value bit-exactly, and emission is fully
deterministic: the same object always serializes to the same bytes.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .conjecture import ContextualityReport, FuzzResult, TrialReport
from .decompose import Decomposition, DecompositionPair, VerificationReport, make_pair
from .errors import SchemaError
from .linalg import DensityMatrix, PureState, validate_density


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise SchemaError(f"non-finite float {x!r} cannot be serialized")
    s = format(x, ".17g")
    # keep a decimal point so readers parse the value back as a float
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def _emit(obj, indent: int, out: list):
    pad = " " * indent
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise SchemaError(f"non-string key {k!r}")
            out.append(pad + "  " + json.dumps(k) + ": ")
            _emit(v, indent + 2, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, indent + 2, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise SchemaError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    out: list = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def _require(obj: dict, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing key {key!r}")
    return obj[key]


def _as_float_array(value, shape_hint: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{shape_hint}: not a numeric array") from exc
    return arr


def _as_complex(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    # assemble by field assignment: re + 1j*im would flip the sign of -0.0
    out = np.empty(re.shape, dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


# -- matrices -----------------------------------------------------------------


def matrix_to_obj(dm: DensityMatrix) -> dict:
    return {
        "dim": dm.dim,
        "re": dm.matrix.real.tolist(),
        "im": dm.matrix.imag.tolist(),
    }


def matrix_from_obj(obj: dict, tol: float | None = None) -> DensityMatrix:
    dim = int(_require(obj, "dim"))
    re = _as_float_array(_require(obj, "re"), "re")
    im = _as_float_array(_require(obj, "im"), "im")
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise SchemaError(f"matrix entries are not {dim}x{dim}")
    return validate_density(_as_complex(re, im), tol=tol)


# -- states and decompositions --------------------------------------------------


def state_to_obj(ps: PureState) -> dict:
    return {"re": ps.amplitudes.real.tolist(), "im": ps.amplitudes.imag.tolist()}


def state_from_obj(obj: dict) -> PureState:
    re = _as_float_array(_require(obj, "re"), "state re")
    im = _as_float_array(_require(obj, "im"), "state im")
    if re.shape != im.shape or re.ndim != 1:
        raise SchemaError("state entries must be equal-length vectors")
    return PureState(_as_complex(re, im))


def decomposition_to_obj(d: Decomposition) -> dict:
    return {
        "dim": d.dim,
        "weights": [float(w) for w in d.weights],
        "states": [state_to_obj(s) for s in d.states],
    }


def decomposition_from_obj(obj: dict, target: DensityMatrix | None = None) -> Decomposition:
    dim = int(_require(obj, "dim"))
    weights = _as_float_array(_require(obj, "weights"), "weights")
    states = tuple(state_from_obj(s) for s in _require(obj, "states"))
    if any(s.dim != dim for s in states):
        raise SchemaError("state dimension mismatch")
    if target is None:
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for w, s in zip(weights, states):
            acc += w * np.outer(s.amplitudes, s.amplitudes.conj())
        target = validate_density(acc)
    return Decomposition(weights=weights, states=states, target=target)


# -- pairs ----------------------------------------------------------------------


def pair_to_obj(pair: DecompositionPair) -> dict:
    return {
        "rho": matrix_to_obj(pair.left.target),
        "sigma": matrix_to_obj(pair.right.target),
        "left": decomposition_to_obj(pair.left),
        "right": decomposition_to_obj(pair.right),
        "hs_product": pair.hs_product,
        "max_deviation": pair.max_deviation,
        "delta_avg": pair.delta_avg,
    }


def pair_from_obj(obj: dict) -> DecompositionPair:
    rho = matrix_from_obj(_require(obj, "rho"))
    sigma = matrix_from_obj(_require(obj, "sigma"))
    left = decomposition_from_obj(_require(obj, "left"), target=rho)
    right = decomposition_from_obj(_require(obj, "right"), target=sigma)
    return make_pair(left, right)


# -- reports ---------------------------------------------------------------------


def trial_report_to_obj(rep: TrialReport, include_timing: bool = False) -> dict:
    obj = {
        "seed": rep.seed,
        "dim": rep.dim,
        "ranks": [rep.ranks[0], rep.ranks[1]],
        "hs_product": rep.hs_product,
        "lower": rep.lower,
        "upper": rep.upper,
        "best_delta": rep.best_delta,
        "max_deviation": rep.max_deviation,
        "converged": rep.converged,
        "restarts_used": rep.restarts_used,
    }
    if include_timing:
        obj["wall_time"] = rep.wall_time
    return obj


def fuzz_result_to_obj(result: FuzzResult, include_timing: bool = False) -> dict:
    return {
        "reports": [trial_report_to_obj(r, include_timing) for r in result.reports],
        "summary": result.summary,
    }


def contextuality_to_obj(rep: ContextualityReport) -> dict:
    return {
        "dim": rep.dim,
        "delta_unbiased": rep.delta_unbiased,
        "delta_noncontextual_max": rep.delta_noncontextual_max,
        "gap": rep.gap,
    }


def verification_to_obj(rep: VerificationReport) -> dict:
    return {
        "left_error": rep.left_error,
        "right_error": rep.right_error,
        "hs_product": rep.hs_product,
        "max_deviation": rep.max_deviation,
        "delta_avg": rep.delta_avg,
        "lower": rep.lower,
        "upper": rep.upper,
        "checks": rep.checks,
        "pass": rep.passed,
    }


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
