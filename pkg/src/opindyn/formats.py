"""Text formats: JSON network documents, JSON reports and CSV trajectories.

Network document (UTF-8 JSON, ``schema_version`` ``"1"``)::

    {
      "schema_version": "1",
      "n": 3, "d": 1,
      "matrix": [[0.5, 0.5, 0], ...],            # or
      "arcs": [{"from": 1, "to": 2, "weight": 0.5}, ...],
      "lambda": [...], "gamma": [...], "u": [[...], ...], "C": [[...]],
      "sources": {"B": [[...]], "s": [[...]]},
      "model": "degroot" | "abelson" | "taylor" | "fj",
      "x0": [[...], ...]
    }

Agent indices are 1-based.  An arc ``{"from": j, "to": i, "weight": w}``
means agent ``j`` influences agent ``i`` and sets ``matrix[i][j] = w``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import Abelson, DeGroot, FriedkinJohnsen, Taylor, Trajectory
from .matrices import renormalize_rows

__all__ = [
    "SCHEMA_VERSION",
    "MODELS",
    "DocumentError",
    "RowDriftWarning",
    "NetworkDocument",
    "load_network",
    "render_network",
    "save_report",
    "save_trajectory",
    "load_trajectory",
]

SCHEMA_VERSION = "1"
MODELS = ("degroot", "abelson", "taylor", "fj")
DRIFT_SILENT = 1e-9
DRIFT_LIMIT = 1e-6

_KNOWN = {"schema_version", "n", "d", "matrix", "arcs", "lambda", "gamma", "u", "C",
          "sources", "model", "x0"}


class DocumentError(ValueError):
    """Schema violation; ``where`` names the offending field or line."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class RowDriftWarning(UserWarning):
    """Row sums were off by more than 1e-9 (but at most 1e-6) and have been renormalized."""


@dataclass
class NetworkDocument:
    n: int
    d: int
    matrix: np.ndarray
    model: str
    arcs_form: bool = False
    lam: np.ndarray | None = None
    gamma: np.ndarray | None = None
    u: np.ndarray | None = None
    C: np.ndarray | None = None
    B: np.ndarray | None = None
    s: np.ndarray | None = None
    x0: np.ndarray | None = None

    def to_model(self, model=None):
        """Build the model configuration (``DeGroot``, ``Abelson``, ``Taylor`` or ``FriedkinJohnsen``)."""
        tag = model or self.model
        if tag == "degroot":
            return DeGroot(self.matrix)
        if tag == "abelson":
            return Abelson(self.matrix)
        if tag == "taylor":
            if self.B is not None:
                return Taylor.from_sources(self.matrix, self.B, self.s)
            if self.gamma is None or self.u is None:
                raise DocumentError("the taylor model needs gamma and u, or sources", "gamma")
            return Taylor(self.matrix, self.gamma, self.u)
        if tag == "fj":
            if self.lam is None or self.u is None:
                raise DocumentError("the fj model needs lambda and u", "lambda")
            return FriedkinJohnsen(self.matrix, self.lam, self.u, self.C)
        raise DocumentError(f"unknown model {tag!r}; choose from {', '.join(MODELS)}", "model")

    def initial_state(self) -> np.ndarray:
        """``x0`` if given, else ``u`` (the usual choice ``x(0) = u``)."""
        if self.x0 is not None:
            return self.x0
        if self.u is not None:
            return self.u
        raise DocumentError("no initial opinions: supply x0 (or u)", "x0")


def _array(value, where, shape=None, ndim=None):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"expected a numeric array ({exc})", where) from None
    if ndim is not None and arr.ndim != ndim:
        raise DocumentError(f"expected a {ndim}-dimensional array, got shape {arr.shape}", where)
    if shape is not None and arr.shape != shape:
        raise DocumentError(f"expected shape {shape}, got {arr.shape}", where)
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        raise DocumentError(f"non-finite entry at {tuple(int(i) + 1 for i in bad[0])}", where)
    return arr


def _opinion_block(value, where, n, d):
    arr = _array(value, where)
    if arr.ndim == 1 and d == 1:
        arr = arr[:, None]
    if arr.shape != (n, d):
        raise DocumentError(f"expected shape ({n}, {d}), got {arr.shape}", where)
    return arr


def _int_field(raw, key):
    v = raw.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise DocumentError("must be a positive integer", key)
    return v


def _stochastic(M, where):
    drift = float(np.max(np.abs(M.sum(axis=1) - 1.0)))
    if drift > DRIFT_LIMIT:
        row = int(np.argmax(np.abs(M.sum(axis=1) - 1.0)))
        raise DocumentError(f"row {row + 1} sums to {M[row].sum()!r}; not stochastic", where)
    if drift > DRIFT_SILENT:
        warnings.warn(f"{where}: row sums drift by {drift:.3g}; renormalized", RowDriftWarning, stacklevel=3)
    return renormalize_rows(M)


def _infer_model(raw, M):
    if "lambda" in raw:
        return "fj"
    if "gamma" in raw or "sources" in raw:
        return "taylor"
    if np.all(np.abs(M.sum(axis=1) - 1.0) <= DRIFT_LIMIT):
        return "degroot"
    return "abelson"


def load_network(text: str) -> NetworkDocument:
    """Parse and validate a network document.

    Raises
    ------
    DocumentError
        With a ``line N, column M`` or field-name diagnostic.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(raw, dict):
        raise DocumentError("top level must be an object", "line 1")
    unknown = sorted(set(raw) - _KNOWN)
    if unknown:
        raise DocumentError(f"unknown field(s) {', '.join(unknown)}", unknown[0])
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"expected \"{SCHEMA_VERSION}\", got {raw.get('schema_version')!r}", "schema_version")
    n = _int_field(raw, "n")
    d = _int_field(raw, "d") if "d" in raw else 1

    if ("matrix" in raw) == ("arcs" in raw):
        raise DocumentError("exactly one of 'matrix' or 'arcs' is required", "matrix")
    if "matrix" in raw:
        M = _array(raw["matrix"], "matrix", shape=(n, n))
    else:
        M = np.zeros((n, n))
        if not isinstance(raw["arcs"], list):
            raise DocumentError("must be a list of {from, to, weight}", "arcs")
        for k, arc in enumerate(raw["arcs"]):
            where = f"arcs[{k}]"
            if not isinstance(arc, dict) or set(arc) != {"from", "to", "weight"}:
                raise DocumentError("each arc needs exactly 'from', 'to', 'weight'", where)
            j, i, w = arc["from"], arc["to"], arc["weight"]
            for v in (i, j):
                if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= n:
                    raise DocumentError(f"agent index {v!r} outside 1..{n}", where)
            if isinstance(w, bool) or not isinstance(w, (int, float)) or not math.isfinite(w) or w <= 0:
                raise DocumentError(f"weight must be a positive number, got {w!r}", where)
            if M[i - 1, j - 1]:
                raise DocumentError(f"duplicate arc {j} -> {i}", where)
            M[i - 1, j - 1] = w
    bad = np.argwhere(M < 0)
    if bad.size:
        i, j = bad[0]
        raise DocumentError(f"entry ({i + 1}, {j + 1}) is negative", "matrix")

    model = raw.get("model")
    if model is None:
        model = _infer_model(raw, M)
    elif model not in MODELS:
        raise DocumentError(f"unknown model {model!r}; choose from {', '.join(MODELS)}", "model")
    if model in ("degroot", "fj"):
        M = _stochastic(M, "matrix")

    doc = NetworkDocument(n, d, M, model, arcs_form="arcs" in raw)
    if "lambda" in raw:
        lam = _array(raw["lambda"], "lambda", shape=(n,))
        if np.any(lam < 0) or np.any(lam > 1):
            raise DocumentError("lambda out of [0,1]", "lambda")
        doc.lam = lam
    if "gamma" in raw:
        gamma = _array(raw["gamma"], "gamma", shape=(n,))
        if np.any(gamma < 0):
            raise DocumentError("gamma entries must be >= 0", "gamma")
        doc.gamma = gamma
    if "u" in raw:
        doc.u = _opinion_block(raw["u"], "u", n, d)
    if "x0" in raw:
        doc.x0 = _opinion_block(raw["x0"], "x0", n, d)
    if "C" in raw:
        C = _array(raw["C"], "C", shape=(d, d))
        if np.any(C < 0):
            raise DocumentError("entries must be >= 0", "C")
        doc.C = _stochastic(C, "C")
    if "sources" in raw:
        src = raw["sources"]
        if not isinstance(src, dict) or set(src) != {"B", "s"}:
            raise DocumentError("must be an object with 'B' and 's'", "sources")
        B = _array(src["B"], "sources.B", ndim=2)
        if B.shape[0] != n:
            raise DocumentError(f"expected {n} rows, got {B.shape[0]}", "sources.B")
        if np.any(B < 0):
            raise DocumentError("entries must be >= 0", "sources.B")
        doc.B = B
        doc.s = _opinion_block(src["s"], "sources.s", B.shape[1], d)

    if model == "fj" and (doc.lam is None or doc.u is None):
        raise DocumentError("the fj model needs 'lambda' and 'u'", "lambda" if doc.lam is None else "u")
    if model == "taylor" and doc.B is None and (doc.gamma is None or doc.u is None):
        raise DocumentError("the taylor model needs 'gamma' and 'u', or 'sources'",
                            "gamma" if doc.gamma is None else "u")
    return doc


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _rows(X, d):
    return X[:, 0].tolist() if d == 1 else X.tolist()


def render_network(doc: NetworkDocument) -> str:
    """Canonical text of a document (sorted keys, shortest round-trip floats)."""
    out = {"schema_version": SCHEMA_VERSION, "n": doc.n, "d": doc.d, "model": doc.model}
    if doc.arcs_form:
        rows, cols = np.nonzero(doc.matrix)
        order = np.lexsort((rows, cols))
        out["arcs"] = [{"from": int(cols[k]) + 1, "to": int(rows[k]) + 1, "weight": float(doc.matrix[rows[k], cols[k]])}
                       for k in order]
    else:
        out["matrix"] = doc.matrix.tolist()
    if doc.lam is not None:
        out["lambda"] = doc.lam.tolist()
    if doc.gamma is not None:
        out["gamma"] = doc.gamma.tolist()
    if doc.u is not None:
        out["u"] = _rows(doc.u, doc.d)
    if doc.x0 is not None:
        out["x0"] = _rows(doc.x0, doc.d)
    if doc.C is not None:
        out["C"] = doc.C.tolist()
    if doc.B is not None:
        out["sources"] = {"B": doc.B.tolist(), "s": _rows(doc.s, doc.d)}
    return _dumps(out)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def save_report(report) -> str:
    """Render an ``AnalysisReport`` (or any report dict) as key-sorted JSON."""
    data = report.to_dict() if hasattr(report, "to_dict") else report
    return _dumps(_plain(data))


def _g17(x) -> str:
    return format(float(x), ".17g")


def save_trajectory(traj: Trajectory) -> str:
    """CSV with header ``t,agent_1_topic_1,...`` and 17 significant digits per value."""
    n, d = traj.n, traj.d
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"agent_{i + 1}_topic_{l + 1}" for i in range(n) for l in range(d)])
    for t, X in zip(traj.times, traj.states):
        writer.writerow([_g17(t)] + [_g17(v) for v in X.reshape(-1)])
    return buf.getvalue()


def load_trajectory(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse trajectory CSV into ``(times, states)`` with ``states`` of shape ``(T, n, d)``."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DocumentError("empty trajectory", "line 1") from None
    if not header or header[0] != "t":
        raise DocumentError("header must start with 't'", "line 1")
    cols = []
    for name in header[1:]:
        parts = name.split("_")
        if len(parts) != 4 or parts[0] != "agent" or parts[2] != "topic":
            raise DocumentError(f"bad column name {name!r}", "line 1")
        try:
            cols.append((int(parts[1]), int(parts[3])))
        except ValueError:
            raise DocumentError(f"bad column name {name!r}", "line 1") from None
    n = max((i for i, _ in cols), default=0)
    d = max((l for _, l in cols), default=0)
    if cols != [(i, l) for i in range(1, n + 1) for l in range(1, d + 1)]:
        raise DocumentError("columns must be agent-major and complete", "line 1")
    times, states = [], []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 1 + n * d:
            raise DocumentError(f"expected {1 + n * d} values, got {len(row)}", f"line {lineno}")
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise DocumentError(str(exc), f"line {lineno}") from None
        if times and not vals[0] > times[-1]:
            raise DocumentError("t must be strictly increasing", f"line {lineno}")
        times.append(vals[0])
        states.append(np.array(vals[1:]).reshape(n, d))
    return np.array(times), np.array(states).reshape(len(states), n, d)
