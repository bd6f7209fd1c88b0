"""JSON experiment configuration: parsing, validation and canonical emission.

Complex numbers are ``[re, im]`` pairs, matrices are row-major lists of rows.
Parsing normalizes the document into a canonical tree, so emitting a parsed
config is byte-stable: ``emit(parse(emit(c))) == emit(c)``.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .grid import DEFAULT_N, DEFAULT_T, Grid

FUNCTION_KINDS = ("zero", "constant", "indicator", "gaussian", "mode", "noise")
SPACE_KINDS = ("Lp", "Lorentz", "WeightedLp", "Besov", "TriebelLizorkin")
CHAT_KINDS = ("zero", "memory", "jump")
BANK_KINDS = ("standard", "modes", "positive")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is a dotted path into the document."""

    def __init__(self, field: str, message: str, line: int | None = None, column: int | None = None):
        self.field = field
        self.line = line
        self.column = column
        where = field or "<document>"
        if line is not None:
            where += f" (line {line}, column {column})"
        super().__init__(f"{where}: {message}")


# --------------------------------------------------------------------------
# scalar helpers


def _number(x, path, positive=False, integer=False, allow_inf=False):
    if isinstance(x, str) and allow_inf and x.lower() in ("inf", "infinity"):
        return "inf"
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(path, f"expected a number, got {x!r}")
    if not math.isfinite(x):
        raise ConfigError(path, "number must be finite")
    if integer:
        # exact for Python ints of any size (seeds are 64-bit)
        if isinstance(x, float) and not x.is_integer():
            raise ConfigError(path, f"expected an integer, got {x!r}")
        x = int(x)
    else:
        x = float(x)
    if positive and x <= 0:
        raise ConfigError(path, f"must be positive, got {x!r}")
    return x


def _complex(x, path):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return [_number(x, path), 0.0]
    if isinstance(x, list) and len(x) == 2:
        return [_number(x[0], path + "[0]"), _number(x[1], path + "[1]")]
    raise ConfigError(path, f"expected a complex number as [re, im], got {x!r}")


def _matrix(x, n, path):
    if not isinstance(x, list) or len(x) != n:
        size = len(x) if isinstance(x, list) else type(x).__name__
        raise ConfigError(path, f"expected {n} rows, got {size}")
    rows = []
    for i, row in enumerate(x):
        rp = f"{path}[{i}]"
        if not isinstance(row, list) or len(row) != n:
            size = len(row) if isinstance(row, list) else type(row).__name__
            raise ConfigError(rp, f"row must have {n} entries, got {size}")
        rows.append([_complex(v, f"{rp}[{j}]") for j, v in enumerate(row)])
    return rows


def _vector(x, n, path):
    if not isinstance(x, list) or len(x) != n:
        raise ConfigError(path, f"expected a vector of length {n}")
    return [_complex(v, f"{path}[{i}]") for i, v in enumerate(x)]


def _mapping(x, path, allowed=None):
    if not isinstance(x, dict):
        raise ConfigError(path, f"expected an object, got {type(x).__name__}")
    if allowed is not None:
        extra = sorted(set(x) - set(allowed))
        if extra:
            raise ConfigError(f"{path}.{extra[0]}" if path else extra[0], "unknown field")
    return x


def _kind(x, path, kinds):
    k = x.get("kind")
    if k not in kinds:
        raise ConfigError(path + ".kind", f"expected one of {', '.join(kinds)}, got {k!r}")
    return k


# --------------------------------------------------------------------------
# sections


def _grid(x, path="grid"):
    x = _mapping(x if x is not None else {}, path, ("T", "N"))
    T = _number(x.get("T", DEFAULT_T), path + ".T", positive=True)
    N = _number(x.get("N", DEFAULT_N), path + ".N", positive=True, integer=True)
    try:
        Grid(T, N)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return {"T": T, "N": N}


def _chat(x, n, path):
    x = _mapping(x if x is not None else {"kind": "zero"}, path, ("kind", "lam", "C"))
    k = _kind(x, path, CHAT_KINDS)
    if k == "zero":
        return {"kind": "zero"}
    out = {"kind": k, "C": _matrix(x.get("C"), n, path + ".C")}
    if k == "memory":
        out["lam"] = _number(x.get("lam", 1.0), path + ".lam", positive=True)
    return out


def _pencil(x, path="pencil"):
    x = _mapping(x, path, ("n", "A", "B", "P", "chat"))
    n = _number(x.get("n", 1), path + ".n", positive=True, integer=True)
    out = {"n": n}
    for name in "ABP":
        if name not in x:
            raise ConfigError(f"{path}.{name}", "missing matrix")
        out[name] = _matrix(x[name], n, f"{path}.{name}")
    out["chat"] = _chat(x.get("chat"), n, path + ".chat")
    return out


def _function(x, n, path):
    x = _mapping(x, path, ("kind", "a", "b", "center", "width", "k", "band", "value", "vector"))
    k = _kind(x, path, FUNCTION_KINDS)
    out = {"kind": k}
    if k == "constant":
        out["value"] = _complex(x.get("value", 1.0), path + ".value")
    elif k == "indicator":
        out["a"] = _number(x.get("a", 0.0), path + ".a")
        out["b"] = _number(x.get("b", 1.0), path + ".b")
        if out["b"] < out["a"]:
            raise ConfigError(path, "indicator needs a <= b")
    elif k == "gaussian":
        out["center"] = _number(x.get("center", 0.0), path + ".center")
        out["width"] = _number(x.get("width", 1.0), path + ".width", positive=True)
    elif k == "mode":
        out["k"] = _number(x.get("k", 1), path + ".k", integer=True)
    elif k == "noise":
        out["band"] = _number(x.get("band", 4.0), path + ".band", positive=True)
    if k != "zero":
        out["vector"] = _vector(x["vector"], n, path + ".vector") if "vector" in x else None
        if out["vector"] is None:
            del out["vector"]
    return out


def _space(x, path, allow_smooth=True):
    x = _mapping(x, path, ("kind", "p", "s", "q", "phi", "weight"))
    k = _kind(x, path, SPACE_KINDS if allow_smooth else SPACE_KINDS[:3])
    if k in ("Besov", "TriebelLizorkin"):
        q = _number(x.get("q", 2.0), path + ".q", allow_inf=True)
        if q != "inf" and q < 1:
            raise ConfigError(path + ".q", "q must be at least 1")
        if k == "TriebelLizorkin" and (q == "inf" or q <= 1):
            raise ConfigError(path + ".q", "Triebel-Lizorkin spaces need q in (1, inf)")
        phi = _space(x.get("phi", {"kind": "Lp", "p": 2.0}), path + ".phi", allow_smooth=False)
        return {"kind": k, "s": _number(x.get("s", 0.0), path + ".s"), "q": q, "phi": phi}
    p = _number(x.get("p", 2.0), path + ".p")
    if not 1 < p < math.inf:
        raise ConfigError(path + ".p", "p must lie in (1, inf)")
    out = {"kind": k, "p": p}
    if k == "WeightedLp":
        w = _mapping(x.get("weight"), path + ".weight", ("g", "h"))
        out["weight"] = {"g": _function(w.get("g"), 1, path + ".weight.g"),
                         "h": _function(w.get("h"), 1, path + ".weight.h")}
    return out


def _bank(x, path="bank"):
    x = _mapping(x if x is not None else {}, path, ("kind", "size", "band", "seed"))
    if "kind" not in x:
        x = dict(x, kind="standard")
    k = _kind(x, path, BANK_KINDS)
    out = {"kind": k, "size": _number(x.get("size", 100), path + ".size", integer=True)}
    if out["size"] < 0:
        raise ConfigError(path + ".size", "size must be nonnegative")
    if x.get("band") is not None:
        out["band"] = _number(x["band"], path + ".band", positive=True)
    if x.get("seed") is not None:
        out["seed"] = _number(x["seed"], path + ".seed", integer=True)
    return out


def _weights(x, path="weights"):
    x = _mapping(x, path, ("p", "phi", "g", "h", "K"))
    p = _number(x.get("p", 2.0), path + ".p")
    if not 1 < p < math.inf:
        raise ConfigError(path + ".p", "p must lie in (1, inf)")
    phi = _space(x.get("phi", {"kind": "Lp", "p": p}), path + ".phi", allow_smooth=False)
    K = _number(x.get("K", 40), path + ".K", integer=True, positive=True)
    return {"p": p, "phi": phi, "K": K,
            "g": _function(x.get("g"), 1, path + ".g"), "h": _function(x.get("h"), 1, path + ".h")}


def _output(x, path="output"):
    x = _mapping(x if x is not None else {}, path, ("dir", "formats"))
    d = x.get("dir", "out")
    if not isinstance(d, str) or not d:
        raise ConfigError(path + ".dir", "expected a nonempty path string")
    formats = x.get("formats", list(FORMATS))
    if not isinstance(formats, list) or any(f not in FORMATS for f in formats):
        raise ConfigError(path + ".formats", f"formats must be drawn from {', '.join(FORMATS)}")
    return {"dir": d, "formats": sorted(set(formats))}


TOP_LEVEL = ("grid", "pencil", "spaces", "bank", "forcing", "weights", "output", "seed")


def normalize(doc) -> dict:
    doc = _mapping(doc, "", TOP_LEVEL)
    out = {"grid": _grid(doc.get("grid"))}
    if "pencil" in doc:
        out["pencil"] = _pencil(doc["pencil"])
    n = out["pencil"]["n"] if "pencil" in out else 1
    spaces = doc.get("spaces", [])
    if not isinstance(spaces, list):
        raise ConfigError("spaces", "expected a list of space descriptors")
    out["spaces"] = [_space(s, f"spaces[{i}]") for i, s in enumerate(spaces)]
    out["bank"] = _bank(doc.get("bank"))
    if "forcing" in doc:
        out["forcing"] = _function(doc["forcing"], n, "forcing")
    if "weights" in doc:
        out["weights"] = _weights(doc["weights"])
    out["output"] = _output(doc.get("output"))
    out["seed"] = _number(doc.get("seed", 0), "seed", integer=True)
    if out["seed"] < 0:
        raise ConfigError("seed", "seed must be nonnegative")
    return out


# --------------------------------------------------------------------------
# public API


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """A validated configuration in canonical form."""
    data: dict

    @property
    def grid(self) -> Grid:
        g = self.data["grid"]
        return Grid(g["T"], g["N"])

    @property
    def seed(self) -> int:
        return self.data["seed"]

    def get(self, key, default=None):
        return copy.deepcopy(self.data.get(key, default))

    def emit(self) -> str:
        return emit(self)

    def digest(self) -> str:
        """SHA-256 of the canonical config without the output section, so the
        hash identifies the experiment rather than where its artifacts go."""
        d = {k: v for k, v in self.data.items() if k != "output"}
        text = json.dumps(d, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def with_overrides(self, seed=None, grid_n=None, grid_t=None, out=None) -> "ExperimentConfig":
        d = copy.deepcopy(self.data)
        if seed is not None:
            d["seed"] = seed
            d["bank"].pop("seed", None)
        if grid_n is not None:
            d["grid"]["N"] = grid_n
        if grid_t is not None:
            d["grid"]["T"] = grid_t
        if out is not None:
            d["output"]["dir"] = out
        return ExperimentConfig(normalize(d))


def parse(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", exc.msg, exc.lineno, exc.colno) from None
    return ExperimentConfig(normalize(doc))


def load(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read config: {exc}") from None
    return parse(text)


def emit(config: ExperimentConfig) -> str:
    return json.dumps(config.data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# conversion to numbers


def to_complex_array(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    return a[..., 0] + 1j * a[..., 1]
