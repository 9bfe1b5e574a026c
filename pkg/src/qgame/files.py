"""Game, strategy and measurement file formats.

All files are structured text (JSON): complex numbers are two-element
``[re, im]`` arrays, matrices are row-major arrays of rows, and every file
carries a ``format_version`` field.  Structural problems raise
``ParseError`` (CLI exit 2); physical-validity problems raise the matching
``ValidationError`` subclass (CLI exit 1).

A ``.game`` file holds ``n1``, ``n2``, ``rho`` and either two explicit
payoff operators or a measurement plus payoff vectors from which the
operators are folded.  A ``.strategy`` file holds one of four payload
kinds: ``kraus``, ``chi``, ``unitary`` or ``classical``.  A ``.povm`` file
holds measurement elements plus both players' payoff vectors.
"""

from __future__ import annotations

import json
import pathlib
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ParseError, ValidationError
from .game import QuantumGame, build_game, payoff_operator
from .quantum import (
    ChiMatrix,
    KrausChannel,
    Povm,
    kraus_to_chi,
    shift_channel,
    validate_chi,
    validate_kraus,
    validate_povm,
)

FORMAT_VERSION = 1

STRATEGY_KINDS = ("kraus", "chi", "unitary", "classical")


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def complex_to_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_lists(m: np.ndarray) -> list[list[list[float]]]:
    a = np.asarray(m, dtype=complex)
    return [[complex_to_pair(z) for z in row] for row in a]


def matrix_from_lists(data, what: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{what}: expected a non-empty array of rows")
    rows = []
    width = None
    for r, row in enumerate(data):
        if not isinstance(row, list) or (width is not None and len(row) != width):
            raise ParseError(f"{what}: row {r} is not an array of length {width}")
        width = len(row)
        entries = []
        for c, cell in enumerate(row):
            if (not isinstance(cell, list) or len(cell) != 2
                    or not all(isinstance(x, (int, float)) for x in cell)):
                raise ParseError(f"{what}: entry ({r}, {c}) is not a [re, im] pair")
            entries.append(complex(cell[0], cell[1]))
        rows.append(entries)
    if len(rows) != width:
        raise ParseError(f"{what}: must be square, got {len(rows)}x{width}")
    return np.array(rows, dtype=complex)


def real_vector_from_list(data, what: str) -> np.ndarray:
    if not isinstance(data, list) or not all(isinstance(x, (int, float)) for x in data):
        raise ParseError(f"{what}: expected an array of real numbers")
    return np.asarray(data, dtype=float)


def _require(doc: dict, key: str, what: str):
    if key not in doc:
        raise ParseError(f"{what}: missing required field {key!r}")
    return doc[key]


def _int_field(doc: dict, key: str, what: str) -> int:
    value = _require(doc, key, what)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"{what}: field {key!r} must be an integer")
    return value


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------

def emit_document(payload: dict) -> str:
    """Serialize a machine-readable payload; ``parse_document`` inverts it."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_document(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def resolve_input(name) -> pathlib.Path:
    """Resolve an input path: the filesystem first, then bundled data files."""
    p = pathlib.Path(name)
    if p.is_file():
        return p
    bundled = resources.files("qgame").joinpath(f"data/{pathlib.Path(name).name}")
    if bundled.is_file():
        return pathlib.Path(str(bundled))
    raise ParseError(f"no such input file: {name}")


def load_document(path) -> dict:
    resolved = resolve_input(path)
    doc = parse_document(resolved.read_text())
    if not isinstance(doc, dict):
        raise ParseError(f"{resolved.name}: top level must be an object")
    return doc


# ---------------------------------------------------------------------------
# game files
# ---------------------------------------------------------------------------

def parse_game_raw(path) -> dict:
    """Parse a .game file structurally, without physical validation.

    Returns a dict with keys n1, n2, rho (ndarray) and either
    payoff_ops = {"I": ndarray, "II": ndarray} or
    povm = (elements ndarray list, payoffs_i, payoffs_ii).
    """
    doc = load_document(path)
    what = "game file"
    n1 = _int_field(doc, "n1", what)
    n2 = _int_field(doc, "n2", what)
    if n1 < 2 or n2 < 2:
        raise ParseError(f"{what}: per-player dimensions must be at least 2")
    out: dict = {
        "n1": n1,
        "n2": n2,
        "rho": matrix_from_lists(_require(doc, "rho", what), "rho"),
        "name": doc.get("name", ""),
    }
    if "payoff_ops" in doc:
        ops = doc["payoff_ops"]
        if not isinstance(ops, dict):
            raise ParseError(f"{what}: payoff_ops must be an object with fields 'I' and 'II'")
        out["payoff_ops"] = {
            "I": matrix_from_lists(_require(ops, "I", "payoff_ops"), "payoff operator I"),
            "II": matrix_from_lists(_require(ops, "II", "payoff_ops"), "payoff operator II"),
        }
    elif "povm" in doc:
        block = doc["povm"]
        if not isinstance(block, dict):
            raise ParseError(f"{what}: povm must be an object")
        elements = _require(block, "elements", "povm")
        if not isinstance(elements, list) or not elements:
            raise ParseError("povm: elements must be a non-empty array of matrices")
        out["povm"] = {
            "elements": [matrix_from_lists(m, f"povm element {k}") for k, m in enumerate(elements)],
            "payoffs_i": real_vector_from_list(_require(block, "payoffs_I", "povm"), "payoffs_I"),
            "payoffs_ii": real_vector_from_list(_require(block, "payoffs_II", "povm"), "payoffs_II"),
        }
    else:
        raise ParseError(f"{what}: needs either payoff_ops or povm")
    return out


def load_game(path, tol: float | None = None) -> QuantumGame:
    """Parse and fully validate a .game file."""
    raw = parse_game_raw(path)
    if "payoff_ops" in raw:
        r_i, r_ii = raw["payoff_ops"]["I"], raw["payoff_ops"]["II"]
    else:
        povm = validate_povm(raw["povm"]["elements"], tol)
        r_i = payoff_operator(povm, raw["povm"]["payoffs_i"])
        r_ii = payoff_operator(povm, raw["povm"]["payoffs_ii"])
    return build_game(raw["rho"], r_i, r_ii, raw["n1"], raw["n2"], tol)


def game_to_payload(game: QuantumGame, name: str = "") -> dict:
    payload = {
        "format_version": FORMAT_VERSION,
        "n1": game.n1,
        "n2": game.n2,
        "rho": matrix_to_lists(game.rho.matrix),
        "payoff_ops": {
            "I": matrix_to_lists(game.payoff_op_i),
            "II": matrix_to_lists(game.payoff_op_ii),
        },
    }
    if name:
        payload["name"] = name
    return payload


# ---------------------------------------------------------------------------
# strategy files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoadedStrategy:
    """A strategy bound to a player dimension.

    ``chi`` is always populated; ``channel`` is populated for the kinds that
    come with an explicit Kraus form (kraus, unitary, classical), enabling
    the direct-evaluation cross-check.
    """

    kind: str
    chi: ChiMatrix
    channel: KrausChannel | None
    label: str


def load_strategy(path, n: int, tol: float | None = None) -> LoadedStrategy:
    doc = load_document(path)
    what = "strategy file"
    kind = _require(doc, "kind", what)
    if kind not in STRATEGY_KINDS:
        raise ParseError(f"{what}: kind must be one of {STRATEGY_KINDS}, got {kind!r}")
    label = str(doc.get("name", pathlib.Path(str(path)).stem))

    if kind == "kraus":
        ops = _require(doc, "operators", what)
        if not isinstance(ops, list) or not ops:
            raise ParseError(f"{what}: operators must be a non-empty array of matrices")
        mats = [matrix_from_lists(m, f"Kraus operator {k}") for k, m in enumerate(ops)]
        channel = validate_kraus(mats, tol)
        if channel.dim != n:
            raise ValidationError(f"strategy acts on dim {channel.dim}, game needs {n}")
        return LoadedStrategy(kind, kraus_to_chi(channel), channel, label)

    if kind == "chi":
        mat = matrix_from_lists(_require(doc, "matrix", what), "chi matrix")
        chi = validate_chi(mat, n, tol)
        return LoadedStrategy(kind, chi, None, label)

    if kind == "unitary":
        mat = matrix_from_lists(_require(doc, "matrix", what), "unitary matrix")
        # unitarity is exactly the one-operator completeness sum
        channel = validate_kraus([mat], tol)
        if channel.dim != n:
            raise ValidationError(f"strategy acts on dim {channel.dim}, game needs {n}")
        return LoadedStrategy(kind, kraus_to_chi(channel), channel, label)

    index = _int_field(doc, "index", what)
    if not (0 <= index < n):
        raise ValidationError(f"classical strategy index {index} out of range [0, {n})")
    channel = shift_channel(n, index)
    return LoadedStrategy(kind, kraus_to_chi(channel), channel, label)


# ---------------------------------------------------------------------------
# measurement files
# ---------------------------------------------------------------------------

def load_povm_file(path, dim: int, tol: float | None = None) -> tuple[Povm, np.ndarray, np.ndarray]:
    doc = load_document(path)
    what = "povm file"
    elements = _require(doc, "elements", what)
    if not isinstance(elements, list) or not elements:
        raise ParseError(f"{what}: elements must be a non-empty array of matrices")
    mats = [matrix_from_lists(m, f"povm element {k}") for k, m in enumerate(elements)]
    povm = validate_povm(mats, tol)
    if povm.dim != dim:
        raise ValidationError(f"measurement acts on dim {povm.dim}, game needs {dim}")
    payoffs_i = real_vector_from_list(_require(doc, "payoffs_I", what), "payoffs_I")
    payoffs_ii = real_vector_from_list(_require(doc, "payoffs_II", what), "payoffs_II")
    return povm, payoffs_i, payoffs_ii
