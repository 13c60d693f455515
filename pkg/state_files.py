# ENTBOUND JSON state files
"""
JSON schemas for the four file kinds, discriminated on ``format``:

    dense         {"format": "dense", "n_qubits": N, "re": [[...]], "im": [[...]]}
    xstate        {"format": "xstate", "n_qubits": N, "a1": r, "b1": r,
                   "z1_re": r, "z1_im": r, "pairs": [{"b": r, "z_re": r, "z_im": r}, ...]}
    ghz-diagonal  {"format": "ghz-diagonal", "n_qubits": N, "weights": [...]}
    record        {"format": "record", "n_qubits": N, "p00": r, "p11": r,
                   "z_re": r, "z_im": r, "shots": int | null}

``pairs`` lists pairs i = 2..n in order. Loading validates the schema and then
the domain invariants, and rejects rather than repairs. Saving writes
``indent=2`` JSON with shortest round-trip floats, so a saved file loads and
saves back byte-identical.
"""
import json
import logging
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from errors import NotPSDError, PreconditionError, StateFileError, XStateError
from measurement import MeasurementRecord
from states import MAX_DENSE_QUBITS, MIN_PARTIES, DensityMatrix, XState, ghz_diagonal

logger = logging.getLogger(__name__)


class _FileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DenseFile(_FileModel):
    format: Literal["dense"] = "dense"
    n_qubits: int = Field(ge=1, le=MAX_DENSE_QUBITS)
    re: List[List[float]]
    im: List[List[float]]

    @model_validator(mode="after")
    def check_shape(self):
        dim = 1 << self.n_qubits
        for name, rows in (("re", self.re), ("im", self.im)):
            if len(rows) != dim or any(len(row) != dim for row in rows):
                raise ValueError(f"'{name}' must be {dim}x{dim} for n_qubits={self.n_qubits}")
        return self

    def to_state(self) -> DensityMatrix:
        arr = np.array(self.re, dtype=np.complex128)
        arr.imag = self.im
        return DensityMatrix(arr).validate()


class PairEntry(_FileModel):
    b: float
    z_re: float
    z_im: float


class XStateFile(_FileModel):
    format: Literal["xstate"] = "xstate"
    n_qubits: int = Field(ge=MIN_PARTIES, le=30)
    a1: float
    b1: float
    z1_re: float
    z1_im: float
    pairs: List[PairEntry]

    @model_validator(mode="after")
    def check_pairs(self):
        expected = (1 << (self.n_qubits - 1)) - 1
        if len(self.pairs) != expected:
            raise ValueError(f"'pairs' must hold {expected} entries (i = 2..n) for n_qubits={self.n_qubits}")
        return self

    def to_state(self) -> XState:
        b = [p.b for p in self.pairs]
        z = [complex(self.z1_re, self.z1_im)] + [complex(p.z_re, p.z_im) for p in self.pairs]
        return XState(self.n_qubits, self.a1, self.b1, b, z)


class GhzDiagonalFile(_FileModel):
    format: Literal["ghz-diagonal"] = "ghz-diagonal"
    n_qubits: int = Field(ge=MIN_PARTIES, le=30)
    weights: List[float]

    @model_validator(mode="after")
    def check_weights(self):
        if len(self.weights) != (1 << self.n_qubits):
            raise ValueError(f"'weights' must hold {1 << self.n_qubits} entries for n_qubits={self.n_qubits}")
        return self

    def to_state(self) -> XState:
        return ghz_diagonal(self.n_qubits, self.weights)


class RecordFile(_FileModel):
    format: Literal["record"] = "record"
    n_qubits: int = Field(ge=MIN_PARTIES)
    p00: float
    p11: float
    z_re: float
    z_im: float
    shots: Optional[int] = Field(default=None, ge=1)

    def to_state(self) -> MeasurementRecord:
        return MeasurementRecord(self.p00, self.p11, self.z_re, self.z_im, self.shots)


StateFile = Annotated[
    Union[DenseFile, XStateFile, GhzDiagonalFile, RecordFile],
    Field(discriminator="format"),
]

_ADAPTER = TypeAdapter(StateFile)


def parse_state_file(text: str):
    """Validate JSON text against the schemas; returns the file model"""
    try:
        return _ADAPTER.validate_json(text)
    except ValidationError as e:
        raise StateFileError(f"malformed state file: {e}") from e


def load_state_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise StateFileError(f"cannot read state file {path}: {e}") from e
    return parse_state_file(text)


def load_state(path: str):
    """Load a file and build its domain object (DensityMatrix, XState or MeasurementRecord)"""
    model = load_state_file(path)
    try:
        return model.to_state()
    except (PreconditionError, NotPSDError, XStateError) as e:
        raise StateFileError(f"{path}: {e}") from e


def to_file_model(obj, n_qubits: Optional[int] = None):
    """File model for a domain object (or pass a file model through)"""
    try:
        return _build_file_model(obj, n_qubits)
    except ValidationError as e:
        raise PreconditionError(f"cannot write {type(obj).__name__} as a state file: {e}") from e


def _build_file_model(obj, n_qubits: Optional[int]):
    if isinstance(obj, _FileModel):
        return obj
    if isinstance(obj, DensityMatrix):
        return DenseFile(n_qubits=obj.n_qubits, re=obj.data.real.tolist(), im=obj.data.imag.tolist())
    if isinstance(obj, XState):
        pairs = [
            PairEntry(b=float(b), z_re=float(z.real), z_im=float(z.imag))
            for b, z in zip(obj.b, obj.z[1:])
        ]
        return XStateFile(
            n_qubits=obj.n_qubits, a1=obj.a1, b1=obj.b1,
            z1_re=float(obj.z[0].real), z1_im=float(obj.z[0].imag), pairs=pairs,
        )
    if isinstance(obj, MeasurementRecord):
        if n_qubits is None:
            raise PreconditionError("saving a measurement record needs n_qubits")
        return RecordFile(n_qubits=n_qubits, p00=obj.p00, p11=obj.p11,
                          z_re=obj.z_re, z_im=obj.z_im, shots=obj.shots)
    raise PreconditionError(f"cannot save objects of type {type(obj).__name__}")


def dumps_state(obj, n_qubits: Optional[int] = None) -> str:
    model = to_file_model(obj, n_qubits)
    return json.dumps(model.model_dump(mode="json"), indent=2) + "\n"


def save_state(obj, path: str, n_qubits: Optional[int] = None) -> str:
    text = dumps_state(obj, n_qubits)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"✅ Saved {to_file_model(obj, n_qubits).format} state to {path}")
    return text
