"""
Checkpoint files.

Layout (version 1):
    line 1   NNEMCKPT
    line 2   JSON header: version, config fingerprint and its sha256, step, seed,
             history, array shapes, payload byte count and sha256
    rest     payload: c, theta, m, v as little-endian float64, in that order

Loading verifies the payload hash and refuses a checkpoint whose fingerprint differs
from the current run, naming the differing keys.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import torch

from ..errors import CheckpointError
from ..nnspace import NNElementSpace
from .state import HistoryEntry, TrainState

logger = logging.getLogger(__name__)

MAGIC = b"NNEMCKPT"
VERSION = 1
_ARRAYS = ("c", "theta", "m", "v")
_DTYPE = np.dtype("<f8")

# Keys that may change between a run and its resumption.
RESUMABLE_KEYS = frozenset({"train.steps", "train.log_every", "output.dir", "threads"})


def run_fingerprint(space: NNElementSpace, config: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Flat description of everything that must match for a resume to be exact."""
    out = {str(k): v for k, v in (config or {}).items() if k not in RESUMABLE_KEYS and not str(k).startswith("study.")}
    for key, value in space.describe().items():
        out[f"space:{key}"] = value if not isinstance(value, dict) else json.dumps(value, sort_keys=True)
    return out


def fingerprint_hash(fingerprint: Mapping[str, Any]) -> str:
    blob = json.dumps(fingerprint, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def checkpoint_save(
    path: str | Path,
    state: TrainState,
    space: NNElementSpace,
    config: Mapping[str, Any] | None = None,
) -> Path:
    arrays = {name: getattr(state, name).detach().numpy().astype(_DTYPE) for name in _ARRAYS}
    payload = b"".join(np.ascontiguousarray(a).tobytes() for a in arrays.values())
    fingerprint = run_fingerprint(space, config)
    header = {
        "version": VERSION,
        "config": fingerprint,
        "config_hash": fingerprint_hash(fingerprint),
        "step": state.step,
        "seed": state.seed,
        "history": [list(h) for h in state.history],
        "shapes": {name: list(a.shape) for name, a in arrays.items()},
        "payload_bytes": len(payload),
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MAGIC + b"\n")
        fh.write(json.dumps(header, sort_keys=True, default=str).encode("utf-8") + b"\n")
        fh.write(payload)
    logger.info("Checkpoint written: %s (step %d)", path, state.step)
    return path


def _read(path: Path) -> tuple[dict[str, Any], bytes]:
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}") from e
    magic, sep, rest = raw.partition(b"\n")
    if magic != MAGIC or not sep:
        raise CheckpointError(f"{path} is not a checkpoint file")
    line, sep, payload = rest.partition(b"\n")
    try:
        header = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: corrupted header") from e
    if not sep or not isinstance(header, dict):
        raise CheckpointError(f"{path}: truncated header")
    if header.get("version") != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {header.get('version')!r}")
    if len(payload) != header.get("payload_bytes"):
        raise CheckpointError(
            f"{path}: truncated payload ({len(payload)} of {header.get('payload_bytes')} bytes)"
        )
    if hashlib.sha256(payload).hexdigest() != header.get("payload_sha256"):
        raise CheckpointError(f"{path}: payload checksum mismatch")
    return header, payload


def checkpoint_load(
    path: str | Path,
    space: NNElementSpace,
    config: Mapping[str, Any] | None = None,
) -> TrainState:
    path = Path(path)
    header, payload = _read(path)
    expected = run_fingerprint(space, config)
    if header.get("config_hash") != fingerprint_hash(expected):
        stored = header.get("config", {})
        keys = sorted(
            k for k in set(stored) | set(expected)
            if json.dumps(stored.get(k), default=str) != json.dumps(expected.get(k), default=str)
        )
        raise CheckpointError(f"{path} belongs to a different run", keys)

    arrays = {}
    offset = 0
    for name in _ARRAYS:
        shape = tuple(header["shapes"][name])
        count = int(np.prod(shape, dtype=np.int64))
        chunk = payload[offset : offset + count * _DTYPE.itemsize]
        offset += count * _DTYPE.itemsize
        arrays[name] = torch.from_numpy(np.frombuffer(chunk, dtype=_DTYPE).reshape(shape).copy())
    if tuple(arrays["theta"].shape) != tuple(space.theta.shape):
        raise CheckpointError(f"{path}: parameter shape does not match the space", ["theta"])
    history = tuple(
        HistoryEntry(int(s), float(loss), e2, e1) for s, loss, e2, e1 in header["history"]
    )
    logger.info("Checkpoint loaded: %s (step %d)", path, header["step"])
    return TrainState(
        c=arrays["c"],
        theta=arrays["theta"],
        m=arrays["m"],
        v=arrays["v"],
        step=int(header["step"]),
        seed=int(header["seed"]),
        history=history,
    )
