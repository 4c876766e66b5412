"""Binary checkpoints with integrity digests.

Expert checkpoint layout (bit-exact round trip is the contract):

    line 1  magic "HUBPATH1"
    line 2  widths, space-separated decimal (input dim first)
    line 3  activation name
    line 4  "<source_head_width> <target_head_width>" (0 = not adapted)
    blob    parameters as little-endian float64 in declaration order
    tail    8 bytes: little-endian FNV-1a 64 digest of the blob

Generator/aggregator snapshots reuse the container with a "!<kind>" line in
place of the widths line followed by one kind-specific meta line.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import (
    CheckpointDigestError,
    CheckpointFormatError,
    CheckpointTruncatedError,
)
from .experts import ArchDescriptor, Expert

MAGIC = b"HUBPATH1"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _params_blob(arrays) -> bytes:
    return b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)


def _write(path, header_lines: list[bytes], blob: bytes) -> None:
    digest = fnv1a64(blob).to_bytes(8, "little")
    with open(path, "wb") as fh:
        fh.write(MAGIC + b"\n")
        for line in header_lines:
            fh.write(line + b"\n")
        fh.write(blob)
        fh.write(digest)


def _read(path, n_header_lines: int):
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 1:
        raise CheckpointTruncatedError(f"{path}: file shorter than the magic header")
    if raw[: len(MAGIC)] != MAGIC or raw[len(MAGIC)] != ord("\n"):
        raise CheckpointFormatError(
            f"{path}: bad magic {raw[:len(MAGIC)]!r}, expected {MAGIC!r}"
        )
    pos = len(MAGIC) + 1
    lines = []
    for _ in range(n_header_lines):
        end = raw.find(b"\n", pos)
        if end < 0:
            raise CheckpointTruncatedError(f"{path}: header ends early")
        lines.append(raw[pos:end].decode("ascii"))
        pos = end + 1
    return raw, pos, lines


def save_checkpoint(expert: Expert, path) -> None:
    arch = expert.arch
    header = [
        " ".join(str(w) for w in arch.widths).encode(),
        arch.activation.encode(),
        f"{arch.source_head_width} {arch.target_head_width or 0}".encode(),
    ]
    _write(path, header, _params_blob(p.data for p in expert.params))


def load_checkpoint(path, expert_id: int = 1, provenance: str = "") -> Expert:
    raw, pos, lines = _read(path, 3)
    widths_line, act_line, heads_line = lines
    if widths_line.startswith("!"):
        raise CheckpointFormatError(
            f"{path}: {widths_line[1:]} snapshot, not an expert checkpoint"
        )
    try:
        widths = tuple(int(w) for w in widths_line.split())
        src_head, tgt_head = (int(v) for v in heads_line.split())
        arch = ArchDescriptor(widths, act_line, src_head, tgt_head or None)
    except ValueError as exc:
        raise CheckpointFormatError(f"{path}: unparsable header: {exc}") from exc

    n = arch.param_count()
    blob_end = pos + 8 * n
    if len(raw) < blob_end + 8:
        raise CheckpointTruncatedError(
            f"{path}: need {blob_end + 8} bytes for {n} parameters, have {len(raw)}"
        )
    blob = raw[pos:blob_end]
    stored = int.from_bytes(raw[blob_end : blob_end + 8], "little")
    actual = fnv1a64(blob)
    if stored != actual:
        raise CheckpointDigestError(
            f"{path}: digest mismatch (stored {stored:#018x}, computed {actual:#018x})"
        )

    flat = np.frombuffer(blob, dtype="<f8").astype(np.float64)
    params = []
    from .. import diffcore as dc

    offset = 0
    for li, (fan_in, fan_out) in enumerate(arch.layer_shapes()):
        w = flat[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out).copy()
        offset += fan_in * fan_out
        b = flat[offset : offset + fan_out].copy()
        offset += fan_out
        params.append(dc.Parameter(w, f"w{li}", f"expert:{expert_id}"))
        params.append(dc.Parameter(b, f"b{li}", f"expert:{expert_id}"))
    return Expert(expert_id, arch, params, provenance)


def save_component(path, kind: str, meta: str, arrays) -> None:
    """Snapshot a non-expert component (generator/aggregator) in the same container."""
    _write(path, [b"!" + kind.encode(), meta.encode()], _params_blob(arrays))


def load_component(path, kind: str):
    """Returns (meta_line, flat float64 array); the caller re-slices shapes."""
    raw, pos, lines = _read(path, 2)
    kind_line, meta = lines
    if kind_line != "!" + kind:
        raise CheckpointFormatError(f"{path}: expected !{kind} snapshot, got {kind_line!r}")
    if (len(raw) - pos - 8) % 8:
        raise CheckpointTruncatedError(f"{path}: payload is not a whole number of floats")
    blob = raw[pos:-8]
    stored = int.from_bytes(raw[-8:], "little")
    actual = fnv1a64(blob)
    if stored != actual:
        raise CheckpointDigestError(
            f"{path}: digest mismatch (stored {stored:#018x}, computed {actual:#018x})"
        )
    return meta, np.frombuffer(blob, dtype="<f8").astype(np.float64)
