"""Hub container and the plain-text manifest tying checkpoints together.

Manifest format: one line per expert, `<id> <checkpoint-path> <provenance-tag>`,
paths relative to the manifest file. Provenance tags are single tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import ArtifactError
from .checkpoint import load_checkpoint, save_checkpoint
from .experts import Expert

MANIFEST_NAME = "manifest.txt"


@dataclass
class Hub:
    experts: list[Expert]

    def __post_init__(self):
        if not self.experts:
            raise ValueError("a hub needs at least one expert")
        dims = {e.arch.input_dim for e in self.experts}
        if len(dims) != 1:
            raise ValueError(f"experts disagree on input dim: {sorted(dims)}")

    @property
    def m(self) -> int:
        return len(self.experts)

    @property
    def input_dim(self) -> int:
        return self.experts[0].arch.input_dim

    def class_count(self) -> int:
        widths = {e.arch.head_width for e in self.experts}
        if len(widths) != 1:
            raise ValueError(f"experts disagree on head width: {sorted(widths)}")
        return widths.pop()

    def parameters(self):
        return [p for e in self.experts for p in e.params]

    def zero_grad(self) -> None:
        for e in self.experts:
            e.zero_grad()

    def reset_flops(self) -> None:
        for e in self.experts:
            e.reset_flops()

    def total_flops(self) -> int:
        return sum(e.flops for e in self.experts)

    def clone(self) -> "Hub":
        return Hub([e.clone() for e in self.experts])


def save_hub(hub: Hub, dir_path) -> Path:
    """Write one checkpoint per expert plus the manifest; returns the manifest path."""
    d = Path(dir_path)
    d.mkdir(parents=True, exist_ok=True)
    lines = []
    for e in hub.experts:
        name = f"expert_{e.id}.ckpt"
        save_checkpoint(e, d / name)
        tag = (e.provenance or "unknown").replace(" ", "_")
        lines.append(f"{e.id} {name} {tag}")
    manifest = d / MANIFEST_NAME
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def load_hub(manifest_path) -> Hub:
    mp = Path(manifest_path)
    if not mp.is_file():
        raise ArtifactError(f"hub manifest not found: {mp}")
    experts = []
    for ln, line in enumerate(mp.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ArtifactError(
                f"{mp}:{ln}: expected '<id> <path> <tag>', got {line!r}"
            )
        eid, rel, tag = parts
        experts.append(load_checkpoint(mp.parent / rel, int(eid), tag))
    return Hub(experts)
