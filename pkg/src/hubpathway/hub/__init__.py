"""Model hub: expert construction, head adaptation, checkpoints, manifests."""

from .checkpoint import (
    fnv1a64,
    load_checkpoint,
    load_component,
    save_checkpoint,
    save_component,
)
from .experts import (
    ACTIVATIONS,
    ArchDescriptor,
    Expert,
    build_expert,
    expert_forward,
    replace_head,
)
from .manifest import MANIFEST_NAME, Hub, load_hub, save_hub

__all__ = [
    "ACTIVATIONS", "ArchDescriptor", "Expert",
    "build_expert", "replace_head", "expert_forward",
    "fnv1a64", "save_checkpoint", "load_checkpoint",
    "save_component", "load_component",
    "Hub", "save_hub", "load_hub", "MANIFEST_NAME",
]
