"""Seed splitting: one run seed, fixed role offsets.

Every random stream in a run derives from the single config `seed` as
seed + offset, so each component is independently reproducible. Per-expert
streams add the expert index on top of the role offset.
"""

SUITE = 1_000
PRETRAIN = 2_000       # + expert index
HEAD_INIT = 3_000      # + expert index
GENERATOR = 4_000
AGGREGATOR = 5_000
NOISE = 6_000
SHUFFLE = 7_000
RANDOM_PATH = 8_000
FINETUNE = 9_000       # + expert index
DRAWS = 10_000

ROLES = {
    "suite": SUITE,
    "pretrain": PRETRAIN,
    "head_init": HEAD_INIT,
    "generator": GENERATOR,
    "aggregator": AGGREGATOR,
    "noise": NOISE,
    "shuffle": SHUFFLE,
    "random_path": RANDOM_PATH,
    "finetune": FINETUNE,
    "draws": DRAWS,
}


def derive_seed(seed: int, role: int, index: int = 0) -> int:
    return int(seed) + int(role) + int(index)
