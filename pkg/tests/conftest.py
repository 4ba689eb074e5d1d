from __future__ import annotations

import functools

from hypothesis import HealthCheck, settings

from artifact.mirror import named_pair
from artifact.tyurin import build_glued

# Fixed seed: every run draws the same examples.
settings.register_profile(
    "artifact",
    max_examples=200,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("artifact")


@functools.lru_cache(maxsize=None)
def glued(name1: str, name2: str):
    return build_glued(named_pair(name1), named_pair(name2))
