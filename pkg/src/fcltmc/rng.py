"""Reproducible counter-based random streams.

Every sampler in the package is a pure function of an :class:`RngStreamSpec`.
The underlying generator is Philox, keyed by ``(master_seed, stream_index)``,
so draws are a deterministic function of the key and the draw counter.
Distinct stream indices give statistically independent streams, and a stream
can be consumed in any order relative to other streams without changing its
output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

# Replicate streams live in blocks of 2**32 indices so that independent
# experiment cells can never collide as long as replicate counts stay
# below 2**32.
REPLICATE_BLOCK = 1 << 32

# Smallest uniform fed to the inverse CDF.  Generator.random() returns
# values in [0, 1); exact zeros (probability 2**-53 per draw) would map
# to -inf, so they are clamped one representable step into the interval.
_U_FLOOR = 2.0**-53


@dataclass(frozen=True)
class RngStreamSpec:
    """(master seed, stream index) pair identifying a random substream."""

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed % 2**64, self.stream_index % 2**64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def uniforms(self, n: int) -> np.ndarray:
        """n uniforms in [0, 1)."""
        return self.generator().random(n)

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via the inverse CDF of counter-based uniforms.

        Inverse-CDF sampling is rejection-free, so a path that needs n
        normals always consumes exactly n uniforms.
        """
        u = self.generator().random(n)
        np.maximum(u, _U_FLOOR, out=u)
        return ndtri(u, out=u)

    def replicate(self, i: int) -> "RngStreamSpec":
        """Stream for replicate ``i`` within this spec's block."""
        return RngStreamSpec(self.master_seed, self.stream_index + i)

    def block(self, b: int) -> "RngStreamSpec":
        """Base stream of a disjoint block of ``REPLICATE_BLOCK`` replicates."""
        return RngStreamSpec(self.master_seed, self.stream_index + b * REPLICATE_BLOCK)


def normals_from(spec: RngStreamSpec, n: int) -> np.ndarray:
    return spec.normals(n)
