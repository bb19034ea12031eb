"""Deterministic random-number streams.

Every stochastic routine in this package draws from a named stream: a
(master_seed, stream_id) pair mapped through numpy's SeedSequence onto an
independent PCG64 state.  Same pair, same draws, on every run and under any
thread schedule.  Monte Carlo loops assign one stream per path so results do
not depend on how paths are distributed over workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeedSpec:
    """Name of a random stream.

    Parameters
    ----------
    master_seed : int
        Run-level seed, unsigned 64-bit.
    stream_id : int
        Substream index, unsigned 64-bit.  Distinct ids under the same
        master seed give statistically independent streams.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if not 0 <= value <= _U64_MAX:
                raise ValueError(f"{name} must fit in an unsigned 64-bit word, got {value}")


def stream(spec: SeedSpec) -> np.random.Generator:
    """Instantiate the generator named by ``spec``.

    The state is a pure function of the pair, so transferring a spec between
    workers is safe; sharing one live Generator across threads is not.
    """
    seq = np.random.SeedSequence([spec.master_seed, spec.stream_id])
    return np.random.Generator(np.random.PCG64(seq))


def standard_normal(gen: np.random.Generator, size: int | tuple[int, ...] | None = None):
    """Draw N(0, 1) variates via the generator's ziggurat sampler.

    Exact normal marginals, not a central-limit approximation.  Returns a
    scalar when size is None, else an ndarray of the requested shape.
    """
    return gen.standard_normal(size)
