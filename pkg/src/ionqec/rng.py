"""Deterministic random streams with random access.

Every stochastic routine in the package draws from a stream derived from
(seed, *path) where the path identifies the consumer (a noise channel, a
shot block, a schedule shuffle).  Streams support O(log n) skip-ahead, so a
worker that owns shots [a, b) of channel c draws exactly the same numbers
regardless of how many other workers exist.
"""

from __future__ import annotations

from numpy.random import Generator, PCG64, SeedSequence

# Domain tags keep unrelated consumers out of each other's streams even if
# their integer paths collide.
DOMAIN_CHANNEL = 0x11
DOMAIN_BLOCK = 0x22
DOMAIN_SCHEDULE = 0x33
DOMAIN_NOISE_SAMPLE = 0x44
DOMAIN_INSTANCE = 0x55


def substream(seed: int, *path: int) -> Generator:
    """Generator for the stream addressed by (seed, *path).

    PCG64 advances one state step per generated double, so
    ``substream(...).bit_generator.advance(a)`` followed by ``random(n)``
    yields element a..a+n of the stream; see test_rng for the pinned check.
    """
    return Generator(PCG64(SeedSequence((int(seed),) + tuple(int(p) for p in path))))


def channel_stream(seed: int, channel: int, shot_offset: int = 0) -> Generator:
    """Stream for one noise channel, positioned at shot `shot_offset`."""
    gen = substream(seed, DOMAIN_CHANNEL, channel)
    if shot_offset:
        gen.bit_generator.advance(shot_offset)
    return gen


def block_stream(seed: int, block: int) -> Generator:
    """Stream owned by one fixed-size shot block of the fast sampler."""
    return substream(seed, DOMAIN_BLOCK, block)
