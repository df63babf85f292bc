"""SplitMix64 random streams, one per (master seed, record index).

Substream state is ``fmix(master_seed ^ fmix(record_index))`` where ``fmix`` is
the SplitMix64 output finalizer.  Bounded draws take the top
``bit_length(bound - 1)`` bits of each output and reject values ``>= bound``,
so there is no modulo bias and the result only depends on the stream state.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def fmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def parse_seed(text: str) -> int:
    """Parse a decimal or ``0x`` hexadecimal seed in the unsigned 64-bit range."""
    raw = text.strip().lower()
    try:
        value = int(raw, 16) if raw.startswith("0x") else int(raw, 10)
    except ValueError:
        raise ValueError(f"seed {text!r} is neither decimal nor 0x-hex") from None
    if not 0 <= value <= MASK64:
        raise ValueError(f"seed {text!r} is outside the unsigned 64-bit range")
    return value


class RandomStream:
    __slots__ = ("master_seed", "record_index", "state", "draws")

    def __init__(self, master_seed: int, record_index: int = 0):
        self.master_seed = master_seed & MASK64
        self.record_index = record_index
        self.state = fmix64(self.master_seed ^ fmix64(record_index))
        self.draws = 0

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        self.draws += 1
        return fmix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` for ``1 <= bound <= 2**64``."""
        if not 1 <= bound <= 1 << 64:
            raise ValueError(f"bound {bound} outside [1, 2**64]")
        shift = 64 - (bound - 1).bit_length()
        while True:
            r = self.next_u64() >> shift
            if r < bound:
                return r
