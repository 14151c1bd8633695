"""Counter-based random streams with a fixed normal-variate algorithm.

Reproducibility contract
------------------------
A stream is identified by the pair (seed, stream_id). Both are 64-bit
unsigned integers. The pair is mapped to a 128-bit Philox key by applying the
SplitMix64 finalizer to each word:

    key = (mix64(seed), mix64(stream_id XOR 0x9E3779B97F4A7C15))

mix64 is a bijection on 64-bit words, so distinct (seed, stream_id) pairs
always map to distinct keys, and low-entropy seeds (0, 1, 2, ...) are spread
over the whole key space. Philox is counter-based: streams with different
keys are independent by construction and no jump-ahead bookkeeping is needed.

Uniforms are the top 53 bits of each 64-bit draw scaled by 2**-53, giving
doubles in [0, 1). Normals come from the polar Box-Muller method applied to
consecutive uniform pairs: u -> v = 2u - 1, accept when 0 < v0^2 + v1^2 < 1,
then emit both v0*r and v1*r with r = sqrt(-2 ln s / s). The accepted values
form one well-defined sequence per stream; normals(n) returns the next n
values of that sequence regardless of how requests are batched (overshoot is
buffered, never discarded).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed 64-bit mixing bijection."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_key(seed: int, stream_id: int) -> tuple[int, int]:
    """Map (seed, stream_id) to the 128-bit Philox key, word by word."""
    return mix64(seed), mix64(stream_id ^ _GOLDEN)


def _check_uint64(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value < (1 << 64):
        raise InvalidParameterError(f"{name} must be in [0, 2**64), got {value}")
    return int(value)


class RngStream:
    """One independent random stream keyed by (seed, stream_id).

    The same pair always reproduces the same uniform and normal sequences,
    independent of request sizes. A stream is stateful and must not be shared
    between concurrently running consumers.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = _check_uint64(seed, "seed")
        self.stream_id = _check_uint64(stream_id, "stream_id")
        key = derive_key(self.seed, self.stream_id)
        self._bitgen = np.random.Philox(key=(key[0] | (key[1] << 64)))
        self._pending = np.empty(0, dtype=np.float64)

    def uniforms(self, n: int) -> np.ndarray:
        """Next n doubles in [0, 1), 53-bit resolution."""
        if n < 0:
            raise InvalidParameterError(f"n must be >= 0, got {n}")
        raw = self._bitgen.random_raw(n)
        return (raw >> np.uint64(11)) * np.float64(2.0 ** -53)

    def normals(self, n: int) -> np.ndarray:
        """Next n standard normal variates of this stream's sequence."""
        if n < 0:
            raise InvalidParameterError(f"n must be >= 0, got {n}")
        if self._pending.size >= n:
            out, self._pending = self._pending[:n], self._pending[n:]
            return out.copy()
        parts = [self._pending]
        have = self._pending.size
        self._pending = np.empty(0, dtype=np.float64)
        while have < n:
            # Acceptance rate is pi/4; draw with headroom so that one or two
            # rounds usually suffice. Batch size never affects the sequence.
            need_pairs = (n - have + 1) // 2
            batch_pairs = max(int(need_pairs / 0.7) + 8, 16)
            u = self.uniforms(2 * batch_pairs).reshape(batch_pairs, 2)
            v = 2.0 * u - 1.0
            s = v[:, 0] ** 2 + v[:, 1] ** 2
            ok = (s > 0.0) & (s < 1.0)
            v, s = v[ok], s[ok]
            r = np.sqrt(-2.0 * np.log(s) / s)
            accepted = np.empty(2 * s.size, dtype=np.float64)
            accepted[0::2] = v[:, 0] * r
            accepted[1::2] = v[:, 1] * r
            parts.append(accepted)
            have += accepted.size
        flat = np.concatenate(parts)
        out, self._pending = flat[:n], flat[n:]
        return out.copy()

    def gaussian(self, mean: float, std: float) -> float:
        """One N(mean, std^2) draw; always consumes exactly one normal.

        std == 0 returns mean exactly (the consumed normal is multiplied
        by zero), keeping stream positions aligned across parameterizations.
        """
        if not np.isfinite(mean) or not np.isfinite(std):
            raise InvalidParameterError(f"mean and std must be finite, got {mean}, {std}")
        if std < 0:
            raise InvalidParameterError(f"std must be >= 0, got {std}")
        z = self.normals(1)[0]
        return float(mean + std * z)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def gaussian(stream: RngStream, mean: float, std: float) -> float:
    """Functional form of RngStream.gaussian."""
    return stream.gaussian(mean, std)


def derive_seed(seed: int, tag: int) -> int:
    """A deterministic secondary seed for auxiliary ensembles.

    Used where an experiment needs extra, independent randomness (for example
    twin ensembles for the histogram noise floor) without colliding with the
    per-path stream ids of the main run.
    """
    return mix64(_check_uint64(seed, "seed") ^ mix64(tag))
