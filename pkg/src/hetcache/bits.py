"""Fixed-length bit sequences backed by Python integers.

Bit 0 is the most significant bit of ``value``. Serialized forms are
byte aligned, with zero padding after the last bit.
"""

from __future__ import annotations


class Bits:
    """An ``n``-bit sequence, treated as immutable.

    A plain slotted class rather than a frozen dataclass: exhaustive
    simulation builds millions of these and construction cost matters.
    """

    __slots__ = ("value", "n")

    def __init__(self, value: int, n: int):
        if n < 0 or value < 0 or value.bit_length() > n:
            raise ValueError(f"value does not fit in {n} bits")
        self.value = value
        self.n = n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bits):
            return NotImplemented
        return self.n == other.n and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.value, self.n))

    @classmethod
    def empty(cls) -> "Bits":
        return EMPTY

    @classmethod
    def from_str(cls, s: str) -> "Bits":
        return cls(int(s, 2) if s else 0, len(s))

    @classmethod
    def join(cls, parts) -> "Bits":
        value, n = 0, 0
        for p in parts:
            value = (value << p.n) | p.value
            n += p.n
        return cls(value, n)

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "Bits":
        pad = 8 * len(data) - n
        if not 0 <= pad < 8:
            raise ValueError("byte length does not match bit length")
        return cls(int.from_bytes(data, "big") >> pad, n)

    def to_bytes(self) -> bytes:
        nbytes = (self.n + 7) // 8
        return (self.value << (8 * nbytes - self.n)).to_bytes(nbytes, "big")

    def __len__(self) -> int:
        return self.n

    def __xor__(self, other: "Bits") -> "Bits":
        if self.n != other.n:
            raise ValueError(f"xor of {self.n}-bit and {other.n}-bit sequences")
        return Bits(self.value ^ other.value, self.n)

    def __add__(self, other: "Bits") -> "Bits":
        return Bits((self.value << other.n) | other.value, self.n + other.n)

    def __getitem__(self, key):
        if isinstance(key, int):
            if key < 0:
                key += self.n
            if not 0 <= key < self.n:
                raise IndexError(key)
            return (self.value >> (self.n - 1 - key)) & 1
        start, stop, step = key.indices(self.n)
        if step != 1:
            raise ValueError("only contiguous slices are supported")
        if stop <= start:
            return EMPTY
        return self.take(start, stop - start)

    def take(self, start: int, width: int) -> "Bits":
        """Bits ``[start, start + width)``; the caller guarantees the range."""
        return Bits((self.value >> (self.n - start - width)) & ((1 << width) - 1), width)

    def chunks(self, width: int) -> list["Bits"]:
        """Split into consecutive pieces of ``width`` bits."""
        if width == 0:
            return []
        if self.n % width:
            raise ValueError(f"{self.n} bits do not split into {width}-bit chunks")
        return [self[i:i + width] for i in range(0, self.n, width)]

    def flip(self, i: int) -> "Bits":
        return Bits(self.value ^ (1 << (self.n - 1 - i)), self.n)

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b") if self.n else ""

    def __repr__(self) -> str:
        s = str(self)
        return f"Bits({s[:32]}{'...' if self.n > 32 else ''}, n={self.n})"


EMPTY = Bits(0, 0)
