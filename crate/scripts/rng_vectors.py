#!/usr/bin/env python3
"""Independent reference for the crate's seeded generator (SplitMix64 -> PCG32 XSH-RR).

Prints the test vectors frozen into crates/core/src/rng.rs.
"""
M64 = (1 << 64) - 1
M32 = (1 << 32) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return state, z ^ (z >> 31)


class Pcg32:
    def __init__(self, seed):
        s, init_state = splitmix64(seed)
        s, init_seq = splitmix64(s)
        self.state = 0
        self.inc = ((init_seq << 1) | 1) & M64
        self.next_u32()
        self.state = (self.state + init_state) & M64
        self.next_u32()

    def next_u32(self):
        old = self.state
        self.state = (old * 6364136223846793005 + self.inc) & M64
        xorshifted = (((old >> 18) ^ old) >> 27) & M32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & M32

    def next_u64(self):
        hi = self.next_u32()
        return (hi << 32) | self.next_u32()

    def below(self, n):
        m = self.next_u32() * n
        low = m & M32
        if low < n:
            t = ((1 << 32) - n) % n
            while low < t:
                m = self.next_u32() * n
                low = m & M32
        return m >> 32

    def unit(self):
        return (self.next_u64() >> 11) / float(1 << 53)


def fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & M64
    return h


if __name__ == "__main__":
    import struct
    r = Pcg32(42); print("seed42", [r.next_u32() for _ in range(6)])
    r = Pcg32(0); print("seed0", [r.next_u32() for _ in range(6)])
    r = Pcg32(7); print("below10 seed7", [r.below(10) for _ in range(8)])
    r = Pcg32(7); u = r.unit(); print("unit seed7 bits", hex(struct.unpack("<Q", struct.pack("<d", u))[0]), u)
    print("splitmix(0)", hex(splitmix64(0)[1]))
    print("fnv('')", hex(fnv1a64(b"")), "fnv('a')", hex(fnv1a64(b"a")))
