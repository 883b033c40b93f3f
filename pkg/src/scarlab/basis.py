"""Enumeration of the blockade-constrained sector of a spin-1/2 ring.

Site ``i`` is bit ``i`` of an integer label (1 = up); the cyclic neighbor of
site ``L - 1`` is site 0.  A configuration is admissible when no two cyclically
adjacent sites are both up, which is exactly the flip-connected sector that
contains the two Neel states.  The sector dimension follows the Lucas numbers
(7, 18, 47, 123, ... for L = 4, 6, 8, 10, ...).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_SITES = 4
MAX_SITES = 24  # dim 103682; dense eigensolves stay workstation-feasible


def is_blockaded(bits: int, length: int) -> bool:
    """True when no two cyclically adjacent bits of ``bits`` are both set."""
    if bits & (bits >> 1):
        return False
    return not ((bits & 1) and ((bits >> (length - 1)) & 1))


def n_up(state) -> int:
    """Number of up spins (popcount); accepts a BasisState or a raw bit label."""
    bits = state.bits if isinstance(state, BasisState) else int(state)
    return bits.bit_count()


@dataclass(frozen=True)
class BasisState:
    """One admissible configuration on a ring of ``length`` sites."""

    bits: int
    length: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.length):
            raise ValueError(f"bits {self.bits:#x} out of range for {self.length} sites")
        if not is_blockaded(self.bits, self.length):
            raise ValueError(f"adjacent up spins in {self.bits:#x} on a ring of {self.length}")

    @property
    def n_up(self) -> int:
        return self.bits.bit_count()

    def bitstring(self) -> str:
        """Binary label, site L-1 leftmost (so Z2 on 6 sites reads '010101')."""
        return format(self.bits, f"0{self.length}b")


@dataclass(frozen=True, eq=False)
class ConstrainedBasis:
    """Ordered admissible sector with O(1) label -> position lookup.

    ``states`` is ascending by bit label, ``nup[k]`` caches the up-spin count
    of ``states[k]`` and ``index[states[k]] == k``.
    """

    length: int
    states: np.ndarray
    nup: np.ndarray
    index: dict

    @property
    def dim(self) -> int:
        return int(self.states.size)

    def state(self, k: int) -> BasisState:
        return BasisState(int(self.states[k]), self.length)

    def index_of(self, bits: int) -> int:
        return self.index[int(bits)]


def open_chain_states(length: int) -> np.ndarray:
    """Bit labels of length-``length`` open chains with no adjacent up pairs, ascending."""
    # grow site by site: a state may set bit i only if bit i-1 is clear
    ending_down = [0]
    ending_up = [1]
    for i in range(1, length):
        bit = 1 << i
        new_up = [s | bit for s in ending_down]
        ending_down = ending_down + ending_up
        ending_up = new_up
    return np.array(sorted(ending_down + ending_up), dtype=np.int64)


def enumerate_basis(length: int) -> ConstrainedBasis:
    """Enumerate the Neel-connected sector of a ring of ``length`` sites.

    Raises ValueError for odd ``length`` (no Neel states) or lengths outside
    [4, 24] (degenerate neighbors below, impractical dense solves above).
    """
    if length % 2:
        raise ValueError(f"length must be even, got {length}")
    if not MIN_SITES <= length <= MAX_SITES:
        raise ValueError(f"length must be in [{MIN_SITES}, {MAX_SITES}], got {length}")
    chain = open_chain_states(length)
    # close the ring: sites 0 and L-1 may not both be up
    high = 1 << (length - 1)
    keep = ~(((chain & 1) == 1) & ((chain & high) == high))
    states = chain[keep]
    nup = np.array([int(s).bit_count() for s in states], dtype=np.int64)
    index = {int(s): k for k, s in enumerate(states)}
    return ConstrainedBasis(length=length, states=states, nup=nup, index=index)


def neel_bits(length: int) -> tuple[int, int]:
    """Bit labels of the two Neel states: even sites up, then odd sites up."""
    z2 = sum(1 << i for i in range(0, length, 2))
    z2bar = sum(1 << i for i in range(1, length, 2))
    return z2, z2bar


def neel_states(basis: ConstrainedBasis) -> tuple[int, int]:
    """Basis positions of the alternating states (|0101...>, |1010...>)."""
    z2, z2bar = neel_bits(basis.length)
    return basis.index[z2], basis.index[z2bar]
