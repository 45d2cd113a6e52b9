"""Bosonic Fock bases of N particles on an L-site chain and their reflection-parity sectors.

States are occupation-number vectors (n_1, ..., n_L) with sum N. The basis is
enumerated in descending lexicographic order, so |N,0,...,0> comes first and
|0,...,0,N> last. Positions are recovered without a lookup table through the
combinatorial rank of the occupation vector, which vectorizes over whole
batches of states (the Hamiltonian assembly relies on this).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CapacityError

#: Hard cap on the number of basis states kept in memory. Full diagonalization
#: is only sensible far below this; propagation workflows reach ~1e6.
DEFAULT_STATE_CAP = 5_000_000

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def hilbert_dimension(n_particles: int, n_sites: int) -> int:
    """Number of Fock states of ``n_particles`` bosons on ``n_sites`` sites."""
    if n_particles < 0 or n_sites < 1:
        raise ValueError("need n_particles >= 0 and n_sites >= 1")
    return comb(n_particles + n_sites - 1, n_particles)


def reflect(state) -> np.ndarray:
    """Occupations mirrored about the chain center. An involution."""
    return np.asarray(state)[::-1].copy()


def is_palindrome(state) -> bool:
    occ = np.asarray(state)
    return bool(np.array_equal(occ, occ[::-1]))


def _cumulative_dim_table(n_particles: int, n_sites: int) -> np.ndarray:
    """Table S[k, l] = number of states of at most k particles on l sites.

    S[k, l] = C(k + l, l); built by Pascal recursion so no entry ever exceeds
    the magnitudes actually needed for ranking (safe in int64 under the state
    cap).
    """
    table = np.ones((n_particles + 2, n_sites + 1), dtype=np.int64)
    for k in range(1, n_particles + 2):
        for l in range(1, n_sites + 1):
            table[k, l] = table[k - 1, l] + table[k, l - 1]
    return table


@dataclass(frozen=True)
class FockBasis:
    """Complete Fock basis at fixed particle number, descending-lex ordered."""

    n_particles: int
    n_sites: int
    states: np.ndarray  # (dim, n_sites) int16
    _cumdim: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def state(self, i: int) -> np.ndarray:
        return self.states[i]

    def index(self, occ) -> np.ndarray | int:
        """Position(s) of occupation vector(s) in the enumeration order.

        Accepts a single vector or a (batch, L) array; the rank is the number
        of lexicographically larger occupation vectors with the same totals.
        """
        arr = np.asarray(occ, dtype=np.int64)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.n_sites:
            raise ValueError("occupation vector has wrong length")
        n, L = self.n_particles, self.n_sites
        # particles still unplaced when arriving at each site
        remaining = n - np.cumsum(arr, axis=1) + arr
        surplus = remaining - arr - 1  # max extra particles a larger n_j would leave behind
        sites_after = L - 1 - np.arange(L, dtype=np.int64)
        rank = np.zeros(arr.shape[0], dtype=np.int64)
        for j in range(L - 1):
            k = surplus[:, j]
            valid = k >= 0
            if valid.any():
                rank[valid] += self._cumdim[k[valid], sites_after[j]]
        if single:
            return int(rank[0])
        return rank


def enumerate_basis(n_particles: int, n_sites: int,
                    max_states: int = DEFAULT_STATE_CAP) -> FockBasis:
    """Enumerate the full Fock basis in descending lexicographic order."""
    if n_particles < 0:
        raise ValueError("particle number must be non-negative")
    if n_sites < 2:
        raise ValueError("need at least two lattice sites")
    dim = hilbert_dimension(n_particles, n_sites)
    if dim > max_states:
        raise CapacityError(
            f"basis of {dim} states exceeds the cap of {max_states}; "
            "reduce N or L, or raise max_states")

    states = np.zeros((dim, n_sites), dtype=np.int16)
    occ = [0] * n_sites
    occ[0] = n_particles
    states[0] = occ
    for row in range(1, dim):
        # rightmost movable site feeds its surplus one site to the right
        k = n_sites - 2
        while occ[k] == 0:
            k -= 1
        occ[k] -= 1
        tail = n_particles - sum(occ[: k + 1])
        for j in range(k + 1, n_sites):
            occ[j] = 0
        occ[k + 1] = tail
        states[row] = occ

    return FockBasis(n_particles, n_sites, states,
                     _cumulative_dim_table(n_particles, n_sites))


@dataclass(frozen=True)
class ParityBasis:
    """Reflection-symmetrized basis for one parity sector.

    Each member combines a Fock state with its mirror image,
    (|n> +- |Pi n>)/sqrt(2), or is a palindrome with unit weight (even sector
    only). ``first`` holds the label that comes earlier in the full-basis
    enumeration; the odd-sector sign convention puts +1 on that label.
    """

    sector: str  # 'even' | 'odd'
    full: FockBasis
    first: np.ndarray    # (dim,) full-basis index of the canonical label
    partner: np.ndarray  # (dim,) index of the mirrored label (== first for palindromes)
    weight: np.ndarray   # (dim,) amplitude carried by each stored label
    member_of_full: np.ndarray  # (full.dim,) member index or -1
    coeff_of_full: np.ndarray   # (full.dim,) signed amplitude <n|member>

    @property
    def dim(self) -> int:
        return self.first.shape[0]

    @property
    def n_palindromes(self) -> int:
        return int(np.count_nonzero(self.first == self.partner))

    @property
    def n_sites(self) -> int:
        return self.full.n_sites

    @property
    def n_particles(self) -> int:
        return self.full.n_particles

    def member_states(self) -> tuple[np.ndarray, np.ndarray]:
        """Occupation vectors of the stored label and its mirror partner."""
        return self.full.states[self.first], self.full.states[self.partner]

    def member_index_of(self, occ) -> int:
        """Member containing the given Fock state (either label accepted)."""
        m = int(self.member_of_full[self.full.index(occ)])
        if m < 0:
            raise ValueError("state has no member in this sector")
        return m

    def expand(self, vec: np.ndarray) -> np.ndarray:
        """Amplitudes of a sector vector on the full Fock basis."""
        out = np.zeros(self.full.dim, dtype=vec.dtype)
        np.add.at(out, self.first, self.weight * vec)
        pair = self.first != self.partner
        sign = 1.0 if self.sector == "even" else -1.0
        np.add.at(out, self.partner[pair], sign * self.weight[pair] * vec[pair])
        return out


def build_parity_basis(basis: FockBasis, sector: str) -> ParityBasis:
    """Symmetrize a full Fock basis into one reflection-parity sector."""
    if sector not in ("even", "odd"):
        raise ValueError("sector must be 'even' or 'odd'")
    mirrored = basis.index(np.ascontiguousarray(basis.states[:, ::-1]))
    idx = np.arange(basis.dim, dtype=np.int64)
    palindromic = mirrored == idx

    if sector == "even":
        canonical = idx <= mirrored
    else:
        canonical = idx < mirrored
    first = idx[canonical]
    partner = mirrored[canonical]
    weight = np.where(first == partner, 1.0, _SQRT_HALF)

    member_of_full = np.full(basis.dim, -1, dtype=np.int64)
    members = np.arange(first.shape[0], dtype=np.int64)
    member_of_full[first] = members
    member_of_full[partner] = members

    coeff_of_full = np.zeros(basis.dim, dtype=np.float64)
    coeff_of_full[first] = weight
    sign = 1.0 if sector == "even" else -1.0
    pair = first != partner
    coeff_of_full[partner[pair]] = sign * weight[pair]

    pb = ParityBasis(sector, basis, first, partner, weight,
                     member_of_full, coeff_of_full)
    n_pal = int(np.count_nonzero(palindromic))
    expected = (basis.dim + n_pal) // 2 if sector == "even" else (basis.dim - n_pal) // 2
    assert pb.dim == expected
    return pb


def format_occupations(state) -> str:
    """Compact string form, digits when possible, comma-joined otherwise."""
    occ = [int(v) for v in np.asarray(state)]
    if all(v <= 9 for v in occ):
        return "".join(str(v) for v in occ)
    return ",".join(str(v) for v in occ)
