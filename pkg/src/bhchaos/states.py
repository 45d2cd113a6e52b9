"""Initial Fock-state families and their analytic energy characterization.

Three experimentally motivated families at (near-)integer density: the
homogeneous state |n,...,n>, the staggered configuration whose interaction
energy sits closest to the spectrum's arithmetic mean, and a cloud of all N
particles packed into a few central sites. For each we provide the closed-form
interaction energy, the width of its local density of states, and the analytic
estimate of the chaos threshold in gamma = J/U or eta = J/(U N).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis import format_occupations, is_palindrome
from .errors import StateConstructionError


def interaction_sum(state) -> int:
    """sum_j n_j (n_j - 1), exact integer (twice the interaction energy / U)."""
    occ = np.asarray(state, dtype=np.int64)
    return int(np.sum(occ * (occ - 1)))


def fock_energy(state, u: float = 1.0) -> float:
    """Diagonal energy <n|H|n> = (U/2) sum_j n_j (n_j - 1)."""
    return u * interaction_sum(state) / 2.0


def maximally_mixed_energy_ratio(n_particles: int, n_sites: int) -> Fraction:
    """Tr(H)/dim in units of U, exactly N(N-1)/(L+1)."""
    return Fraction(n_particles * (n_particles - 1), n_sites + 1)


def maximally_mixed_energy(n_particles: int, n_sites: int, u: float = 1.0) -> float:
    return u * float(maximally_mixed_energy_ratio(n_particles, n_sites))


def ldos_width(state, j: float) -> float:
    """Energy width sigma of the local density of states of a Fock state.

    sigma^2 = J^2 (2N - n_1 - n_L + 2 sum_j n_j n_{j+1}); identical to
    <H^2> - <H>^2 because only one-hop neighbours contribute.
    """
    occ = np.asarray(state, dtype=np.int64)
    n = int(occ.sum())
    quad = 2 * n - int(occ[0]) - int(occ[-1]) + 2 * int(np.sum(occ[:-1] * occ[1:]))
    return j * float(np.sqrt(quad))


# --------------------------------------------------------------------------
# state constructors
# --------------------------------------------------------------------------

def make_homogeneous(n_particles: int, n_sites: int) -> np.ndarray:
    """|n, n, ..., n> with n = N/L; requires integer density."""
    if n_particles % n_sites != 0:
        raise StateConstructionError(
            f"density {n_particles}/{n_sites} is not an integer")
    return np.full(n_sites, n_particles // n_sites, dtype=np.int16)


def _separated_palindromes(n_particles: int, n_sites: int):
    """All palindromic occupation vectors with entries in {0..3} and no two
    adjacent occupied sites. Generated from the independent half."""
    L = n_sites
    half = (L + 1) // 2
    results = []

    def rec(pos, acc, total):
        if total > n_particles:
            return
        if pos == half:
            full = acc + acc[::-1] if L % 2 == 0 else acc + acc[-2::-1]
            if sum(full) != n_particles:
                return
            for a, b in zip(full, full[1:]):
                if a and b:
                    return
            results.append(tuple(full))
            return
        for v in range(4):
            if v and pos > 0 and acc[pos - 1]:
                continue
            rec(pos + 1, acc + [v], total + v)

    rec(0, [], 0)
    return results


def make_staggered(n_particles: int, n_sites: int) -> np.ndarray:
    """Palindromic staggered configuration closest in energy to the spectral mean.

    Candidates are palindromes with occupations in {0..3} and empty sites
    between occupied ones; the winner minimizes |E - E_MM|. Energy ties are
    broken deterministically: keep the chain ends empty (maximal LDOS width),
    push the sub-triple adjustment sites outward, pull the triply occupied
    core together, then take the lexicographically smallest.
    """
    if n_particles != n_sites:
        raise StateConstructionError("staggered states are defined at unit density")
    if n_particles < 5:
        raise StateConstructionError("staggered pattern needs at least 5 sites")
    candidates = _separated_palindromes(n_particles, n_sites)
    if not candidates:
        raise StateConstructionError(
            f"no separated palindromic pattern for N = L = {n_particles}")

    e_mm = maximally_mixed_energy_ratio(n_particles, n_sites)
    distance = {s: abs(Fraction(interaction_sum(s), 2) - e_mm) for s in candidates}
    best = min(distance.values())
    ties = [s for s in candidates if distance[s] == best]

    center = Fraction(n_sites + 1, 2)

    def rank(s):
        edge = s[0] + s[-1]
        adjuster_spread = sum((Fraction(i + 1) - center) ** 2
                              for i, v in enumerate(s) if 0 < v < 3)
        core_spread = sum((Fraction(i + 1) - center) ** 2
                          for i, v in enumerate(s) if v >= 3)
        return (edge, -adjuster_spread, core_spread, s)

    return np.array(min(ties, key=rank), dtype=np.int16)


def make_localized(n_particles: int, n_sites: int, ell: int = 3) -> np.ndarray:
    """All N particles on ell contiguous central sites.

    Each populated site holds floor(N/ell) or ceil(N/ell) particles; an odd
    remainder goes to the block center, remaining surplus pairs are placed on
    the outermost block sites first. The block is centered, leaning half a
    site right when L - ell is odd; for ell = 3 it starts at site floor(L/2)
    (1-indexed).
    """
    if ell < 1 or ell > n_sites:
        raise StateConstructionError("block size must satisfy 1 <= ell <= L")
    base, remainder = divmod(n_particles, ell)
    block = np.full(ell, base, dtype=np.int16)
    if remainder:
        if remainder % 2 == 1:
            if ell % 2 == 0:
                raise StateConstructionError(
                    f"remainder {remainder} cannot be split symmetrically "
                    f"over an even block of {ell} sites")
            block[ell // 2] += 1
            remainder -= 1
        lo, hi = 0, ell - 1
        while remainder:
            block[lo] += 1
            block[hi] += 1
            remainder -= 2
            lo += 1
            hi -= 1

    start = (n_sites - ell + 1) // 2  # 0-based, right-leaning centering
    state = np.zeros(n_sites, dtype=np.int16)
    state[start:start + ell] = block
    return state


@dataclass(frozen=True)
class InitialStateSpec:
    """A resolved initial state with its family metadata."""

    kind: str  # 'homogeneous' | 'staggered' | 'localized'
    n_particles: int
    n_sites: int
    ell: int | None
    state: tuple

    @property
    def density(self) -> int:
        return self.n_particles // self.n_sites

    @property
    def palindromic(self) -> bool:
        return is_palindrome(self.state)

    @property
    def occupations(self) -> np.ndarray:
        return np.array(self.state, dtype=np.int16)

    def __str__(self):
        return f"{self.kind}({format_occupations(self.state)})"


def initial_state(kind: str, n_particles: int, n_sites: int,
                  ell: int = 3) -> InitialStateSpec:
    if kind == "homogeneous":
        occ = make_homogeneous(n_particles, n_sites)
        ell_used = None
    elif kind == "staggered":
        occ = make_staggered(n_particles, n_sites)
        ell_used = None
    elif kind == "localized":
        occ = make_localized(n_particles, n_sites, ell)
        ell_used = ell
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    return InitialStateSpec(kind, n_particles, n_sites, ell_used,
                            tuple(int(v) for v in occ))


# --------------------------------------------------------------------------
# analytic thresholds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdEstimate:
    """Analytic chaos-onset estimate for one initial state."""

    gamma_c: Fraction
    eta_c: Fraction
    regime: str  # 'gamma_controlled' | 'eta_controlled'
    h_int_over_n: Fraction
    density: int


def threshold(spec: InitialStateSpec) -> ThresholdEstimate:
    """Crossing point of the excess-energy-density asymptotes.

    The homogeneous state (lowest possible energy density) crosses at
    gamma_c = 1/(n+1). States whose interaction energy grows linearly with N
    cross at gamma_c = (<h_int>/N - (n-1)/2)/2; when it grows quadratically
    the transition is instead pinned in eta, eta_c = <h_int>/(2 N^2).
    """
    n = spec.density
    big_n = spec.n_particles
    h_over_n = Fraction(interaction_sum(spec.state), 2 * big_n)
    if spec.kind == "homogeneous":
        gamma_c = Fraction(1, n + 1)
        return ThresholdEstimate(gamma_c, gamma_c / big_n, "gamma_controlled",
                                 h_over_n, n)
    if spec.kind == "localized":
        eta_c = h_over_n / (2 * big_n)
        return ThresholdEstimate(eta_c * big_n, eta_c, "eta_controlled",
                                 h_over_n, n)
    gamma_c = (h_over_n - Fraction(n - 1, 2)) / 2
    return ThresholdEstimate(gamma_c, gamma_c / big_n, "gamma_controlled",
                             h_over_n, n)


def threshold_asymptotic(kind: str, density: int = 1, ell: int = 3) -> Fraction:
    """Large-N limit of the threshold: gamma_c for homogeneous/staggered,
    eta_c for localized."""
    if kind == "homogeneous":
        return Fraction(1, density + 1)
    if kind == "staggered":
        # gamma_c = (1 - 2/N)/2 -> 1/2
        return Fraction(1, 2)
    if kind == "localized":
        # <h_int>/N^2 -> 1/(2 ell) at fixed ell, so eta_c -> 1/(4 ell)
        return Fraction(1, 4 * ell)
    raise ValueError(f"unknown state kind {kind!r}")


@dataclass(frozen=True)
class ExcessEnergyAsymptotes:
    """(omega - omega_0)/J tendencies: A/gamma + B*gamma for gamma -> 0,
    the constant 2 for gamma -> infinity."""

    small_gamma_inverse_coeff: Fraction  # A = <h_int>/N - (n-1)/2
    small_gamma_linear_coeff: Fraction   # B = 2 (n+1)
    large_gamma_constant: float = 2.0

    def small_gamma(self, gamma: float) -> float:
        return float(self.small_gamma_inverse_coeff) / gamma \
            + float(self.small_gamma_linear_coeff) * gamma


def excess_energy_asymptotes(spec: InitialStateSpec) -> ExcessEnergyAsymptotes:
    n = spec.density
    h_over_n = Fraction(interaction_sum(spec.state), 2 * spec.n_particles)
    return ExcessEnergyAsymptotes(h_over_n - Fraction(n - 1, 2),
                                  Fraction(2 * (n + 1)))
