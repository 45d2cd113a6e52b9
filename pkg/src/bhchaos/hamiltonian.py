"""Bose-Hubbard Hamiltonian with hard-wall boundaries as a symmetric sparse matrix.

H = -J * h_tun + U * h_int with dimensionless parts kept separate, so a sweep
over gamma = J/U can reuse the assembled structure and only rescale at apply
time. Assembly works either in the full Fock basis or directly inside one
reflection-parity sector (the full-space matrix is never formed for sector
work).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sparse

from .basis import FockBasis, ParityBasis


@dataclass(frozen=True)
class CouplingParameters:
    """Tunneling energy J and on-site interaction U (same energy units)."""

    j: float
    u: float

    def __post_init__(self):
        if self.j < 0 or self.u < 0:
            raise ValueError("couplings must be non-negative")

    @property
    def gamma(self) -> float:
        if self.u == 0:
            raise ValueError("gamma = J/U undefined at U = 0")
        return self.j / self.u

    def eta(self, n_particles: int) -> float:
        if self.u == 0:
            raise ValueError("eta = J/(U N) undefined at U = 0")
        return self.j / (self.u * n_particles)

    @staticmethod
    def from_gamma(gamma: float, u: float = 1.0) -> "CouplingParameters":
        return CouplingParameters(j=gamma * u, u=u)

    @staticmethod
    def from_eta(eta: float, n_particles: int, u: float = 1.0) -> "CouplingParameters":
        return CouplingParameters(j=eta * n_particles * u, u=u)


def _interaction_diagonal(occ: np.ndarray) -> np.ndarray:
    occ64 = occ.astype(np.int64)
    return 0.5 * np.sum(occ64 * (occ64 - 1), axis=1).astype(np.float64)


def _full_tunneling_coo(basis: FockBasis):
    occ = basis.states
    dim, L = occ.shape
    rows, cols, vals = [], [], []
    for j in range(L - 1):
        src = np.nonzero(occ[:, j] > 0)[0]
        if src.size == 0:
            continue
        amp = np.sqrt(occ[src, j].astype(np.float64)
                      * (occ[src, j + 1].astype(np.float64) + 1.0))
        moved = occ[src].copy()
        moved[:, j] -= 1
        moved[:, j + 1] += 1
        tgt = basis.index(moved)
        rows.append(tgt)
        cols.append(src)
        vals.append(amp)
        # symmetric counterpart, stored explicitly (both triangles)
        rows.append(src)
        cols.append(tgt)
        vals.append(amp)
    if not rows:
        return sparse.csr_matrix((dim, dim), dtype=np.float64)
    mat = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    return mat


def _sector_tunneling_coo(pb: ParityBasis):
    full = pb.full
    occ = full.states
    L = full.n_sites
    dim = pb.dim

    pair = pb.first != pb.partner
    sign = 1.0 if pb.sector == "even" else -1.0
    # every stored label of every member, with its in-member amplitude
    label_idx = np.concatenate([pb.first, pb.partner[pair]])
    label_member = np.concatenate([np.arange(dim), np.arange(dim)[pair]])
    label_coeff = np.concatenate([pb.weight, sign * pb.weight[pair]])

    rows, cols, vals = [], [], []
    for j in range(L - 1):
        for src_site, dst_site in ((j, j + 1), (j + 1, j)):
            n_src = occ[label_idx, src_site]
            movable = np.nonzero(n_src > 0)[0]
            if movable.size == 0:
                continue
            sel = label_idx[movable]
            amp = np.sqrt(occ[sel, src_site].astype(np.float64)
                          * (occ[sel, dst_site].astype(np.float64) + 1.0))
            moved = occ[sel].copy()
            moved[:, src_site] -= 1
            moved[:, dst_site] += 1
            tgt_full = full.index(moved)
            tgt_member = pb.member_of_full[tgt_full]
            keep = tgt_member >= 0  # odd sector has no palindromic members
            rows.append(tgt_member[keep])
            cols.append(label_member[movable][keep])
            vals.append(pb.coeff_of_full[tgt_full[keep]]
                        * amp[keep] * label_coeff[movable][keep])
    if not rows:
        return sparse.csr_matrix((dim, dim), dtype=np.float64)
    mat = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    return mat


@dataclass(frozen=True)
class SparseHamiltonian:
    """H = -J h_tun + U h_int over a Fock or parity basis.

    ``h_tun`` is a symmetric CSR matrix of bare hopping amplitudes (positive),
    ``h_int`` the diagonal interaction vector sum_j n_j (n_j - 1) / 2.
    """

    basis: FockBasis | ParityBasis
    params: CouplingParameters
    h_tun: sparse.csr_matrix
    h_int: np.ndarray

    @property
    def dim(self) -> int:
        return self.h_int.shape[0]

    @property
    def j(self) -> float:
        return self.params.j

    @property
    def u(self) -> float:
        return self.params.u

    def with_couplings(self, params: CouplingParameters) -> "SparseHamiltonian":
        """Same structure, new (J, U); arrays are shared, not copied."""
        return replace(self, params=params)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix-vector product H @ vec."""
        v = np.asarray(vec)
        if v.shape != (self.dim,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.dim},)")
        if np.iscomplexobj(v):
            re = np.ascontiguousarray(v.real)
            im = np.ascontiguousarray(v.imag)
            hop = (self.h_tun @ re) + 1j * (self.h_tun @ im)
        else:
            hop = self.h_tun @ v
        return -self.j * hop + self.u * (self.h_int * v)

    def matrix(self) -> sparse.csr_matrix:
        """Assembled H as a CSR matrix."""
        return (-self.j) * self.h_tun + sparse.diags(self.u * self.h_int, format="csr")

    def dense(self) -> np.ndarray:
        return self.matrix().toarray()

    def expectation(self, vec: np.ndarray) -> float:
        return float(np.real(np.vdot(vec, self.apply(vec))))


def assemble(basis: FockBasis | ParityBasis,
             params: CouplingParameters) -> SparseHamiltonian:
    """Build the Hamiltonian in the given basis."""
    if isinstance(basis, ParityBasis):
        h_tun = _sector_tunneling_coo(basis)
        h_int = _interaction_diagonal(basis.full.states[basis.first])
    elif isinstance(basis, FockBasis):
        h_tun = _full_tunneling_coo(basis)
        h_int = _interaction_diagonal(basis.states)
    else:
        raise TypeError(f"unsupported basis type {type(basis).__name__}")
    return SparseHamiltonian(basis, params, h_tun, h_int)
