"""Syndrome sectors of a code Hamiltonian.

Shared by :mod:`qmem.eclayer` and :mod:`qmem.thermal`: the syndrome type,
the dense Hamiltonian, the block structure of ``H`` over the joint
eigenspaces of the stabilizer generators and the ground-sector convention.

Raw sectors are labelled by the eigenvalues ``(-1)**s_i`` of the stabilizer
generators as produced by :func:`qmem.codespec.stabilizer_group`.  Once the
sector holding the ground state is known, generator signs are flipped so
that this sector becomes the zero syndrome.  Every public function here
works in the relabelled convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codespec import CodeSpec, gauge_group, stabilizer_group
from .errors import AmbiguousGroundError, InputError, NumericalError, SizeLimitError
from .pauli import PauliOperator, check_dense, pauli_sum_matrix, pauli_to_matrix

SYNDROME_LIMIT = 20
EXPANSION_LIMIT = 12


@dataclass(frozen=True, order=True)
class Syndrome:
    """Bit pattern over the ordered stabilizer generators; addition is XOR."""

    bits: tuple[int, ...]

    @classmethod
    def zero(cls, r: int) -> Syndrome:
        return cls((0,) * r)

    @classmethod
    def from_index(cls, index: int, r: int) -> Syndrome:
        return cls(tuple((index >> i) & 1 for i in range(r)))

    @classmethod
    def from_string(cls, text: str) -> Syndrome:
        if any(ch not in "01" for ch in text):
            raise InputError(f"syndrome must be a 0/1 string, got {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @property
    def r(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    @property
    def is_zero(self) -> bool:
        return not any(self.bits)

    def __add__(self, other: Syndrome) -> Syndrome:
        if other.r != self.r:
            raise InputError(f"syndrome lengths differ: {self.r} vs {other.r}")
        return Syndrome(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    __xor__ = __add__

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def all_syndromes(r: int) -> list[Syndrome]:
    check_syndrome_count(r)
    return [Syndrome.from_index(i, r) for i in range(1 << r)]


def check_syndrome_count(r: int, limit: int = SYNDROME_LIMIT) -> None:
    if r > limit:
        raise SizeLimitError(f"rank(S) = {r} exceeds the syndrome-table limit of {limit}")


def stabilizer_generators(code: CodeSpec) -> tuple[PauliOperator, ...]:
    """Raw (unoriented) stabilizer generators in their fixed order."""
    return stabilizer_group(code).rows


def syndrome_bits(generators, E: PauliOperator) -> Syndrome:
    return Syndrome(tuple(0 if E.commutes(g) else 1 for g in generators))


def hamiltonian(code: CodeSpec, limit: int | None = None) -> np.ndarray:
    """Dense ``H = sum_i r_i G_i``."""
    return pauli_sum_matrix(code.gauge_terms, code.n, limit)


def energy_scale(code: CodeSpec) -> float:
    return sum(abs(r) for r in code.couplings) or 1.0


def cluster_levels(values, tol: float) -> tuple[tuple[float, int], ...]:
    """Merge sorted eigenvalues closer than ``tol`` into (mean, multiplicity)."""
    values = np.sort(np.asarray(values, dtype=float))
    levels = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            chunk = values[start:i]
            levels.append((float(chunk.mean()), len(chunk)))
            start = i
    return tuple(levels)


@dataclass(frozen=True)
class SectorSpectrum:
    """Energy levels of ``H`` per relabelled syndrome sector."""

    n: int
    r: int
    levels: dict
    ground_sector: Syndrome
    ground_energy: float
    gap: float
    method: str
    generators: tuple[PauliOperator, ...]

    def energies(self) -> np.ndarray:
        out = []
        for lv in self.levels.values():
            for e, m in lv:
                out.extend([e] * m)
        return np.sort(np.array(out))

    def sector_dimension(self, s: Syndrome) -> int:
        return sum(m for _, m in self.levels[s])

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "ground_sector_raw": str(self.ground_sector),
            "ground_energy": self.ground_energy,
            "gap": self.gap,
            "generators": [str(g) for g in self.generators],
            "sectors": [
                {
                    "syndrome": str(s),
                    "levels": [{"energy": e, "multiplicity": m} for e, m in lv],
                }
                for s, lv in sorted(self.levels.items())
            ],
        }


def _term_expansions(code: CodeSpec):
    """Each gauge term as ``sign * prod_{j in mask} S_j`` (Abelian codes only)."""
    stab = stabilizer_group(code)
    out = []
    for r_i, g in code.gauge_terms:
        sol = stab.solve(g)
        if sol is None:
            raise InputError(f"gauge term {g} is not in the stabilizer group")
        prod = stab.product(sol.mask)
        diff = (g.phase - prod.phase) % 4
        if diff not in (0, 2):
            raise NumericalError(f"gauge term {g} differs from a stabilizer product by i")
        out.append((r_i, 1 - diff, sol.mask))
    return out


def _commuting_energies(code: CodeSpec) -> np.ndarray:
    """Single sector energy for each raw syndrome index."""
    r = stabilizer_group(code).rank
    check_syndrome_count(r)
    idx = np.arange(1 << r, dtype=np.int64)
    energy = np.zeros(1 << r)
    for r_i, sign, mask in _term_expansions(code):
        parity = np.bitwise_count(idx & mask) & 1
        energy += r_i * sign * (1 - 2 * parity.astype(float))
    return energy


@lru_cache(maxsize=16)
def _raw_frame(code: CodeSpec) -> dict:
    """Orthonormal basis of each raw sector, keyed by raw syndrome index.

    One diagonalisation of ``sum_i 2**(i-r) S_i`` separates all sectors: the
    eigenvalue of sector ``s`` is ``(2**r - 1 - 2*index(s)) / 2**r``.
    """
    n = code.n
    check_dense(n, what="sector frame")
    gens = stabilizer_generators(code)
    r = len(gens)
    check_syndrome_count(r)
    dim = 1 << n
    if r == 0:
        return {0: np.eye(dim, dtype=complex)}
    scale = float(1 << r)
    M = pauli_sum_matrix([(2.0**i / scale, g.hermitian_form() if not g.is_hermitian else g)
                          for i, g in enumerate(gens)], n)
    w, V = np.linalg.eigh(M)
    raw = ((scale - 1.0) - w * scale) / 2.0
    index = np.rint(raw).astype(np.int64)
    if np.max(np.abs(raw - index)) > 1e-6:
        raise NumericalError("stabilizer eigenvalues did not separate into sectors")
    frame = {}
    expected = dim >> r
    for s in range(1 << r):
        cols = np.flatnonzero(index == s)
        if len(cols) != expected:
            raise NumericalError(
                f"sector {Syndrome.from_index(s, r)} has dimension {len(cols)}, expected {expected}"
            )
        frame[s] = V[:, cols]
    return frame


@lru_cache(maxsize=16)
def _sector_spectra(code: CodeSpec, method: str) -> SectorSpectrum:
    gens = stabilizer_generators(code)
    r = len(gens)
    check_syndrome_count(r)
    tol = 1e-9 * energy_scale(code)
    abelian = gauge_group(code).is_abelian
    if method == "auto":
        method = "commuting" if abelian else "dense"
    raw_levels: dict[int, tuple[tuple[float, int], ...]] = {}
    if method == "commuting":
        if not abelian:
            raise InputError("commuting-combinatorial path needs an Abelian gauge group")
        mult = 1 << (code.n - r)
        for s, e in enumerate(_commuting_energies(code)):
            raw_levels[s] = ((float(e), mult),)
    elif method == "dense":
        H = hamiltonian(code)
        for s, V in _raw_frame(code).items():
            block = V.conj().T @ H @ V
            raw_levels[s] = cluster_levels(np.linalg.eigvalsh(block), tol)
    else:
        raise InputError(f"unknown spectrum method {method!r}")

    minima = {s: lv[0][0] for s, lv in raw_levels.items()}
    e0 = min(minima.values())
    ground = [s for s, e in minima.items() if e - e0 <= tol]
    if len(ground) > 1:
        names = ", ".join(str(Syndrome.from_index(s, r)) for s in ground)
        raise AmbiguousGroundError(f"ground energy {e0:.12g} reached in sectors {names}")
    g = ground[0]
    g_syn = Syndrome.from_index(g, r)
    oriented = tuple(
        PauliOperator(x.n, x.x, x.z, x.phase + 2 * b) for x, b in zip(gens, g_syn.bits)
    )
    levels = {Syndrome.from_index(s ^ g, r): lv for s, lv in raw_levels.items()}
    distinct = cluster_levels(
        [e for lv in raw_levels.values() for e, _ in lv], tol
    )
    gap = distinct[1][0] - distinct[0][0] if len(distinct) > 1 else 0.0
    return SectorSpectrum(
        code.n, r, dict(sorted(levels.items())), g_syn, float(e0), float(gap), method, oriented
    )


def sector_spectra(code: CodeSpec, method: str = "auto") -> SectorSpectrum:
    """Block spectrum of ``H`` with the ground sector relabelled to zero.

    ``method`` is ``"dense"`` (diagonalise each sector block), ``"commuting"``
    (closed form for Abelian gauge groups) or ``"auto"``.
    """
    if method == "dense" or (method == "auto" and not gauge_group(code).is_abelian):
        # the cache must not hide the size cap
        check_dense(code.n, what="sector frame")
    return _sector_spectra(code, method)


def oriented_generators(code: CodeSpec) -> tuple[PauliOperator, ...]:
    return sector_spectra(code).generators


def sector_basis(code: CodeSpec) -> dict[Syndrome, np.ndarray]:
    """Isometry onto each relabelled sector."""
    check_dense(code.n, what="sector frame")
    spec = sector_spectra(code)
    g = spec.ground_sector.index
    r = spec.r
    return {Syndrome.from_index(s ^ g, r): V for s, V in _raw_frame(code).items()}


def sector_projector(code: CodeSpec, s: Syndrome, method: str = "basis", decoder=None) -> np.ndarray:
    """Dense projector ``P_s``.

    ``"basis"`` uses the sector isometry, ``"expansion"`` sums
    ``2**-r sum_Q sigma_s(Q) Q`` over all stabilizer elements, and
    ``"conjugation"`` forms ``C P_0 C^dag`` with the decoder's correction.
    """
    r = stabilizer_group(code).rank
    if s.r != r:
        raise InputError(f"syndrome has {s.r} bits, code has rank(S) = {r}")
    if method == "basis":
        V = sector_basis(code)[s]
        return V @ V.conj().T
    if method == "expansion":
        if r > EXPANSION_LIMIT:
            raise SizeLimitError(f"stabilizer expansion over 2^{r} elements refused")
        check_dense(code.n, what="sector projector")
        gens = oriented_generators(code)
        terms = []
        for a in range(1 << r):
            Q = PauliOperator.identity(code.n)
            for i, g in enumerate(gens):
                if (a >> i) & 1:
                    Q = Q * g
            sigma = -1.0 if bin(a & s.index).count("1") % 2 else 1.0
            terms.append((sigma / (1 << r), Q))
        return pauli_sum_matrix(terms, code.n)
    if method == "conjugation":
        if decoder is None:
            raise InputError("conjugation method needs a decoder")
        C = pauli_to_matrix(decoder.correction(s))
        P0 = sector_projector(code, Syndrome.zero(r))
        return C @ P0 @ C.conj().T
    raise InputError(f"unknown projector method {method!r}")


def ground_projector(code: CodeSpec, H: np.ndarray | None = None) -> np.ndarray:
    """Projector onto the lowest eigenspace of ``H``."""
    H = hamiltonian(code) if H is None else H
    w, V = np.linalg.eigh(H)
    tol = 1e-9 * energy_scale(code)
    cols = w - w[0] <= tol
    return V[:, cols] @ V[:, cols].conj().T
