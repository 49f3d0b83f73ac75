"""Syndromes, lookup decoding and error-corrected logical operators.

The decoder assigns to every syndrome the minimum-weight Pauli producing
it.  A syndrome ``s`` is *good* for an error set ``E`` when every
``C(s + s_E) E C(s)`` lies in the gauge group, i.e. one further elementary
error on top of a corrected state is still decoded correctly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .codespec import CodeSpec, designated_logicals, gauge_group
from .errors import InputError, LogicalError, SizeLimitError
from .pauli import PauliOperator, check_dense, pauli_to_matrix
from .sectors import (
    SYNDROME_LIMIT,
    Syndrome,
    all_syndromes,
    check_syndrome_count,
    sector_basis,
    sector_projector,
    stabilizer_generators,
    syndrome_bits,
)

__all__ = [
    "Syndrome",
    "DecoderTable",
    "SyndromeClassification",
    "ECLogicals",
    "syndrome_of",
    "single_qubit_errors",
    "build_decoder",
    "is_correctable",
    "classify_syndromes",
    "ec_signs",
    "sector_projector",
    "ec_logical_matrix",
    "phi_ec",
    "ec_logicals",
]

ENUMERATION_BUDGET = 20_000_000
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def syndrome_of(code: CodeSpec, E: PauliOperator) -> Syndrome:
    """Bit ``i`` is set iff ``E`` anticommutes with stabilizer generator ``i``."""
    if E.n != code.n:
        raise InputError(f"error acts on {E.n} qubits, code has {code.n}")
    return syndrome_bits(stabilizer_generators(code), E)


def single_qubit_errors(n: int, letters: str = "XYZ") -> tuple[PauliOperator, ...]:
    """All single-qubit Paulis with the given letters, qubit-major order."""
    out = []
    for j in range(n):
        for a in letters:
            bx, bz = _LETTER_BITS[a]
            out.append(PauliOperator.from_bits(n, bx << j, bz << j))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class DecoderTable:
    """Minimum-weight correction for every syndrome.

    ``corrections[i]`` is ``C(s)`` for the syndrome with index ``i``.
    ``max_weight`` is the largest correction weight and ``examined`` counts
    the candidate Paulis visited before the table filled.
    """

    n: int
    r: int
    corrections: tuple[PauliOperator, ...]
    max_weight: int
    examined: int

    def correction(self, s: Syndrome) -> PauliOperator:
        if s.r != self.r:
            raise InputError(f"syndrome has {s.r} bits, decoder expects {self.r}")
        return self.corrections[s.index]

    __getitem__ = correction

    def syndromes(self) -> list[Syndrome]:
        return all_syndromes(self.r)

    def as_records(self) -> list[dict]:
        return [
            {"bits": str(Syndrome.from_index(i, self.r)), "correction": str(c), "weight": c.weight}
            for i, c in enumerate(self.corrections)
        ]


def _decode_table(n: int, gens, limit: int, budget: int) -> DecoderTable:
    r = len(gens)
    check_syndrome_count(r, limit)
    size = 1 << r
    # syndrome index of each single-qubit letter, X < Y < Z
    single = []
    for j in range(n):
        row = []
        for a in "XYZ":
            bx, bz = _LETTER_BITS[a]
            row.append(syndrome_bits(gens, PauliOperator(n, bx << j, bz << j)).index)
        single.append(row)
    table: list[tuple[int, ...] | None] = [None] * size
    table[0] = ()
    filled = 1
    examined = 1
    max_weight = 0
    w = 0
    while filled < size:
        w += 1
        if w > n:
            raise InputError(f"{size - filled} syndromes are not reachable by any Pauli")
        for qubits in combinations(range(n), w):
            rows = [single[j] for j in qubits]
            for choice in product(range(3), repeat=w):
                examined += 1
                if examined > budget:
                    raise SizeLimitError(
                        f"decoder enumeration exceeded {budget} candidates at weight {w}"
                    )
                s = 0
                for row, c in zip(rows, choice):
                    s ^= row[c]
                if table[s] is None:
                    table[s] = tuple(zip(qubits, choice))
                    filled += 1
                    max_weight = w
            if filled == size:
                break
    corrections = []
    for entry in table:
        x = z = 0
        for j, c in entry:
            bx, bz = _LETTER_BITS["XYZ"[c]]
            x |= bx << j
            z |= bz << j
        corrections.append(PauliOperator.from_bits(n, x, z))
    return DecoderTable(n, r, tuple(corrections), max_weight, examined)


@lru_cache(maxsize=32)
def _cached_decoder(code: CodeSpec, limit: int, budget: int) -> DecoderTable:
    return _decode_table(code.n, stabilizer_generators(code), limit, budget)


def build_decoder(
    code: CodeSpec, limit: int = SYNDROME_LIMIT, budget: int = ENUMERATION_BUDGET
) -> DecoderTable:
    """Lookup decoder by enumeration in order of weight, qubits, letters."""
    return _cached_decoder(code, limit, budget)


def _in_gauge(code: CodeSpec, P: PauliOperator, phase_mode: str) -> bool:
    sol = gauge_group(code).solve(P)
    if sol is None:
        return False
    if phase_mode == "track-phases":
        return sol.residual_phase in gauge_group(code).phase_subgroup
    return True


def is_correctable(code: CodeSpec, decoder: DecoderTable, E: PauliOperator) -> bool:
    """True iff ``E C(s_E)`` lies in the gauge group up to phase."""
    C = decoder.correction(syndrome_of(code, E))
    return _in_gauge(code, E * C, "mod-phases")


@dataclass(frozen=True)
class SyndromeClassification:
    good: dict
    errors: tuple[PauliOperator, ...]
    phase_mode: str = "mod-phases"

    @property
    def r(self) -> int:
        return next(iter(self.good)).r

    def good_syndromes(self) -> list[Syndrome]:
        return [s for s, g in self.good.items() if g]

    def bad_syndromes(self) -> list[Syndrome]:
        return [s for s, g in self.good.items() if not g]

    @property
    def count_good(self) -> int:
        return sum(self.good.values())

    @property
    def count_bad(self) -> int:
        return len(self.good) - self.count_good


def classify_syndromes(
    code: CodeSpec,
    decoder: DecoderTable,
    errors=None,
    phase_mode: str = "mod-phases",
) -> SyndromeClassification:
    """Mark ``s`` good iff ``C(s + s_E) E C(s)`` is a gauge element for all ``E``."""
    errors = tuple(single_qubit_errors(code.n) if errors is None else errors)
    if not errors:
        raise InputError("elementary error set is empty")
    shifts = [(E, syndrome_of(code, E)) for E in errors]
    good = {}
    for s in all_syndromes(decoder.r):
        C = decoder.correction(s)
        good[s] = all(
            _in_gauge(code, decoder.correction(s + sE) * E * C, phase_mode)
            for E, sE in shifts
        )
    return SyndromeClassification(good, errors, phase_mode)


def _check_logical(code: CodeSpec, logical: PauliOperator) -> None:
    if logical.n != code.n:
        raise InputError(f"logical acts on {logical.n} qubits, code has {code.n}")
    for g in code.generators:
        if not logical.commutes(g):
            raise LogicalError(f"{logical} anticommutes with gauge generator {g}")


def ec_signs(code: CodeSpec, decoder: DecoderTable, logical: PauliOperator) -> dict:
    """``lambda(s) = +1`` if ``C(s)`` commutes with the logical, else ``-1``."""
    _check_logical(code, logical)
    return {
        s: 1 if decoder.correction(s).commutes(logical) else -1
        for s in all_syndromes(decoder.r)
    }


def sign_operator(code: CodeSpec, signs: dict) -> np.ndarray:
    """``D = sum_s signs[s] P_s`` built from the sector isometries."""
    check_dense(code.n, what="sign operator")
    dim = 1 << code.n
    D = np.zeros((dim, dim), dtype=complex)
    for s, V in sector_basis(code).items():
        if signs[s] == 1:
            D += V @ V.conj().T
        else:
            D -= V @ V.conj().T
    return D


def ec_logical_matrix(code: CodeSpec, decoder: DecoderTable, logical: PauliOperator) -> np.ndarray:
    """Dense ``L_ec = L D`` with ``D = sum_s lambda(s) P_s``."""
    D = sign_operator(code, ec_signs(code, decoder, logical))
    return pauli_to_matrix(logical) @ D


def phi_ec(code: CodeSpec, decoder: DecoderTable, O: np.ndarray) -> np.ndarray:
    """Error-correcting map on observables: ``sum_s P_s C(s)^dag O C(s) P_s``."""
    check_dense(code.n, what="error-correcting map")
    out = np.zeros_like(O, dtype=complex)
    for s, V in sector_basis(code).items():
        C = pauli_to_matrix(decoder.correction(s))
        P = V @ V.conj().T
        out += P @ C.conj().T @ O @ C @ P
    return out


@dataclass(frozen=True, eq=False)
class ECLogicals:
    """Dense error-corrected logicals ``X_ec``, ``Y_ec = i X_ec Z_ec``, ``Z_ec``."""

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    xbar: PauliOperator
    zbar: PauliOperator
    lambda_x: dict = field(repr=False)
    lambda_z: dict = field(repr=False)

    def as_tuple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.X, self.Y, self.Z


def ec_logicals(code: CodeSpec, decoder: DecoderTable | None = None, pair=None) -> ECLogicals:
    decoder = build_decoder(code) if decoder is None else decoder
    pair = designated_logicals(code) if pair is None else pair
    lx = ec_signs(code, decoder, pair.xbar)
    lz = ec_signs(code, decoder, pair.zbar)
    X = pauli_to_matrix(pair.xbar) @ sign_operator(code, lx)
    Z = pauli_to_matrix(pair.zbar) @ sign_operator(code, lz)
    Y = 1j * X @ Z
    return ECLogicals(X, Y, Z, pair.xbar, pair.zbar, lx, lz)


def good_projector(code: CodeSpec, classification: SyndromeClassification) -> np.ndarray:
    """``P = sum over good s of P_s``."""
    check_dense(code.n, what="good-syndrome projector")
    dim = 1 << code.n
    P = np.zeros((dim, dim), dtype=complex)
    for s, V in sector_basis(code).items():
        if classification.good[s]:
            P += V @ V.conj().T
    return P
