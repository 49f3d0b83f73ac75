"""Exact n-qubit Pauli arithmetic in the binary symplectic representation.

A :class:`PauliOperator` stores the X- and Z-parts as integer bitmasks (bit
``j`` is qubit ``j``) together with a phase exponent ``p`` so that the
operator equals ``i**p * prod_j X_j**x_j Z_j**z_j`` with the X factor to the
left of the Z factor on every qubit.  Under this convention ``Y = iXZ`` is
stored as ``x=z=1`` with a phase contribution of one.

Dense matrices use qubit 0 as the leftmost tensor factor.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PauliSyntaxError, SizeLimitError

DEFAULT_DENSE_LIMIT = 12

_TOKEN = re.compile(r"^([XYZ])(\d+)$")
_SIGNS = {"+": 0, "+1": 0, "i": 1, "+i": 1, "-": 2, "-1": 2, "-i": 3}
_SIGN_TEXT = {0: "", 1: "i", 2: "-", 3: "-i"}
# letter rank used for tie-breaking: X < Y < Z
_LETTER_RANK = {(1, 0): 1, (1, 1): 2, (0, 1): 3}


def dense_limit() -> int:
    """Current cap on the qubit count of dense matrices.

    Reads ``QMEM_DENSE_LIMIT`` on every call so tests and the CLI can
    override it without reloading modules.
    """
    raw = os.environ.get("QMEM_DENSE_LIMIT")
    if raw is None or raw.strip() == "":
        return DEFAULT_DENSE_LIMIT
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"QMEM_DENSE_LIMIT must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InputError(f"QMEM_DENSE_LIMIT must be positive, got {value}")
    return value


def check_dense(n: int, limit: int | None = None, what: str = "dense matrix") -> None:
    limit = dense_limit() if limit is None else limit
    if n > limit:
        raise SizeLimitError(
            f"{what} on {n} qubits exceeds the dense limit of {limit} qubits "
            "(set QMEM_DENSE_LIMIT to override)"
        )


@dataclass(frozen=True)
class PauliOperator:
    """Immutable n-qubit Pauli operator ``i**phase * X^x Z^z``."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"qubit count must be positive, got {self.n}")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise InputError(f"bitmask wider than {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def from_bits(cls, n: int, x: int, z: int) -> PauliOperator:
        """Hermitian operator with coefficient +1 in front of its letter string."""
        return cls(n, x, z, (x & z).bit_count())

    @classmethod
    def from_symplectic(cls, n: int, vec: int) -> PauliOperator:
        full = (1 << n) - 1
        return cls.from_bits(n, vec & full, vec >> n)

    @property
    def symplectic(self) -> int:
        """The (x|z) vector packed as ``x | z << n``."""
        return self.x | (self.z << self.n)

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> j) & 1 for j in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> j) & 1 for j in range(self.n))

    @property
    def support(self) -> tuple[int, ...]:
        s = self.x | self.z
        return tuple(j for j in range(self.n) if (s >> j) & 1)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def num_y(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return (self.phase - self.num_y) % 2 == 0

    def letter(self, j: int) -> str:
        return "IXZY"[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)]

    def letters(self) -> str:
        """Letter string over all qubits, e.g. ``'XIZY'``."""
        return "".join(self.letter(j) for j in range(self.n))

    def sort_key(self) -> tuple:
        """Ordering key (weight, qubit sequence, letters with X<Y<Z)."""
        sup = self.support
        ranks = tuple(
            _LETTER_RANK[((self.x >> j) & 1, (self.z >> j) & 1)] for j in sup
        )
        return (len(sup), sup, ranks)

    def equal_up_to_phase(self, other: PauliOperator) -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def hermitian_form(self) -> PauliOperator:
        """Same symplectic part with the +1 letter-string phase."""
        return PauliOperator.from_bits(self.n, self.x, self.z)

    def dagger(self) -> PauliOperator:
        # (X^x Z^z)^dag = Z^z X^x = (-1)^{x.z} X^x Z^z
        return PauliOperator(self.n, self.x, self.z, -self.phase + 2 * self.num_y)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return pauli_multiply(self, other)

    def commutes(self, other: PauliOperator) -> bool:
        return pauli_commutes(self, other)

    def to_matrix(self, limit: int | None = None) -> np.ndarray:
        return pauli_to_matrix(self, limit)

    def __str__(self) -> str:
        coeff = _SIGN_TEXT[(self.phase - self.num_y) % 4]
        body = " ".join(f"{self.letter(j)}{j}" for j in self.support) or "I"
        return f"{coeff} {body}" if coeff else body


def pauli_from_string(text: str | list[str] | tuple[str, ...], n: int) -> PauliOperator:
    """Parse tokens such as ``"X0 Z3 Y7"`` into a :class:`PauliOperator`.

    An empty string or a lone ``I`` is the identity.  A leading sign token
    (``-``, ``i``, ``-i``) is accepted so that ``str(P)`` round-trips.
    """
    tokens = text.split() if isinstance(text, str) else list(text)
    phase = 0
    if tokens and tokens[0] in _SIGNS:
        phase = _SIGNS[tokens[0]]
        tokens = tokens[1:]
        offset = 2
    else:
        offset = 1
    if tokens == ["I"]:
        tokens = []
    x = z = 0
    seen: set[int] = set()
    for pos, tok in enumerate(tokens, start=offset):
        m = _TOKEN.match(tok)
        if m is None:
            raise PauliSyntaxError(f"malformed Pauli token {tok!r}", pos)
        letter, idx = m.group(1), int(m.group(2))
        if idx >= n:
            raise PauliSyntaxError(f"qubit index {idx} out of range for n={n}", pos)
        if idx in seen:
            raise PauliSyntaxError(f"qubit index {idx} repeated", pos)
        seen.add(idx)
        if letter in "XY":
            x |= 1 << idx
        if letter in "ZY":
            z |= 1 << idx
        if letter == "Y":
            phase += 1
    return PauliOperator(n, x, z, phase)


def _check_same_n(P: PauliOperator, Q: PauliOperator) -> None:
    if P.n != Q.n:
        raise InputError(f"qubit counts differ: {P.n} vs {Q.n}")


def pauli_multiply(P: PauliOperator, Q: PauliOperator) -> PauliOperator:
    """Exact product ``P Q`` including the phase."""
    _check_same_n(P, Q)
    # moving Z^{z_P} past X^{x_Q} costs (-1)^{z_P . x_Q}
    swap = (P.z & Q.x).bit_count()
    return PauliOperator(P.n, P.x ^ Q.x, P.z ^ Q.z, P.phase + Q.phase + 2 * swap)


def symplectic_product(n: int, u: int, v: int) -> int:
    """Symplectic form of two packed (x|z) vectors over GF(2)."""
    full = (1 << n) - 1
    return (((u & full) & (v >> n)) ^ ((u >> n) & (v & full))).bit_count() & 1


def pauli_commutes(P: PauliOperator, Q: PauliOperator) -> bool:
    _check_same_n(P, Q)
    return ((P.x & Q.z).bit_count() + (P.z & Q.x).bit_count()) % 2 == 0


def pauli_weight(P: PauliOperator) -> int:
    return P.weight


def _reverse_bits(mask: int, n: int) -> int:
    # qubit j is bit (n-1-j) of a computational-basis index
    return int(format(mask, f"0{n}b")[::-1], 2) if n else 0


def pauli_columns(P: PauliOperator) -> tuple[np.ndarray, np.ndarray]:
    """Monomial structure of the dense matrix: ``M[rows[b], b] = values[b]``."""
    dim = 1 << P.n
    b = np.arange(dim, dtype=np.int64)
    xm = _reverse_bits(P.x, P.n)
    zm = _reverse_bits(P.z, P.n)
    sign = 1 - 2 * (np.bitwise_count(b & zm) & 1).astype(np.int64)
    values = (1j**P.phase) * sign
    return b ^ xm, values.astype(complex)


def pauli_to_matrix(P: PauliOperator, limit: int | None = None) -> np.ndarray:
    """Dense ``2**n x 2**n`` complex matrix of ``P``."""
    check_dense(P.n, limit, "Pauli matrix")
    dim = 1 << P.n
    rows, values = pauli_columns(P)
    M = np.zeros((dim, dim), dtype=complex)
    M[rows, np.arange(dim)] = values
    return M


def pauli_sum_matrix(terms, n: int, limit: int | None = None) -> np.ndarray:
    """Dense matrix of ``sum_i c_i P_i`` for ``(c_i, P_i)`` pairs."""
    check_dense(n, limit, "operator sum")
    dim = 1 << n
    M = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for coeff, P in terms:
        rows, values = pauli_columns(P)
        M[rows, cols] += coeff * values
    return M


def single_qubit(letter: str, j: int, n: int) -> PauliOperator:
    return pauli_from_string(f"{letter}{j}", n)
