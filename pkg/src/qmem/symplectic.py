"""GF(2) linear algebra on Pauli groups.

Groups are handled through their symplectic images: an n-qubit Pauli maps to
the packed vector ``x | z << n`` and group products become XORs.  A
:class:`GroupBasis` keeps a fully reduced echelon form whose rows are actual
group elements, so membership queries can also reconstruct the phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, LogicalError
from .pauli import PauliOperator, symplectic_product

PHASE_MODES = ("mod-phases", "track-phases")
MAX_COSET = 1 << 20
MAX_GREEDY_SPAN = 1 << 16


def _swap_halves(vec: int, n: int) -> int:
    full = (1 << n) - 1
    return (vec >> n) | ((vec & full) << n)


def _lowest_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def rref(vectors: Iterable[int]) -> list[tuple[int, int]]:
    """Reduced row echelon form of GF(2) row vectors as ``(pivot, row)`` pairs."""
    rows: list[tuple[int, int]] = []
    for v in vectors:
        for piv, r in rows:
            if (v >> piv) & 1:
                v ^= r
        if v == 0:
            continue
        piv = _lowest_bit(v)
        rows = [(p, r ^ v) if (r >> piv) & 1 else (p, r) for p, r in rows]
        rows.append((piv, v))
    return rows


def nullspace(vectors: Sequence[int], ncols: int) -> list[int]:
    """Basis of ``{v : <v, c> = 0 for every c in vectors}`` over ``ncols`` bits."""
    echelon = rref(vectors)
    pivots = {p for p, _ in echelon}
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = 1 << f
        for p, r in echelon:
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def gf2_rank(vectors: Iterable[int]) -> int:
    return len(rref(vectors))


def span_elements(vectors: Sequence[int]) -> list[int]:
    """All ``2**len(vectors)`` XOR combinations, element ``a`` uses bits of ``a``."""
    out = [0]
    for v in vectors:
        out += [u ^ v for u in out]
    return out


def _phase_closure(exponents: Iterable[int]) -> frozenset[int]:
    exps = {e % 4 for e in exponents}
    if any(e % 2 for e in exps):
        return frozenset({0, 1, 2, 3})
    if 2 in exps:
        return frozenset({0, 2})
    return frozenset({0})


@dataclass(frozen=True)
class Solution:
    """Result of expressing a Pauli through a basis.

    ``mask`` selects the rows whose product equals the queried operator up to
    phase; ``residual_phase`` is the exponent ``c`` such that the query times
    the inverse of that product is ``i**c * I``.
    """

    mask: int
    residual_phase: int


class GroupBasis:
    """Independent generating set of a Pauli group with a solver.

    ``rows`` are the independent generators in input order (dependent inputs
    are dropped).  The private echelon rows are products of ``rows`` with
    exactly tracked phases; ``phase_subgroup`` holds the exponents ``c`` with
    ``i**c * I`` inside the group.
    """

    def __init__(self, n: int, phase_mode: str = "mod-phases"):
        if phase_mode not in PHASE_MODES:
            raise InputError(f"unknown phase mode {phase_mode!r}")
        self.n = n
        self.phase_mode = phase_mode
        self._rows: list[PauliOperator] = []
        self._echelon: list[tuple[int, PauliOperator, int]] = []
        self._phase_gens: set[int] = set()

    @property
    def rows(self) -> tuple[PauliOperator, ...]:
        return tuple(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def vectors(self) -> list[int]:
        return [r.symplectic for r in self._rows]

    @property
    def phase_subgroup(self) -> frozenset[int]:
        return _phase_closure(self._phase_gens)

    @property
    def is_abelian(self) -> bool:
        rows = self._rows
        return all(
            rows[i].commutes(rows[j]) for i in range(len(rows)) for j in range(i)
        )

    def _reduce(self, P: PauliOperator) -> tuple[PauliOperator, int]:
        op, mask = P, 0
        for piv, e_op, e_mask in self._echelon:
            if (op.symplectic >> piv) & 1:
                op = op * e_op
                mask ^= e_mask
        return op, mask

    def _add(self, g: PauliOperator) -> bool:
        if g.n != self.n:
            raise InputError(f"generator {g} acts on {g.n} qubits, expected {self.n}")
        op, mask = self._reduce(g)
        if op.symplectic == 0:
            self._phase_gens.add(op.phase)
            return False
        for r in self._rows:
            if not r.commutes(g):
                self._phase_gens.add(2)
        self._phase_gens.add((g * g).phase)
        mask ^= 1 << len(self._rows)
        self._rows.append(g)
        piv = _lowest_bit(op.symplectic)
        self._echelon = [
            (p, e_op * op, e_mask ^ mask) if (e_op.symplectic >> piv) & 1 else (p, e_op, e_mask)
            for p, e_op, e_mask in self._echelon
        ]
        self._echelon.append((piv, op, mask))
        return True

    def solve(self, P: PauliOperator) -> Solution | None:
        """Express ``P`` through ``rows``; None when outside the span."""
        if P.n != self.n:
            raise InputError(f"operator on {P.n} qubits, basis on {self.n}")
        op, mask = self._reduce(P)
        if op.symplectic != 0:
            return None
        return Solution(mask, op.phase)

    def contains_vector(self, vec: int) -> bool:
        for piv, e_op, _ in self._echelon:
            if (vec >> piv) & 1:
                vec ^= e_op.symplectic
        return vec == 0

    def product(self, mask: int) -> PauliOperator:
        """Ordered product of the rows selected by ``mask``."""
        out = PauliOperator.identity(self.n)
        for i, r in enumerate(self._rows):
            if (mask >> i) & 1:
                out = out * r
        return out

    def __repr__(self) -> str:
        return f"GroupBasis(n={self.n}, rank={self.rank}, rows=[{', '.join(map(str, self._rows))}])"


@dataclass(frozen=True)
class LogicalPair:
    xbar: PauliOperator
    zbar: PauliOperator

    @property
    def ybar(self) -> PauliOperator:
        """``i * xbar * zbar``."""
        p = self.xbar * self.zbar
        return PauliOperator(p.n, p.x, p.z, p.phase + 1)


def group_basis(
    generators: Iterable[PauliOperator],
    phase_mode: str = "mod-phases",
    n: int | None = None,
) -> GroupBasis:
    """Greedy independent basis of the group generated by ``generators``."""
    generators = list(generators)
    if n is None:
        if not generators:
            raise InputError("qubit count required for an empty generator list")
        n = generators[0].n
    basis = GroupBasis(n, phase_mode)
    for g in generators:
        basis._add(g)
    return basis


def group_contains(basis: GroupBasis, P: PauliOperator) -> bool:
    """Membership of ``P``; exact in phase when the basis tracks phases."""
    sol = basis.solve(P)
    if sol is None:
        return False
    if basis.phase_mode == "track-phases":
        return sol.residual_phase in basis.phase_subgroup
    return True


def centralizer_basis(basis: GroupBasis) -> GroupBasis:
    """All Paulis (up to phase) commuting with every row of ``basis``."""
    n = basis.n
    constraints = [_swap_halves(v, n) for v in basis.vectors]
    null = nullspace(constraints, 2 * n)
    return group_basis(
        (PauliOperator.from_symplectic(n, v) for v in null), basis.phase_mode, n=n
    )


def _min_weight_basis(n: int, vectors: list[int]) -> list[int]:
    elems = [v for v in span_elements(vectors) if v]

    # weight first, then the most compact support, then the usual lexicographic key
    def key(v: int):
        P = PauliOperator.from_symplectic(n, v)
        sup = P.support
        return (len(sup), sup[-1] - sup[0], P.sort_key())

    elems.sort(key=key)
    chosen: list[int] = []
    for v in elems:
        if gf2_rank(chosen + [v]) > len(chosen):
            chosen.append(v)
        if len(chosen) == len(vectors):
            break
    return chosen


def stabilizer_of(gauge: GroupBasis) -> GroupBasis:
    """Basis of ``G intersect C(G)``.

    For an Abelian gauge group this returns the gauge rows themselves in
    input order.  Otherwise the centre is read off the null space of the
    commutation matrix and, when small enough, replaced by a minimum-weight
    basis.
    """
    n, rows = gauge.n, gauge.rows
    m = len(rows)
    comm = []
    for i in range(m):
        bits = 0
        for j in range(m):
            if not rows[i].commutes(rows[j]):
                bits |= 1 << j
        comm.append(bits)
    null = nullspace(comm, m)
    elements = []
    for a in null:
        p = gauge.product(a)
        if not p.is_hermitian:
            p = PauliOperator(n, p.x, p.z, p.phase + 1)
        elements.append(p)
    if any(comm) and elements and len(elements) <= 16:
        vecs = _min_weight_basis(n, [e.symplectic for e in elements])
        elements = []
        for v in vecs:
            sol = gauge.solve(PauliOperator.from_symplectic(n, v))
            p = gauge.product(sol.mask)
            if not p.is_hermitian:
                p = PauliOperator(n, p.x, p.z, p.phase + 1)
            elements.append(p)
    return group_basis(elements, gauge.phase_mode, n=n)


def coset_minimum(n: int, vec: int, subgroup: Sequence[int], max_size: int = MAX_COSET) -> int:
    """Lowest-key representative of ``vec + span(subgroup)``.

    Returns ``vec`` unchanged when the coset exceeds ``max_size`` elements.
    """
    if (1 << len(subgroup)) > max_size:
        return vec
    coset = [vec ^ s for s in span_elements(list(subgroup))]
    full = (1 << n) - 1
    best_w = min(((v & full) | (v >> n)).bit_count() for v in coset)
    lightest = [v for v in coset if ((v & full) | (v >> n)).bit_count() == best_w]
    return min(lightest, key=lambda v: PauliOperator.from_symplectic(n, v).sort_key())


def _key(n: int, v: int):
    return PauliOperator.from_symplectic(n, v).sort_key()


def bare_logicals(gauge: GroupBasis, max_coset: int = MAX_COSET) -> list[LogicalPair]:
    """Symplectic basis of ``C(G)`` modulo ``S`` as logical pairs.

    Each quotient vector is replaced by its minimum-weight representative in
    its coset of ``S``.  Pairs are built by symplectic Gram-Schmidt: the
    lightest remaining vector becomes ``zbar`` and the lightest partner that
    anticommutes with it becomes ``xbar``.
    """
    n = gauge.n
    cg = centralizer_basis(gauge)
    stab = stabilizer_of(gauge)
    svecs = stab.vectors
    twice_k = cg.rank - stab.rank
    if twice_k < 0 or twice_k % 2:
        raise LogicalError(
            f"rank(C(G)) - rank(S) = {twice_k} is not a non-negative even number"
        )
    work = GroupBasis(n)
    for s in stab.rows:
        work._add(s)
    pool = []
    for r in cg.rows:
        if work._add(r):
            pool.append(r.symplectic)

    def canon(v: int) -> int:
        return coset_minimum(n, v, svecs, max_coset)

    pool = sorted((canon(v) for v in pool), key=lambda v: _key(n, v))
    pairs = []
    while pool:
        a = pool.pop(0)
        partner = next((i for i, v in enumerate(pool) if symplectic_product(n, a, v)), None)
        if partner is None:
            raise LogicalError("quotient C(G)/S is degenerate; no symplectic partner found")
        b = pool.pop(partner)
        b = min((canon(b), canon(b ^ a)), key=lambda v: _key(n, v))
        pairs.append(
            LogicalPair(PauliOperator.from_symplectic(n, b), PauliOperator.from_symplectic(n, a))
        )
        rest = []
        for v in pool:
            if symplectic_product(n, v, b):
                v ^= a
            if symplectic_product(n, v, a):
                v ^= b
            rest.append(canon(v))
        pool = sorted(rest, key=lambda v: _key(n, v))
    return pairs


def check_logical_pair(gauge: GroupBasis, pair: LogicalPair) -> None:
    """Raise :class:`LogicalError` naming the first invariant the pair breaks."""
    xbar, zbar = pair.xbar, pair.zbar
    if xbar.n != gauge.n or zbar.n != gauge.n:
        raise LogicalError("logical operator acts on the wrong number of qubits")
    if xbar.commutes(zbar):
        raise LogicalError(f"logicalX {xbar} and logicalZ {zbar} must anticommute")
    for name, op in (("logicalX", xbar), ("logicalZ", zbar)):
        for g in gauge.rows:
            if not op.commutes(g):
                raise LogicalError(f"{name} {op} anticommutes with gauge generator {g}")
        if gauge.solve(op) is not None:
            raise LogicalError(f"{name} {op} lies in the gauge group")
