"""Code definitions: the text format, validation and built-in families.

File format (UTF-8, one directive per line, ``#`` starts a comment)::

    name: repetition-3
    qubits: 3
    gauge: -1.0 Z0 Z1
    gauge: -1.0 Z1 Z2
    logicalX: X0 X1 X2
    logicalZ: Z0

Gauge terms keep file order; syndromes and couplings index by it.  The
i-th ``logicalX`` line pairs with the i-th ``logicalZ`` line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError, LogicalError, ParseError, PauliSyntaxError
from .pauli import PauliOperator, pauli_from_string
from .symplectic import (
    GroupBasis,
    LogicalPair,
    bare_logicals,
    centralizer_basis,
    check_logical_pair,
    group_basis,
    stabilizer_of,
)

FAMILIES = ("repetition", "ising1d", "ising2d", "toric2d", "surface2d", "baconshor2d")


@dataclass(frozen=True)
class CodeSpec:
    """Parsed code: qubit count, weighted gauge generators and optional logicals."""

    n: int
    gauge_terms: tuple[tuple[float, PauliOperator], ...]
    declared_logicals: tuple[LogicalPair, ...] = ()
    name: str = ""
    designated_pair: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"qubit count must be positive, got {self.n}")
        object.__setattr__(self, "gauge_terms", tuple((float(r), g) for r, g in self.gauge_terms))
        object.__setattr__(self, "declared_logicals", tuple(self.declared_logicals))
        for i, (r, g) in enumerate(self.gauge_terms):
            if g.n != self.n:
                raise InputError(f"gauge term {i} acts on {g.n} qubits, code has {self.n}")
            if not math.isfinite(r) or r == 0.0:
                raise InputError(f"gauge term {i} has invalid coupling {r!r}")
        if self.designated_pair < 0:
            raise InputError("designated_pair must be non-negative")

    @property
    def couplings(self) -> tuple[float, ...]:
        return tuple(r for r, _ in self.gauge_terms)

    @property
    def generators(self) -> tuple[PauliOperator, ...]:
        return tuple(g for _, g in self.gauge_terms)


# -- parsing -----------------------------------------------------------------


def _pauli(tokens: str, n: int, lineno: int) -> PauliOperator:
    try:
        return pauli_from_string(tokens, n)
    except PauliSyntaxError as exc:
        raise ParseError(str(exc), lineno) from exc


def parse_code(text: str) -> CodeSpec:
    """Parse the line format into a validated :class:`CodeSpec`."""
    n = None
    name = ""
    terms: list[tuple[float, PauliOperator]] = []
    xs: list[tuple[int, PauliOperator]] = []
    zs: list[tuple[int, PauliOperator]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key, rest = key.strip(), rest.strip()
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno)
        if key == "qubits":
            if n is not None:
                raise ParseError("qubits declared twice", lineno)
            try:
                n = int(rest)
            except ValueError:
                raise ParseError(f"qubit count must be an integer, got {rest!r}", lineno) from None
            if n < 1:
                raise ParseError(f"qubit count must be positive, got {n}", lineno)
            continue
        if key == "name":
            name = rest
            continue
        if key not in ("gauge", "logicalX", "logicalZ"):
            raise ParseError(f"unknown directive {key!r}", lineno)
        if n is None:
            raise ParseError(f"'{key}' before 'qubits'", lineno)
        if key == "gauge":
            head, _, tokens = rest.partition(" ")
            try:
                coupling = float(head)
            except ValueError:
                raise ParseError(f"coupling must be a number, got {head!r}", lineno) from None
            if not math.isfinite(coupling) or coupling == 0.0:
                raise ParseError(f"coupling must be finite and nonzero, got {head}", lineno)
            terms.append((coupling, _pauli(tokens, n, lineno)))
        elif key == "logicalX":
            xs.append((lineno, _pauli(rest, n, lineno)))
        else:
            zs.append((lineno, _pauli(rest, n, lineno)))
    if n is None:
        raise ParseError("missing 'qubits' directive")
    if len(xs) != len(zs):
        raise ParseError(
            f"{len(xs)} logicalX lines but {len(zs)} logicalZ lines",
            (xs or zs)[-1][0],
        )
    pairs = tuple(LogicalPair(x, z) for (_, x), (_, z) in zip(xs, zs))
    spec = CodeSpec(n, tuple(terms), pairs, name)
    gauge = gauge_group(spec)
    for (lx, _), (lz, _), pair in zip(xs, zs, pairs):
        try:
            check_logical_pair(gauge, pair)
        except LogicalError as exc:
            raise ParseError(f"declared logical pair invalid: {exc}", max(lx, lz)) from exc
    return spec


def _tokens(P: PauliOperator) -> str:
    if not P.is_hermitian or (P.phase - P.num_y) % 4:
        raise InputError(f"{P} has a non-unit coefficient and cannot be written as tokens")
    return " ".join(f"{P.letter(j)}{j}" for j in P.support) or "I"


def format_code(spec: CodeSpec) -> str:
    """Inverse of :func:`parse_code`."""
    lines = []
    if spec.name:
        lines.append(f"name: {spec.name}")
    lines.append(f"qubits: {spec.n}")
    for r, g in spec.gauge_terms:
        lines.append(f"gauge: {r!r} {_tokens(g)}")
    for pair in spec.declared_logicals:
        lines.append(f"logicalX: {_tokens(pair.xbar)}")
        lines.append(f"logicalZ: {_tokens(pair.zbar)}")
    return "\n".join(lines) + "\n"


# -- derived group data (cached per spec) -------------------------------------


@lru_cache(maxsize=64)
def gauge_group(spec: CodeSpec) -> GroupBasis:
    return group_basis(spec.generators, "track-phases", n=spec.n)


@lru_cache(maxsize=64)
def stabilizer_group(spec: CodeSpec) -> GroupBasis:
    return stabilizer_of(gauge_group(spec))


@lru_cache(maxsize=64)
def centralizer_group(spec: CodeSpec) -> GroupBasis:
    return centralizer_basis(gauge_group(spec))


@lru_cache(maxsize=64)
def logical_pairs(spec: CodeSpec) -> tuple[LogicalPair, ...]:
    if spec.declared_logicals:
        return spec.declared_logicals
    return tuple(bare_logicals(gauge_group(spec)))


def designated_logicals(spec: CodeSpec) -> LogicalPair:
    pairs = logical_pairs(spec)
    if not pairs:
        raise LogicalError(f"code {spec.name or '<unnamed>'} encodes no logical qubit (k=0)")
    if spec.designated_pair >= len(pairs):
        raise LogicalError(
            f"designated pair {spec.designated_pair} out of range for k={len(pairs)}"
        )
    return pairs[spec.designated_pair]


def is_abelian(spec: CodeSpec) -> bool:
    return gauge_group(spec).is_abelian


# -- validation ----------------------------------------------------------------


@dataclass
class ValidationReport:
    name: str
    n: int
    rank_gauge: int
    rank_stabilizer: int
    k: int
    abelian: bool
    designated: LogicalPair | None
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "rank_gauge": self.rank_gauge,
            "rank_stabilizer": self.rank_stabilizer,
            "k": self.k,
            "abelian": self.abelian,
            "logicalX": None if self.designated is None else str(self.designated.xbar),
            "logicalZ": None if self.designated is None else str(self.designated.zbar),
            "warnings": list(self.warnings),
        }


def validate(spec: CodeSpec) -> ValidationReport:
    gauge = gauge_group(spec)
    stab = stabilizer_group(spec)
    cg = centralizer_group(spec)
    warnings = []
    twice_k = cg.rank - stab.rank
    k = twice_k // 2
    if twice_k % 2:
        warnings.append(f"rank(C(G)) - rank(S) = {twice_k} is odd")
    if k == 0:
        warnings.append("k=0: the code encodes no logical qubit")
    elif k > 1:
        warnings.append(
            f"k={k}: analysis uses logical pair {spec.designated_pair} only"
        )
    abelian = gauge.is_abelian
    if abelian and 2 in gauge.phase_subgroup:
        warnings.append("-I lies in the stabilizer group; the code space is empty")
    designated = None
    if k >= 1:
        try:
            designated = designated_logicals(spec)
        except LogicalError as exc:
            warnings.append(str(exc))
    return ValidationReport(
        spec.name, spec.n, gauge.rank, stab.rank, k, abelian, designated, warnings
    )


# -- built-in families -----------------------------------------------------------


def _zz(n: int, a: int, b: int) -> PauliOperator:
    return PauliOperator.from_bits(n, 0, (1 << a) | (1 << b))


def _xx(n: int, a: int, b: int) -> PauliOperator:
    return PauliOperator.from_bits(n, (1 << a) | (1 << b), 0)


def _uniform(gens) -> tuple[tuple[float, PauliOperator], ...]:
    return tuple((-1.0, g) for g in gens)


def _flip_chain_logicals(n: int, site: int = 0) -> tuple[LogicalPair, ...]:
    xbar = PauliOperator.from_bits(n, (1 << n) - 1, 0)
    zbar = PauliOperator.from_bits(n, 0, 1 << site)
    return (LogicalPair(xbar, zbar),)


def _repetition(n: int) -> CodeSpec:
    gens = [_zz(n, j, j + 1) for j in range(n - 1)]
    return CodeSpec(n, _uniform(gens), _flip_chain_logicals(n), f"repetition-{n}")


def _ising1d(L: int) -> CodeSpec:
    # periodic ring; the closing bond makes the generator set dependent
    gens = [_zz(L, j, (j + 1) % L) for j in range(L)]
    return CodeSpec(L, _uniform(gens), _flip_chain_logicals(L), f"ising1d-{L}")


def _ising2d(L: int) -> CodeSpec:
    n = L * L
    gens = []
    for r in range(L):
        for c in range(L):
            site = r * L + c
            if c + 1 < L:
                gens.append(_zz(n, site, site + 1))
            if r + 1 < L:
                gens.append(_zz(n, site, site + L))
    return CodeSpec(n, _uniform(gens), _flip_chain_logicals(n), f"ising2d-{L}")


def _toric2d(L: int) -> CodeSpec:
    # horizontal edge (r,c)->(r,c+1) is qubit r*L+c, vertical edge (r,c)->(r+1,c) is L*L + r*L+c
    n = 2 * L * L

    def h(r, c):
        return (r % L) * L + (c % L)

    def v(r, c):
        return L * L + (r % L) * L + (c % L)

    gens = []
    for r in range(L):
        for c in range(L):
            star = (1 << h(r, c)) | (1 << h(r, c - 1)) | (1 << v(r, c)) | (1 << v(r - 1, c))
            gens.append(PauliOperator.from_bits(n, star, 0))
    for r in range(L):
        for c in range(L):
            plaq = (1 << h(r, c)) | (1 << h(r + 1, c)) | (1 << v(r, c)) | (1 << v(r, c + 1))
            gens.append(PauliOperator.from_bits(n, 0, plaq))
    return CodeSpec(n, _uniform(gens), (), f"toric2d-{L}")


def _surface2d(L: int) -> CodeSpec:
    # (2L-1)x(2L-1) grid: data where r+c even, X checks at (even, odd), Z checks at (odd, even)
    size = 2 * L - 1
    index = {}
    for r in range(size):
        for c in range(size):
            if (r + c) % 2 == 0:
                index[(r, c)] = len(index)
    n = len(index)

    def neighbours(r, c):
        mask = 0
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            q = index.get((r + dr, c + dc))
            if q is not None:
                mask |= 1 << q
        return mask

    xs = [
        PauliOperator.from_bits(n, neighbours(r, c), 0)
        for r in range(0, size, 2)
        for c in range(1, size, 2)
    ]
    zs = [
        PauliOperator.from_bits(n, 0, neighbours(r, c))
        for r in range(1, size, 2)
        for c in range(0, size, 2)
    ]
    return CodeSpec(n, _uniform(xs + zs), (), f"surface2d-{L}")


def _baconshor2d(L: int) -> CodeSpec:
    # site (r,c) is qubit r*L+c; X gauge on vertical pairs, Z gauge on horizontal pairs
    n = L * L
    xs = [_xx(n, r * L + c, (r + 1) * L + c) for r in range(L - 1) for c in range(L)]
    zs = [_zz(n, r * L + c, r * L + c + 1) for r in range(L) for c in range(L - 1)]
    return CodeSpec(n, _uniform(xs + zs), (), f"baconshor2d-{L}")


_BUILDERS = {
    "repetition": _repetition,
    "ising1d": _ising1d,
    "ising2d": _ising2d,
    "toric2d": _toric2d,
    "surface2d": _surface2d,
    "baconshor2d": _baconshor2d,
}


def builtin_code(family: str, param: int) -> CodeSpec:
    """Built-in code family with couplings -1.0 on every gauge term."""
    if family not in _BUILDERS:
        raise InputError(f"unknown code family {family!r}; choose from {', '.join(FAMILIES)}")
    if not isinstance(param, int) or param < 2:
        raise InputError(f"{family} needs an integer size >= 2, got {param!r}")
    return _BUILDERS[family](param)


def parse_builtin(selector: str) -> CodeSpec:
    """Parse ``family:param`` such as ``baconshor2d:3``."""
    family, sep, param = selector.partition(":")
    if not sep:
        raise InputError(f"builtin selector must look like family:size, got {selector!r}")
    try:
        size = int(param)
    except ValueError:
        raise InputError(f"builtin size must be an integer, got {param!r}") from None
    return builtin_code(family.strip(), size)
