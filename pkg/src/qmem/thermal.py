"""Gibbs-state thermodynamics of code Hamiltonians.

Partition functions per syndrome sector, the relaxation rate (thermal
weight of bad sectors), its Golden-Thompson upper bound, and expectation
values of logical operators under a symmetry-breaking field together with
the Bogoliubov inequalities that bound them.

Boltzmann sums are max-shifted: a :class:`GibbsAnalysis` stores
``Z_s * exp(-log_scale)`` so that nothing overflows at low temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codespec import CodeSpec, designated_logicals, gauge_group
from .eclayer import (
    DecoderTable,
    SyndromeClassification,
    build_decoder,
    ec_logicals,
    syndrome_of,
)
from .errors import BoundViolation, InputError, LogicalError
from .pauli import PauliOperator, check_dense, pauli_sum_matrix, pauli_to_matrix
from .sectors import (
    SectorSpectrum,
    Syndrome,
    energy_scale,
    hamiltonian,
    sector_projector,
    sector_spectra,
)

__all__ = [
    "hamiltonian",
    "sector_spectra",
    "GibbsAnalysis",
    "RelaxationRate",
    "GTBound",
    "partition_functions",
    "relaxation_rate",
    "anticommuting_part",
    "gt_bound",
    "expm_hermitian",
    "gibbs_state",
    "fragility_expectation",
    "bogoliubov_check",
    "BogoliubovReport",
]

BETA_SCALE_LIMIT = 50.0
BOUND_TOL = 1e-12


def check_beta(beta: float, code: CodeSpec | None = None) -> None:
    if not math.isfinite(beta) or beta < 0:
        raise InputError(f"beta must be finite and non-negative, got {beta}")
    if code is not None:
        rmax = max(abs(r) for r in code.couplings)
        if beta * rmax > BETA_SCALE_LIMIT:
            raise InputError(
                f"beta = {beta} exceeds the guard {BETA_SCALE_LIMIT}/|r_max| = {BETA_SCALE_LIMIT / rmax}"
            )


def expm_hermitian(A: np.ndarray, t: float = 1.0, shift: float = 0.0) -> np.ndarray:
    """``exp(t (A - shift))`` for Hermitian ``A`` by eigendecomposition."""
    w, V = np.linalg.eigh(A)
    return (V * np.exp(t * (w - shift))) @ V.conj().T


def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    p = np.exp(-beta * (w - w[0]))
    p /= p.sum()
    return (V * p) @ V.conj().T


@dataclass(frozen=True)
class GibbsAnalysis:
    """Sector partition functions at one inverse temperature.

    ``z_scaled[s] = Z_s * exp(-log_scale)``; ratios of partition functions
    are exact in this representation.
    """

    beta: float
    log_scale: float
    z_scaled: dict
    ground_sector: Syndrome
    gap: float

    @property
    def z_total_scaled(self) -> float:
        return math.fsum(self.z_scaled.values())

    @property
    def log_z_total(self) -> float:
        return self.log_scale + math.log(self.z_total_scaled)

    def Z(self, s: Syndrome) -> float:
        return self.z_scaled[s] * math.exp(self.log_scale)

    @property
    def Z_total(self) -> float:
        return self.z_total_scaled * math.exp(self.log_scale)

    def weights(self) -> dict:
        """Thermal probability of each sector, ``Z_s / Z``."""
        total = self.z_total_scaled
        return {s: z / total for s, z in self.z_scaled.items()}


def partition_functions(spectrum: SectorSpectrum, beta: float) -> GibbsAnalysis:
    """``Z_s = sum multiplicity * exp(-beta E)`` over the levels of sector ``s``."""
    check_beta(beta)
    e0 = spectrum.ground_energy
    z = {
        s: math.fsum(m * math.exp(-beta * (e - e0)) for e, m in levels)
        for s, levels in spectrum.levels.items()
    }
    return GibbsAnalysis(beta, -beta * e0, z, spectrum.ground_sector, spectrum.gap)


@dataclass(frozen=True)
class RelaxationRate:
    """Bad-sector thermal weight and the storage-time scale it implies."""

    epsilon: float
    bad_weight: float
    storage_time: float | None = None

    def __float__(self) -> float:
        return self.epsilon


def _check_same_space(analysis: GibbsAnalysis, classification: SyndromeClassification) -> None:
    if set(analysis.z_scaled) != set(classification.good):
        raise InputError("classification and spectrum cover different syndrome spaces")


def relaxation_rate(
    analysis: GibbsAnalysis,
    classification: SyndromeClassification,
    K: int | None = None,
    h_max: float | None = None,
) -> RelaxationRate:
    """``epsilon = sum_bad Z_s / sum_s Z_s``; ``tau = 1 / (K h_max epsilon)``."""
    _check_same_space(analysis, classification)
    total = analysis.z_total_scaled
    bad = math.fsum(z for s, z in analysis.z_scaled.items() if not classification.good[s])
    eps = bad / total
    tau = None
    if K is not None and h_max is not None:
        rate = K * h_max * eps
        tau = math.inf if rate == 0 else 1.0 / rate
    return RelaxationRate(eps, bad, tau)


def anticommuting_part(code: CodeSpec, E: PauliOperator) -> np.ndarray:
    """``H_E = 2 sum_{i: G_i E = -E G_i} r_i G_i`` so that ``E H E^dag = H - H_E``."""
    if E.n != code.n:
        raise InputError(f"error acts on {E.n} qubits, code has {code.n}")
    terms = [(2.0 * r, g) for r, g in code.gauge_terms if not g.commutes(E)]
    return pauli_sum_matrix(terms, code.n)


@dataclass(frozen=True)
class GTBound:
    bound: float
    per_syndrome: dict


def gt_bound(
    code: CodeSpec,
    beta: float,
    classification: SyndromeClassification,
    decoder: DecoderTable,
    error_of=None,
) -> GTBound:
    """``sum_bad Tr(P_0 exp(-beta H) exp(beta H_E(s))) / Z``.

    ``error_of`` maps a syndrome to the representative error ``E(s)``;
    the decoder correction ``C(s)`` is used when omitted.
    """
    check_beta(beta, code)
    check_dense(code.n, what="Golden-Thompson bound")
    error_of = decoder.correction if error_of is None else error_of
    H = hamiltonian(code)
    w, V = np.linalg.eigh(H)
    e0 = w[0]
    boltz = (V * np.exp(-beta * (w - e0))) @ V.conj().T
    z = float(np.sum(np.exp(-beta * (w - e0))))
    r = decoder.r
    P0 = sector_projector(code, Syndrome.zero(r))
    left = P0 @ boltz
    terms = {}
    for s, good in classification.good.items():
        if good:
            continue
        E = error_of(s)
        if syndrome_of(code, E) != s:
            raise InputError(f"representative {E} does not have syndrome {s}")
        grow = expm_hermitian(anticommuting_part(code, E), beta)
        terms[s] = float(np.real(np.trace(left @ grow))) / z
    return GTBound(math.fsum(terms.values()), terms)


# -- thermal fragility -------------------------------------------------------------


def _dressed(base: np.ndarray, code: CodeSpec, dressing: PauliOperator | None) -> np.ndarray:
    if dressing is None:
        return base
    if gauge_group(code).solve(dressing) is None:
        raise LogicalError(f"dressing {dressing} is not a gauge-group element")
    if not dressing.is_hermitian:
        raise LogicalError(f"dressing {dressing} is not Hermitian")
    return base @ pauli_to_matrix(dressing)


def logical_operator(
    code: CodeSpec,
    kind: str = "bare",
    dressing: PauliOperator | None = None,
    decoder: DecoderTable | None = None,
    which: str = "Z",
) -> np.ndarray:
    """Dense logical of the requested kind: ``bare``, ``dressed`` or ``ec``.

    ``dressed`` multiplies the bare logical by the gauge element
    ``dressing``; ``ec`` uses the error-corrected logical (optionally
    dressed as well).
    """
    pair = designated_logicals(code)
    if kind == "ec":
        ec = ec_logicals(code, decoder)
        base = {"X": ec.X, "Y": ec.Y, "Z": ec.Z}[which]
    elif kind in ("bare", "dressed"):
        P = {"X": pair.xbar, "Y": pair.ybar, "Z": pair.zbar}[which]
        base = pauli_to_matrix(P)
    else:
        raise InputError(f"unknown logical kind {kind!r}")
    if kind == "dressed" and dressing is None:
        raise InputError("dressed logical needs a gauge element")
    return _dressed(base, code, dressing)


class _ThermalFrame:
    """Eigenbasis and Boltzmann weights of one Hamiltonian."""

    def __init__(self, H: np.ndarray, beta: float):
        w, self.V = np.linalg.eigh(H)
        p = np.exp(-beta * (w - w[0]))
        self.p = p / p.sum()

    def average(self, O: np.ndarray) -> complex:
        diag = np.einsum("ij,ij->j", self.V.conj(), O @ self.V)
        return complex(np.dot(self.p, diag))


def _thermal_average(H_h: np.ndarray, beta: float, O: np.ndarray) -> float:
    return _ThermalFrame(H_h, beta).average(O).real


def fragility_expectation(
    code: CodeSpec,
    beta: float,
    h: float,
    field: str = "bare",
    observable: str = "bare",
    field_dressing: PauliOperator | None = None,
    observable_dressing: PauliOperator | None = None,
    decoder: DecoderTable | None = None,
) -> float:
    """``Tr(O exp(-beta (H - h F))) / Tr(exp(-beta (H - h F)))``.

    ``F`` and ``O`` are the Z-type logical in the requested form.  Bare and
    error-corrected fields must commute with ``H``; a dressed field need
    not, but its dressing must be a gauge element.
    """
    check_beta(beta, code)
    H = hamiltonian(code)
    F = logical_operator(code, field, field_dressing, decoder)
    if field != "dressed" and field_dressing is None:
        comm = H @ F - F @ H
        if np.abs(comm).max() > 1e-10 * max(1.0, energy_scale(code)):
            raise LogicalError(f"{field} field operator does not commute with H")
    O = logical_operator(code, observable, observable_dressing, decoder)
    return _thermal_average(H - h * F, beta, O)


@dataclass
class BogoliubovPoint:
    h: float
    label: str
    expectation: float
    field_expectation: float
    bound: float
    margin: float
    inequality_lhs: float
    inequality_rhs: float


@dataclass
class BogoliubovReport:
    beta: float
    points: list = field(default_factory=list)

    @property
    def min_margin(self) -> float:
        return min((p.margin for p in self.points), default=math.inf)

    @property
    def ok(self) -> bool:
        return all(p.margin >= -BOUND_TOL for p in self.points)


def _bogoliubov_sides(frame: _ThermalFrame, H_h, beta, A, C) -> tuple[float, float]:
    """Both sides of ``beta/2 <{A,A^dag}> <[[C,H],C^dag]> >= |<[C,A]>|^2``."""
    Ad = A.conj().T
    Cd = C.conj().T
    comm = C @ H_h - H_h @ C
    lhs = 0.5 * beta * frame.average(A @ Ad + Ad @ A) * frame.average(comm @ Cd - Cd @ comm)
    rhs = abs(frame.average(C @ A - A @ C)) ** 2
    return float(np.real(lhs)), float(rhs)


def bogoliubov_check(
    code: CodeSpec,
    beta: float,
    h_grid,
    dressings=(),
    raise_on_violation: bool = True,
) -> BogoliubovReport:
    """Check ``<Z> <= beta h`` and ``|<Z G'>|^2 <= beta h <Z G> <= beta h``.

    ``dressings`` is a list of ``(G, G')`` gauge-element pairs; ``None``
    stands for the identity.  Each point also evaluates the Bogoliubov
    inequality itself with ``A = X G'`` and ``C = Y``.
    """
    check_beta(beta, code)
    H = hamiltonian(code)
    pair = designated_logicals(code)
    Zb = pauli_to_matrix(pair.zbar)
    Xb = pauli_to_matrix(pair.xbar)
    Yb = pauli_to_matrix(pair.ybar)
    report = BogoliubovReport(beta)
    for h in h_grid:
        if h < 0:
            raise InputError(f"field strength must be non-negative, got {h}")
        H_h = H - h * Zb
        frame = _ThermalFrame(H_h, beta)
        z = frame.average(Zb).real
        lhs, rhs = _bogoliubov_sides(frame, H_h, beta, Xb, Yb)
        report.points.append(
            BogoliubovPoint(h, "bare", z, z, beta * h, beta * h - z, lhs, rhs)
        )
        for G, Gp in dressings:
            F = Zb if G is None else _dressed(Zb, code, G)
            O = Zb if Gp is None else _dressed(Zb, code, Gp)
            A = Xb if Gp is None else _dressed(Xb, code, Gp)
            H_h = H - h * F
            frame = _ThermalFrame(H_h, beta)
            zf = frame.average(F).real
            zo = frame.average(O).real
            lhs, rhs = _bogoliubov_sides(frame, H_h, beta, A, Yb)
            label = f"G={G if G is not None else 'I'}; G'={Gp if Gp is not None else 'I'}"
            # |<Z G'>|^2 <= beta h <Z G> and <Z G> <= 1
            margin = min(beta * h * zf - zo * zo, beta * h - zo * zo)
            report.points.append(
                BogoliubovPoint(h, label, zo, zf, beta * h, margin, lhs, rhs)
            )
    for p in report.points:
        if p.inequality_lhs - p.inequality_rhs < -BOUND_TOL * max(1.0, p.inequality_rhs):
            raise BoundViolation(
                f"Bogoliubov inequality fails numerically at h={p.h} ({p.label})"
            )
    if raise_on_violation and not report.ok:
        worst = min(report.points, key=lambda p: p.margin)
        raise BoundViolation(
            f"fragility bound violated at h={worst.h} ({worst.label}): margin {worst.margin:.3e}"
        )
    return report


def ec_fragility_curve(code: CodeSpec, beta: float, h_grid, decoder: DecoderTable | None = None):
    """``<Z_ec>_h`` under the bare field for each ``h``."""
    decoder = build_decoder(code) if decoder is None else decoder
    return [fragility_expectation(code, beta, h, "bare", "ec", decoder=decoder) for h in h_grid]
