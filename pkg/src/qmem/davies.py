"""Davies weak-coupling dynamics of a code Hamiltonian coupled to a bath.

Jump operators are the Bohr-frequency components of each coupling
operator in the eigenbasis of ``H``.  ``A_omega`` lowers the system energy
by ``omega``, so ``omega > 0`` is energy handed to the bath.  Rates follow a
flat profile with detailed balance, which makes the Gibbs state a fixed
point of the dissipator.

Density matrices are vectorised row-major: ``vec(A rho B) = (A kron B^T) vec(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .codespec import CodeSpec
from .eclayer import DecoderTable, ECLogicals, SyndromeClassification, ec_logicals, good_projector
from .errors import (
    BoundViolation,
    InputError,
    NumericalError,
    PreconditionError,
    SizeLimitError,
)
from .pauli import check_dense, pauli_from_string, pauli_to_matrix
from .sectors import cluster_levels, ground_projector, hamiltonian
from .thermal import check_beta, gibbs_state

__all__ = [
    "JumpOperator",
    "DaviesModel",
    "EncodedState",
    "Trajectory",
    "spectral_weight",
    "jump_operators",
    "davies_model",
    "apply_generator",
    "liouvillian",
    "evolve",
    "encode",
    "decode",
    "trace_norm",
    "norm_bounds",
    "storage_report",
    "gapped_bound_check",
    "coupling_paulis",
]

SUPEROP_LIMIT = 6
NORM_TOL = 1e-9
TRACE_TOL = 1e-10
EIGEN_FLOOR = -1e-8
STATE_FLOOR = -1e-10
PROTECT_TOL = 1e-10
# absolute slack for comparing a measured norm with a bound that may be 0
DRIFT_FLOOR = 1e-9


def trace_norm(A: np.ndarray) -> float:
    """Sum of singular values; uses ``eigvalsh`` for Hermitian input."""
    if np.allclose(A, A.conj().T, atol=1e-13, rtol=0):
        return float(np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2)).sum())
    return float(np.linalg.svd(A, compute_uv=False).sum())


def spectral_weight(omega, beta: float, h_max: float):
    """Flat profile with detailed balance.

    ``h(omega) = h_max`` for ``omega >= 0`` and ``h_max exp(beta omega)``
    below zero, so ``h(-omega) = exp(-beta omega) h(omega)`` identically.
    """
    if h_max <= 0:
        raise InputError(f"h_max must be positive, got {h_max}")
    omega = np.asarray(omega, dtype=float)
    out = np.where(omega >= 0, h_max, h_max * np.exp(beta * np.minimum(omega, 0.0)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class JumpOperator:
    label: str
    omega: float
    A: np.ndarray
    rate: float


@dataclass(eq=False)
class DaviesModel:
    """Eigendecomposition of ``H``, couplings and the resulting jump set."""

    H: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    couplings: tuple
    beta: float
    h_max: float
    bohr_tol: float
    jumps: list
    profile: str = "flat-detailed-balance"
    levels: tuple = ()
    decay: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def K(self) -> int:
        return len(self.couplings)

    @property
    def norm_bound(self) -> float:
        """Upper bound ``2 K h_max`` on the induced trace norm of the dissipator."""
        return 2.0 * self.K * self.h_max

    @property
    def gap(self) -> float:
        return self.levels[1][0] - self.levels[0][0] if len(self.levels) > 1 else 0.0

    def jumps_of(self, label: str) -> list[JumpOperator]:
        return [j for j in self.jumps if j.label == label]

    def invariant_errors(self) -> dict:
        """Largest deviations from reassembly, adjoint symmetry and detailed balance."""
        reassembly = adjoint = balance = 0.0
        for label, A in self.couplings:
            js = self.jumps_of(label)
            total = sum((j.A for j in js), np.zeros_like(A))
            reassembly = max(reassembly, float(np.abs(total - A).max()))
            by_omega = {j.omega: j for j in js}
            for j in js:
                partner = by_omega.get(-j.omega)
                if partner is None:
                    adjoint = max(adjoint, float(np.abs(j.A).max()))
                    continue
                adjoint = max(adjoint, float(np.abs(j.A.conj().T - partner.A).max()))
                lhs = partner.rate
                rhs = math.exp(-self.beta * j.omega) * j.rate
                balance = max(balance, abs(lhs - rhs) / max(rhs, 1e-300))
        return {"reassembly": reassembly, "adjoint": adjoint, "detailed_balance": balance}


def _spectral_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 2))


def _check_hermitian(A: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.conj().T).max() > 1e-12 * scale:
        raise InputError(f"{what} is not Hermitian")


def jump_operators(
    H: np.ndarray,
    couplings,
    beta: float,
    h_max: float,
    bohr_tol: float | None = None,
    profile=spectral_weight,
    profile_name: str = "flat-detailed-balance",
) -> DaviesModel:
    """Bohr-frequency decomposition ``A_omega = sum_{E_n - E_m = omega} Pi_m A Pi_n``.

    ``couplings`` is a sequence of ``(label, A)`` with Hermitian ``A`` of
    spectral norm at most one.  Level and frequency clustering use
    ``bohr_tol`` (default ``1e-9 * ||H||``).
    """
    check_beta(beta)
    H = np.asarray(H, dtype=complex)
    _check_hermitian(H, "Hamiltonian")
    couplings = tuple((str(lab), np.asarray(A, dtype=complex)) for lab, A in couplings)
    for lab, A in couplings:
        if A.shape != H.shape:
            raise InputError(f"coupling {lab} has shape {A.shape}, expected {H.shape}")
        _check_hermitian(A, f"coupling {lab}")
        norm = _spectral_norm(A)
        if norm > 1 + NORM_TOL:
            raise InputError(f"coupling {lab} has spectral norm {norm:.6g} > 1")
    w, V = np.linalg.eigh(H)
    if bohr_tol is None:
        bohr_tol = 1e-9 * max(1.0, float(np.abs(w).max()))
    levels = cluster_levels(w, bohr_tol)
    level_E = np.array([e for e, _ in levels])
    level_of = np.repeat(np.arange(len(levels)), [m for _, m in levels])
    L = len(levels)

    # label[m, n] = +(c+1) for n > m (frequency E_n - E_m > 0), -(c+1) below
    label = np.zeros((L, L), dtype=np.int64)
    reps: list[float] = []
    if L > 1:
        iu, ju = np.triu_indices(L, 1)
        d = level_E[ju] - level_E[iu]
        order = np.argsort(d, kind="stable")
        cid = np.empty(len(d), dtype=np.int64)
        start = 0
        for pos in range(1, len(d) + 1):
            if pos == len(d) or d[order[pos]] - d[order[pos - 1]] > bohr_tol:
                members = order[start:pos]
                cid[members] = len(reps)
                reps.append(float(d[members].mean()))
                start = pos
        label[iu, ju] = cid + 1
        label[ju, iu] = -(cid + 1)
    full = label[level_of[:, None], level_of[None, :]]
    present = np.unique(full)

    jumps = []
    Vh = V.conj().T
    for lab, A in couplings:
        Ae = Vh @ A @ V
        for ell in present:
            block = np.where(full == ell, Ae, 0.0)
            if np.abs(block).max() <= 1e-14:
                continue
            omega = 0.0 if ell == 0 else math.copysign(reps[abs(ell) - 1], ell)
            rate = float(profile(omega, beta, h_max))
            jumps.append(JumpOperator(lab, omega, V @ block @ Vh, rate))
    dim = H.shape[0]
    decay = np.zeros((dim, dim), dtype=complex)
    for j in jumps:
        decay += j.rate * (j.A.conj().T @ j.A)
    return DaviesModel(
        H, w, V, couplings, beta, h_max, bohr_tol, jumps, profile_name, levels, decay
    )


def coupling_paulis(code: CodeSpec, kind: str = "single-x", text: str | None = None):
    """Coupling operators as labelled Paulis.

    ``single-x`` puts ``X_j`` on every qubit, ``single-xyz`` all three
    letters; ``file`` reads one Pauli token list per non-comment line.
    """
    n = code.n
    if kind == "single-x":
        return [(f"X{j}", pauli_from_string(f"X{j}", n)) for j in range(n)]
    if kind == "single-xyz":
        return [(f"{a}{j}", pauli_from_string(f"{a}{j}", n)) for j in range(n) for a in "XYZ"]
    if kind == "file":
        if text is None:
            raise InputError("coupling file contents required")
        out = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                P = pauli_from_string(line, n)
            except InputError as exc:
                raise InputError(f"coupling line {lineno}: {exc}") from exc
            if not P.is_hermitian:
                raise InputError(f"coupling line {lineno}: {P} is not Hermitian")
            out.append((str(P), P))
        if not out:
            raise InputError("coupling file lists no operators")
        return out
    raise InputError(f"unknown coupling kind {kind!r}")


def davies_model(
    code: CodeSpec,
    beta: float,
    h_max: float = 1.0,
    couplings="single-x",
    bohr_tol: float | None = None,
) -> DaviesModel:
    """Model for a code Hamiltonian; ``couplings`` is a kind or a Pauli list."""
    check_beta(beta, code)
    if isinstance(couplings, str):
        couplings = coupling_paulis(code, couplings)
    mats = [(lab, pauli_to_matrix(P)) for lab, P in couplings]
    return jump_operators(hamiltonian(code), mats, beta, h_max, bohr_tol)


def apply_generator(model: DaviesModel, rho: np.ndarray, hamiltonian_part: bool = False) -> np.ndarray:
    """Dissipator ``sum h (A rho A^dag - {rho, A^dag A}/2)``, optionally plus ``-i[H, rho]``."""
    rho = np.asarray(rho)
    if rho.shape != model.H.shape:
        raise InputError(f"state has shape {rho.shape}, model acts on {model.H.shape}")
    out = -0.5 * (model.decay @ rho + rho @ model.decay)
    for j in model.jumps:
        out += j.rate * (j.A @ rho @ j.A.conj().T)
    if hamiltonian_part:
        out += -1j * (model.H @ rho - rho @ model.H)
    return out


def liouvillian(model: DaviesModel, hamiltonian_part: bool = True, limit: int = SUPEROP_LIMIT) -> np.ndarray:
    """Row-major superoperator of ``-i[H, .] + L``."""
    if model.n > limit:
        raise SizeLimitError(
            f"superoperator on {model.n} qubits exceeds the limit of {limit} qubits"
        )
    dim = model.dim
    eye = np.eye(dim)
    M = model.decay
    S = -0.5 * (np.kron(M, eye) + np.kron(eye, M.T))
    for j in model.jumps:
        S += j.rate * np.kron(j.A, j.A.conj())
    if hamiltonian_part:
        S += -1j * (np.kron(model.H, eye) - np.kron(eye, model.H.T))
    return S


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    states: list
    method: str


def _check_state(rho: np.ndarray, t: float) -> None:
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise NumericalError(f"trace drifted to {tr.real:.15g} at t={t}")
    if np.abs(rho - rho.conj().T).max() > TRACE_TOL:
        raise NumericalError(f"state lost hermiticity at t={t}")
    low = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if low < EIGEN_FLOOR:
        raise NumericalError(f"state eigenvalue {low:.3e} below floor at t={t}")


def _rk4_steps(model: DaviesModel, rho: np.ndarray, span: float, norm_est: float) -> np.ndarray:
    if span == 0:
        return rho
    # local error ~ (h ||L||)^5 / 120 kept below 1e-9
    h_target = (120e-9) ** 0.2 / max(norm_est, 1e-12)
    steps = max(1, math.ceil(span / h_target))
    h = span / steps

    def f(x):
        return apply_generator(model, x, hamiltonian_part=True)

    for _ in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def evolve(
    model: DaviesModel,
    rho0: np.ndarray,
    times,
    method: str = "auto",
    limit: int = SUPEROP_LIMIT,
) -> Trajectory:
    """States at the checkpoint ``times`` under ``-i[H, .] + L``.

    ``exact`` applies matrix exponentials of the vectorised Liouvillian
    between consecutive checkpoints; ``rk4`` steps the matrix equation.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise InputError("checkpoint times must be a non-empty 1-d sequence")
    if (times < 0).any():
        raise InputError("checkpoint times must be non-negative")
    if (np.diff(times) < 0).any():
        raise InputError("checkpoint times must be non-decreasing")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != model.H.shape:
        raise InputError(f"state has shape {rho0.shape}, model acts on {model.H.shape}")
    if method == "auto":
        method = "exact" if model.n <= limit else "rk4"
    states = []
    if method == "exact":
        S = liouvillian(model, limit=limit)
        vec = rho0.reshape(-1)
        prev = 0.0
        cache: dict[float, np.ndarray] = {}
        for t in times:
            dt = float(t - prev)
            if dt > 0:
                key = round(dt, 12)
                if key not in cache:
                    cache[key] = expm(S * dt)
                vec = cache[key] @ vec
            prev = float(t)
            rho = vec.reshape(model.dim, model.dim)
            _check_state(rho, float(t))
            states.append(rho.copy())
    elif method == "rk4":
        check_dense(model.n, what="fixed-step evolution")
        norm_est = 2 * float(np.abs(model.energies).max()) + model.norm_bound
        rho = rho0.copy()
        prev = 0.0
        for t in times:
            rho = _rk4_steps(model, rho, float(t - prev), norm_est)
            prev = float(t)
            _check_state(rho, float(t))
            states.append(rho.copy())
    else:
        raise InputError(f"unknown evolution method {method!r}")
    return Trajectory(times, states, method)


# -- encoding and decoding -------------------------------------------------------------

_PAULI_2 = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bloch_vector(eta) -> np.ndarray:
    """Bloch vector of a qubit state given as a 3-vector or a 2x2 matrix."""
    eta = np.asarray(eta)
    if eta.shape == (2, 2):
        gamma = np.array([np.trace(eta @ s).real for s in _PAULI_2])
    elif eta.shape == (3,):
        gamma = eta.astype(float)
    else:
        raise InputError(f"qubit state must be a Bloch 3-vector or 2x2 matrix, got shape {eta.shape}")
    if np.linalg.norm(gamma) > 1 + 1e-8:
        raise InputError(f"Bloch vector {gamma.tolist()} lies outside the unit ball")
    return gamma


def qubit_density(gamma) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    return 0.5 * (np.eye(2) + sum(g * s for g, s in zip(gamma, _PAULI_2)))


@dataclass(frozen=True, eq=False)
class EncodedState:
    rho: np.ndarray
    mode: str
    gamma: np.ndarray
    beta: float | None = None


def _reference_state(code: CodeSpec, mode: str, beta: float | None) -> np.ndarray:
    H = hamiltonian(code)
    if mode == "thermal":
        if beta is None:
            raise InputError("thermal encoding needs beta")
        check_beta(beta, code)
        return gibbs_state(H, beta)
    if mode == "ground":
        P = ground_projector(code, H)
        return P / np.trace(P).real
    raise InputError(f"unknown encoding {mode!r}")


def encode(
    code: CodeSpec,
    decoder: DecoderTable,
    eta,
    mode: str = "thermal",
    beta: float | None = None,
    ec: ECLogicals | None = None,
) -> EncodedState:
    """``rho = 2 rho_ref eta_ec`` with ``eta_ec = (I + gamma . S_ec) / 2``.

    ``rho_ref`` is the Gibbs state (``thermal``) or the normalised ground
    projector (``ground``).
    """
    gamma = bloch_vector(eta)
    ec = ec_logicals(code, decoder) if ec is None else ec
    ref = _reference_state(code, mode, beta)
    dim = ref.shape[0]
    eta_ec = 0.5 * (np.eye(dim) + gamma[0] * ec.X + gamma[1] * ec.Y + gamma[2] * ec.Z)
    if np.abs(eta_ec @ ref - ref @ eta_ec).max() > 1e-10:
        raise NumericalError("encoded logical state does not commute with the reference state")
    rho = 2.0 * ref @ eta_ec
    rho = 0.5 * (rho + rho.conj().T)
    low = np.linalg.eigvalsh(rho)[0]
    if low < STATE_FLOOR:
        raise NumericalError(f"encoded state has eigenvalue {low:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise NumericalError(f"encoded state has trace {tr:.15g}")
    return EncodedState(rho, mode, gamma, beta)


def decode(code: CodeSpec, decoder: DecoderTable, rho: np.ndarray, ec: ECLogicals | None = None) -> np.ndarray:
    """Bloch vector ``gamma_Q = Tr(rho Q_ec)`` of the stored qubit."""
    ec = ec_logicals(code, decoder) if ec is None else ec
    gamma = np.array([np.trace(rho @ Q).real for Q in ec.as_tuple()])
    if np.linalg.norm(gamma) > 1 + 1e-8:
        raise NumericalError(f"decoded Bloch vector has length {np.linalg.norm(gamma):.12g} > 1")
    return gamma


# -- bounds -------------------------------------------------------------------------------


@dataclass(frozen=True)
class NormBounds:
    upper: float
    sampled_lower: float
    samples: int


def _random_unit(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _sample_unit_trace_norm(rng, dim, kind):
    if kind == 0:
        v = _random_unit(rng, dim)
        return np.outer(v, v.conj())
    if kind == 1:
        # p |u><u| - (1-p) |v><v| with u orthogonal to v
        u = _random_unit(rng, dim)
        v = _random_unit(rng, dim)
        v = v - np.vdot(u, v) * u
        v /= np.linalg.norm(v)
        p = rng.uniform()
        return p * np.outer(u, u.conj()) - (1 - p) * np.outer(v, v.conj())
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    F = A + A.conj().T
    return F / trace_norm(F)


def norm_bounds(model: DaviesModel, samples: int = 500, seed: int = 0) -> NormBounds:
    """``2 K h_max`` and the largest ``||L(F)||_1`` over sampled ``||F||_1 = 1``.

    Samples cycle through pure projectors, signed two-state mixtures and
    normalised random Hermitian matrices.
    """
    upper = model.norm_bound
    if model.K == 0:
        return NormBounds(0.0, 0.0, 0)
    rng = np.random.default_rng(seed)
    best = 0.0
    for i in range(samples):
        F = _sample_unit_trace_norm(rng, model.dim, i % 3)
        best = max(best, trace_norm(apply_generator(model, F)))
    return NormBounds(upper, best, samples)


def _commutator_defect(A, B, P) -> float:
    return float(np.abs((A @ B - B @ A) @ P).max())


def check_protected(model: DaviesModel, ec: ECLogicals, P: np.ndarray, tol: float = PROTECT_TOL) -> None:
    """Raise unless ``[A_k, Q] P = 0`` for every coupling and both logicals."""
    for label, A in model.couplings:
        for name, Q in (("X_ec", ec.X), ("Z_ec", ec.Z)):
            defect = _commutator_defect(A, Q, P)
            if defect > tol:
                raise PreconditionError(
                    f"coupling {label} is not protected against {name}: |[A, Q] P| = {defect:.3e}"
                )


@dataclass
class StorageRow:
    t: float
    drift: float
    bound: float
    decoded_distance: float


@dataclass
class StorageReport:
    mode: str
    epsilon: float
    norm_bound: float
    fixed_point_residual: float
    rows: list
    method: str
    profile: str

    @property
    def max_ratio(self) -> float:
        ratios = [r.drift / r.bound for r in self.rows if r.bound > 0]
        return max(ratios, default=0.0)


def storage_report(
    code: CodeSpec,
    decoder: DecoderTable,
    model: DaviesModel,
    eta,
    times,
    classification: SyndromeClassification | None = None,
    P: np.ndarray | None = None,
    method: str = "auto",
    mode: str = "thermal",
) -> StorageReport:
    """Evolve an encoded state and compare its drift with the storage bound.

    Thermal encoding uses ``8 t (2 K h_max) Tr((I - P) rho_beta)`` with ``P``
    the good-syndrome projector unless one is passed explicitly.  Ground
    encoding uses ``t (2 K h_max) exp(-beta gap)`` and requires the couplings
    to be correctable on the ground space.
    """
    ec = ec_logicals(code, decoder)
    H = model.H
    if mode == "thermal":
        if P is None:
            if classification is None:
                raise InputError("storage report needs a classification or an explicit P")
            P = good_projector(code, classification)
    elif mode == "ground":
        P = ground_projector(code, H)
    else:
        raise InputError(f"unknown encoding {mode!r}")
    for name, O in (("P", P), ("X_ec", ec.X), ("Z_ec", ec.Z)):
        if np.abs(H @ O - O @ H).max() > PROTECT_TOL:
            raise PreconditionError(f"{name} does not commute with H")
    check_protected(model, ec, P)
    rho_beta = gibbs_state(H, model.beta)
    residual = trace_norm(apply_generator(model, rho_beta))
    if residual > 1e-8:
        raise NumericalError(f"Gibbs state is not a fixed point: ||L(rho_beta)||_1 = {residual:.3e}")
    eps = float(np.real(np.trace(rho_beta) - np.trace(P @ rho_beta)))
    if mode == "thermal":
        slope = 8.0 * model.norm_bound * eps
    else:
        slope = model.norm_bound * math.exp(-model.beta * model.gap)
    enc = encode(code, decoder, eta, mode, model.beta, ec)
    traj = evolve(model, enc.rho, times, method)
    eta0 = qubit_density(enc.gamma)
    rows = []
    for t, rho in zip(traj.times, traj.states):
        drift = trace_norm(rho - enc.rho)
        bound = float(slope * t)
        gamma_t = decode(code, decoder, rho, ec)
        dist = 0.5 * trace_norm(qubit_density(gamma_t) - eta0)
        rows.append(StorageRow(float(t), drift, bound, dist))
        if drift > bound + DRIFT_FLOOR:
            raise BoundViolation(
                f"drift {drift:.6e} exceeds storage bound {bound:.6e} at t={t}"
            )
    return StorageReport(mode, eps, model.norm_bound, residual, rows, traj.method, model.profile)


@dataclass
class GappedReport:
    beta: float
    gap: float
    bound: float
    measured: list
    lowering_residual: float
    zero_frequency_residual: float
    skipped: bool = False
    reason: str = ""

    @property
    def max_measured(self) -> float:
        return max(self.measured, default=0.0)


def gapped_bound_check(
    code: CodeSpec,
    decoder: DecoderTable,
    model: DaviesModel,
    etas=None,
    samples: int = 10,
    seed: int = 0,
    tol: float = 1e-10,
) -> GappedReport:
    """Check ``||L(rho)||_1 <= 2 K h_max exp(-beta gap)`` for ground-encoded states.

    Also verifies that every ``A_omega`` with ``omega > 0`` annihilates the
    ground state and that the zero-frequency part of the dissipator
    vanishes on encoded states.  A coupling that is not correctable on the
    ground space skips the check with a reason.
    """
    gap = model.gap
    bound = model.norm_bound * math.exp(-model.beta * gap)
    ec = ec_logicals(code, decoder)
    P0 = ground_projector(code, model.H)
    try:
        check_protected(model, ec, P0)
    except PreconditionError as exc:
        return GappedReport(model.beta, gap, bound, [], math.nan, math.nan, True, str(exc))
    rho_inf = P0 / np.trace(P0).real
    lowering = 0.0
    for j in model.jumps:
        if j.omega > 0:
            lowering = max(lowering, float(np.abs(j.A @ rho_inf).max()))
    if lowering > tol:
        raise BoundViolation(f"a lowering jump does not annihilate the ground state ({lowering:.3e})")
    if etas is None:
        rng = np.random.default_rng(seed)
        etas = []
        for _ in range(samples):
            v = rng.normal(size=3)
            etas.append(v / np.linalg.norm(v) * rng.uniform() ** (1 / 3))
    zero_res = 0.0
    measured = []
    for eta in etas:
        rho = encode(code, decoder, eta, "ground", ec=ec).rho
        for label, _ in model.couplings:
            for j in model.jumps_of(label):
                if j.omega != 0.0:
                    continue
                AdA = j.A.conj().T @ j.A
                term = j.A @ rho @ j.A.conj().T - 0.5 * (rho @ AdA + AdA @ rho)
                zero_res = max(zero_res, float(np.abs(term).max()))
        value = trace_norm(apply_generator(model, rho))
        measured.append(value)
        if value > bound * (1 + 1e-12) + 1e-15:
            raise BoundViolation(
                f"||L(rho)||_1 = {value:.6e} exceeds the gapped bound {bound:.6e}"
            )
    if zero_res > tol:
        raise BoundViolation(f"zero-frequency dissipator does not vanish ({zero_res:.3e})")
    return GappedReport(model.beta, gap, bound, measured, lowering, zero_res)
