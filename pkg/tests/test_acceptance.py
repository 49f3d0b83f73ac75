"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed as each criterion finishes (visible with ``-s``) and
repeated in the terminal summary.
"""

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from oracles import dense, enumerate_group, kron_all, I2, X2, Y2, Z2
from qmem.codespec import FAMILIES, builtin_code, designated_logicals, stabilizer_group
from qmem.davies import (
    apply_generator,
    davies_model,
    decode,
    encode,
    gapped_bound_check,
    norm_bounds,
    storage_report,
    trace_norm,
)
from qmem.eclayer import (
    build_decoder,
    classify_syndromes,
    ec_logicals,
    single_qubit_errors,
    syndrome_of,
)
from qmem.errors import BoundViolation
from qmem.pauli import PauliOperator, pauli_from_string
from qmem.sectors import sector_basis, sector_projector
from qmem.symplectic import (
    bare_logicals,
    centralizer_basis,
    group_basis,
    group_contains,
    stabilizer_of,
)
from qmem.thermal import (
    bogoliubov_check,
    ec_fragility_curve,
    fragility_expectation,
    gibbs_state,
    gt_bound,
    hamiltonian,
    partition_functions,
    relaxation_rate,
    sector_spectra,
)

BETAS = (0.5, 1.0, 2.0, 5.0)
HS = (0.01, 0.1, 0.5, 1.0)
GT_REL = 1e-12


@contextmanager
def criterion(k, title, limit=None):
    t0 = time.perf_counter()
    info = {"detail": ""}
    try:
        yield info
        elapsed = time.perf_counter() - t0
        if limit is not None:
            assert elapsed < limit, f"runtime {elapsed:.1f}s exceeds {limit}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - t0
        line = f"{title} ({elapsed:.1f}s): {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        ACCEPTANCE_RESULTS[k] = (False, line)
        print(f"criterion {k}: FAIL  {line}")
        raise
    line = f"{title} ({elapsed:.1f}s) {info['detail']}".rstrip()
    ACCEPTANCE_RESULTS[k] = (True, line)
    print(f"criterion {k}: PASS  {line}")


def test_criterion_01_fragility_law():
    with criterion(1, "fragility equals tanh(beta h)", limit=10) as info:
        worst = 0.0
        for family, param in (("repetition", 3), ("ising2d", 2), ("surface2d", 2)):
            code = builtin_code(family, param)
            for beta, h in itertools.product(BETAS, HS):
                value = fragility_expectation(code, beta, h)
                worst = max(worst, abs(value - math.tanh(beta * h)))
        assert worst < 1e-9, f"max deviation {worst:.3e}"
        info["detail"] = f"max |<Z>-tanh| = {worst:.2e}"


def test_criterion_02_bogoliubov_bounds():
    with criterion(2, "fragility bounds hold with non-negative margin", limit=120) as info:
        margins = []
        for family, param in (("repetition", 3), ("ising2d", 2), ("surface2d", 2)):
            code = builtin_code(family, param)
            for beta in BETAS:
                report = bogoliubov_check(code, beta, HS, raise_on_violation=False)
                margins.append(report.min_margin)
        bs = builtin_code("baconshor2d", 3)
        P9 = lambda t: pauli_from_string(t, 9)  # noqa: E731
        pairs = [(None, P9("X0 X3")), (P9("Z0 Z1"), None), (P9("X0 X3"), P9("Z1 Z2")), (P9("Z4 Z5"), P9("X1 X4"))]
        for beta in BETAS:
            report = bogoliubov_check(bs, beta, HS, pairs, raise_on_violation=False)
            assert len(report.points) == len(HS) * (1 + len(pairs))
            margins.append(report.min_margin)
        worst = min(margins)
        assert worst >= 0.0, f"negative margin {worst:.3e}"
        info["detail"] = f"min margin = {worst:.3e}"


def test_criterion_03_ec_fragility_vanishes():
    with criterion(3, "error-corrected expectation vanishes as h -> 0") as info:
        code = builtin_code("repetition", 3)
        dec = build_decoder(code)
        grid = (0.0,) + HS
        details = []
        for beta in BETAS:
            vals = ec_fragility_curve(code, beta, grid, dec)
            assert abs(vals[0]) < 1e-12
            assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:])), f"not monotone at beta={beta}: {vals}"
            details.append(vals[1])
        # the small-h value keeps shrinking as h does
        fine = ec_fragility_curve(code, 1.0, (1e-2, 1e-3, 1e-4), dec)
        assert fine[0] > fine[1] > fine[2] >= 0 and fine[2] < 1e-4
        bare = fragility_expectation(code, 1.0, 0.01)
        assert fine[0] < bare
        info["detail"] = f"<Z_ec> at h=0.01: {max(details):.3e} (bare {bare:.3e})"


def test_criterion_04_stabilizer_closed_form():
    with criterion(4, "dense Z_s matches the closed form") as info:
        worst = 0.0
        for family, param in (("repetition", 3), ("ising2d", 2)):
            code = builtin_code(family, param)
            spec = sector_spectra(code, "dense")
            n, r = code.n, spec.r
            # eigenvalue of each gauge term on each sector, read off the projector
            signs = {}
            for s in spec.levels:
                Ps = sector_projector(code, s, "expansion")
                signs[s] = [np.trace(Ps @ dense(g)).real / np.trace(Ps).real for _, g in code.gauge_terms]
            for beta in (0.5, 1.0, 2.0):
                ga = partition_functions(spec, beta)
                for s, sig in signs.items():
                    assert all(abs(abs(v) - 1) < 1e-12 for v in sig)
                    energy = sum(rr * v for rr, v in zip(code.couplings, sig))
                    closed = 2 ** (n - r) * math.exp(-beta * energy)
                    worst = max(worst, abs(ga.Z(s) - closed) / closed)
        assert worst < 1e-10, f"relative deviation {worst:.3e}"
        info["detail"] = f"max relative deviation {worst:.2e}"


def test_criterion_05_subsystem_blocks():
    with criterion(5, "Bacon-Shor block structure", limit=30) as info:
        code = builtin_code("baconshor2d", 3)
        spec = sector_spectra(code, "dense")
        assert len(spec.levels) == 16
        bases = sector_basis(code)
        assert sorted(V.shape[1] for V in bases.values()) == [32] * 16
        H = hamiltonian(code)
        off = 0.0
        for s, Vs in bases.items():
            HV = H @ Vs
            for t, Vt in bases.items():
                if s != t:
                    off = max(off, np.linalg.norm(Vt.conj().T @ HV, 2))
        assert off < 1e-12, f"off-block norm {off:.3e}"
        mults = [m for lv in spec.levels.values() for _, m in lv]
        assert sum(mults) == 512
        assert all(m % 2 == 0 for m in mults)
        tol = 1e-9 * sum(abs(r) for r in code.couplings)
        others = [lv[0][0] for s, lv in spec.levels.items() if not s.is_zero]
        assert min(others) > spec.ground_energy + tol
        info["detail"] = f"max off-block {off:.1e}, gap {spec.gap:.6f}"


def _builtins():
    out = [builtin_code(f, 2) for f in FAMILIES]
    out += [builtin_code("repetition", 3), builtin_code("repetition", 5), builtin_code("baconshor2d", 3),
            builtin_code("ising2d", 3), builtin_code("surface2d", 3)]
    return out


def test_criterion_06_relaxation_rate():
    with criterion(6, "relaxation rate and Golden-Thompson bound") as info:
        checked = 0
        for code in _builtins():
            dec = build_decoder(code)
            ga = partition_functions(sector_spectra(code), 0.0)
            for letters in ("XYZ", "X"):
                cls = classify_syndromes(code, dec, single_qubit_errors(code.n, letters))
                eps = relaxation_rate(ga, cls).epsilon
                assert eps == cls.count_bad / 2 ** dec.r, f"{code.name}: {eps} vs {cls.count_bad}/2^{dec.r}"
                checked += 1
        ratios = []
        for code in (builtin_code("repetition", 3), builtin_code("repetition", 5), builtin_code("baconshor2d", 3)):
            dec = build_decoder(code)
            spec = sector_spectra(code)
            for letters in ("XYZ", "X"):
                cls = classify_syndromes(code, dec, single_qubit_errors(code.n, letters))
                for beta in (0.0, 0.2, 1.0, 5.0):
                    eps = relaxation_rate(partition_functions(spec, beta), cls).epsilon
                    gt = gt_bound(code, beta, cls, dec).bound
                    assert gt >= eps * (1 - GT_REL), f"{code.name} beta={beta}: {gt} < {eps}"
                    if beta == 0.0:
                        assert abs(gt - eps) <= GT_REL * max(eps, 1e-300)
                    elif eps > 0:
                        ratios.append(gt / eps)
        info["detail"] = f"{checked} beta=0 counts exact; bound/eps in [{min(ratios):.3f}, {max(ratios):.3g}]"


def test_criterion_07_good_syndrome_protection():
    with criterion(7, "error-corrected logical protected on good sectors") as info:
        worst = 0.0
        total = 0
        # the repetition code only has good syndromes for bit flips; every single-qubit E is then checked
        for code, letters in ((builtin_code("repetition", 5), "X"), (builtin_code("baconshor2d", 3), "XYZ")):
            dec = build_decoder(code)
            cls = classify_syndromes(code, dec, single_qubit_errors(code.n, letters))
            assert cls.count_good > 0
            Zec = ec_logicals(code, dec).Z
            for s in cls.good_syndromes():
                Ps = sector_projector(code, s)
                for E in single_qubit_errors(code.n, "XYZ"):
                    M = dense(E)
                    worst = max(worst, np.linalg.norm((M @ Zec - Zec @ M) @ Ps, 2))
                    total += 1
        assert worst < 1e-12, f"max norm {worst:.3e}"
        info["detail"] = f"{total} (s, E) pairs, max norm {worst:.1e}"


def _storage_run(code, times, etas):
    dec = build_decoder(code)
    model = davies_model(code, 2.0, 1.0, "single-x")
    couplings = [P for P in single_qubit_errors(code.n, "X")]
    cls = classify_syndromes(code, dec, couplings)
    reports = [storage_report(code, dec, model, eta, times, cls) for eta in etas]
    return dec, model, reports


def test_criterion_08_storage_bound():
    with criterion(8, "storage drift below the bound", limit=300) as info:
        rng = np.random.default_rng(8)
        times = np.linspace(0.0, 10.0, 20)
        etas = [np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])]
        etas.append(rng.normal(size=3))
        etas[-1] *= 0.9 / np.linalg.norm(etas[-1])
        code = builtin_code("repetition", 5)
        dec, model, reports = _storage_run(code, times, etas)
        ratio = max(r.max_ratio for r in reports)
        for rep in reports:
            assert len(rep.rows) == 20 and rep.method == "exact"
            for row in rep.rows:
                assert row.drift <= row.bound + 1e-9
        residual = trace_norm(apply_generator(model, gibbs_state(model.H, model.beta), True))
        assert residual < 1e-8
        ec = ec_logicals(code, dec)
        round_trip = 0.0
        for _ in range(20):
            v = rng.normal(size=3)
            gamma = v / np.linalg.norm(v) * rng.uniform()
            for mode in ("thermal", "ground"):
                enc = encode(code, dec, gamma, mode, 2.0, ec)
                round_trip = max(round_trip, np.abs(decode(code, dec, enc.rho, ec) - gamma).max())
        assert round_trip < 1e-10
        t0 = time.perf_counter()
        small = builtin_code("repetition", 3)
        _, _, small_reports = _storage_run(small, times, etas[:1])
        assert small_reports[0].method == "exact"
        assert time.perf_counter() - t0 < 30
        info["detail"] = (
            f"epsilon={reports[0].epsilon:.6g}, max drift/bound={ratio:.3g}, "
            f"||L(rho_beta)||_1={residual:.1e}, round trip {round_trip:.1e}"
        )


def test_criterion_09_generator_norm():
    with criterion(9, "sampled generator norm below 2 K h_max") as info:
        model = davies_model(builtin_code("repetition", 5), 2.0, 1.0, "single-x")
        nb = norm_bounds(model, samples=600, seed=9)
        assert nb.samples >= 500
        assert nb.sampled_lower <= nb.upper, f"{nb.sampled_lower} > {nb.upper}"
        info["detail"] = f"sampled {nb.sampled_lower:.4f} <= {nb.upper:g}"


def test_criterion_10_gapped_bound():
    with criterion(10, "gapped bound for ground encoding") as info:
        code = builtin_code("repetition", 5)
        dec = build_decoder(code)
        parts = []
        for beta in (1.0, 2.0, 3.0):
            model = davies_model(code, beta, 1.0, "single-x")
            assert abs(model.gap - 2.0) < 1e-12
            try:
                report = gapped_bound_check(code, dec, model, samples=10, seed=int(beta))
            except BoundViolation as exc:
                pytest.fail(str(exc))
            assert not report.skipped, report.reason
            assert len(report.measured) == 10
            assert report.max_measured <= report.bound
            assert report.bound == pytest.approx(10 * math.exp(-2 * beta), rel=1e-12)
            assert report.zero_frequency_residual <= 1e-10
            assert report.lowering_residual <= 1e-10
            parts.append(f"beta={beta:g}: {report.max_measured:.3g} <= {report.bound:.4g}")
        info["detail"] = "; ".join(parts)


# -- criterion 11: dense-matrix brute force for the symplectic layer ---------------


def _all_dense(n):
    """Letter strings over n qubits, their PauliOperators and their kron matrices."""
    letters = ["".join(t) for t in itertools.product("IXYZ", repeat=n)]
    ops = [pauli_from_string(" ".join(f"{a}{j}" for j, a in enumerate(s) if a != "I"), n) for s in letters]
    mats = np.array([kron_all([{"I": I2, "X": X2, "Y": Y2, "Z": Z2}[a] for a in s]) for s in letters])
    return ops, mats


def _dense_members(elems, mats):
    """Boolean mask over ``mats``: proportional to some element of ``elems``."""
    d = mats.shape[1]
    E = np.array(elems)
    overlap = np.abs(np.einsum("kij,pij->pk", E.conj(), mats))
    return (np.abs(overlap - d) < 1e-9).any(axis=1)


def _dense_commutes(mats, gmats):
    if not len(gmats):
        return np.ones(len(mats), dtype=bool)
    AB = np.einsum("pij,gjk->pgik", mats, gmats)
    BA = np.einsum("gij,pjk->pgik", gmats, mats)
    return np.all(np.abs(AB - BA).max(axis=(2, 3)) < 1e-12, axis=1)


class _Counter:
    def __init__(self):
        self.cases = {}

    def add(self, op, k=1):
        self.cases[op] = self.cases.get(op, 0) + k


def _check_group(n, gens, ops, mats, counter, probe=None):
    """Compare every symplectic operation on ``<gens>`` with dense brute force.

    ``probe`` restricts the membership checks to one index of ``ops``;
    ``None`` checks all of them.
    """
    gmats = np.array([dense(g) for g in gens]) if gens else np.zeros((0, 1 << n, 1 << n))
    elems = enumerate_group(list(gmats), n)
    basis = group_basis(gens, n=n)
    assert 1 << basis.rank == len(elems)
    counter.add("rank")
    idx = range(len(ops)) if probe is None else [probe]
    sub_ops = [ops[i] for i in idx]
    sub_mats = mats[list(idx)]
    in_g = _dense_members(elems, sub_mats)
    comm = _dense_commutes(sub_mats, gmats)
    cent = centralizer_basis(basis)
    stab = stabilizer_of(basis)
    for P, a, c in zip(sub_ops, in_g, comm):
        assert group_contains(basis, P) == bool(a), f"contains {P} in <{', '.join(map(str, gens))}>"
        assert group_contains(cent, P) == bool(c), f"centralizer {P}"
        assert group_contains(stab, P) == bool(a and c), f"stabilizer {P}"
    counter.add("contains", len(sub_ops))
    counter.add("centralizer", len(sub_ops))
    counter.add("stabilizer", len(sub_ops))
    # the centre's size, counted densely
    centre = [E for E in elems if all(np.allclose(E @ G, G @ E) for G in gmats)]
    assert 1 << stab.rank == len(centre)
    for pair in bare_logicals(basis):
        X, Z = dense(pair.xbar), dense(pair.zbar)
        assert np.allclose(X @ Z, -Z @ X)
        for G in gmats:
            assert np.allclose(X @ G, G @ X) and np.allclose(Z @ G, G @ Z)
        assert not _dense_members(elems, np.array([X, Z])).any()
        counter.add("bare_logicals")
    k2 = cent.rank - stab.rank
    assert len(bare_logicals(basis)) * 2 == k2


def test_criterion_11_cross_oracle():
    with criterion(11, "symplectic layer against dense brute force") as info:
        counter = _Counter()
        # exhaustive: every group with at most two generators for n <= 2, and for n = 3
        # every single generator and every generator pair, each probed with all 4^n Paulis
        for n in (1, 2, 3):
            ops, mats = _all_dense(n)
            for P, Q in itertools.product(range(len(ops)), repeat=2):
                R = ops[P] * ops[Q]
                assert np.allclose(dense(R), mats[P] @ mats[Q])
                AB, BA = mats[P] @ mats[Q], mats[Q] @ mats[P]
                assert ops[P].commutes(ops[Q]) == np.allclose(AB, BA)
            counter.add("multiply/commutes", len(ops) ** 2)
            _check_group(n, [], ops, mats, counter)
            for i in range(len(ops)):
                _check_group(n, [ops[i]], ops, mats, counter)
            pairs = itertools.combinations(range(1, len(ops)), 2)
            for i, j in pairs:
                _check_group(n, [ops[i], ops[j]], ops, mats, counter)
        exhaustive = dict(counter.cases)

        # random: 1000 cases per operation for n <= 5
        rng = np.random.default_rng(11)
        dense_cache = {n: _all_dense(n) for n in (4, 5)}
        for case in range(1000):
            n = int(rng.integers(1, 6))
            if n <= 3:
                ops, mats = _all_dense(n)
            else:
                ops, mats = dense_cache[n]
            gens = [ops[int(rng.integers(len(ops)))] for _ in range(int(rng.integers(1, 5)))]
            _check_group(n, gens, ops, mats, counter, probe=int(rng.integers(len(ops))))
            P = PauliOperator(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)), int(rng.integers(4)))
            Q = PauliOperator(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)), int(rng.integers(4)))
            assert np.allclose(dense(P * Q), dense(P) @ dense(Q))
            A, B = dense(P), dense(Q)
            assert P.commutes(Q) == np.allclose(A @ B, B @ A)

        # syndromes of the builtins used above, against dense anticommutation
        synd = 0
        for code in (builtin_code("repetition", 3), builtin_code("repetition", 5),
                     builtin_code("ising2d", 2), builtin_code("surface2d", 2)):
            smats = [dense(g) for g in stabilizer_group(code).rows]
            for _ in range(250):
                E = PauliOperator.from_bits(code.n, int(rng.integers(1 << code.n)), int(rng.integers(1 << code.n)))
                M = dense(E)
                expected = tuple(0 if np.allclose(M @ S, S @ M) else 1 for S in smats)
                assert syndrome_of(code, E).bits == expected
                synd += 1
        # the builtin stabilizer groups and logicals used by the criteria
        for code in (builtin_code("repetition", 3), builtin_code("repetition", 5),
                     builtin_code("ising2d", 2), builtin_code("surface2d", 2)):
            ops, mats = _all_dense(code.n)
            _check_group(code.n, list(code.generators), ops, mats, counter)
            pair = designated_logicals(code)
            X, Z = dense(pair.xbar), dense(pair.zbar)
            assert np.allclose(X @ Z, -Z @ X)
            for g in code.generators:
                G = dense(g)
                assert np.allclose(X @ G, G @ X) and np.allclose(Z @ G, G @ Z)
        info["detail"] = (
            "exhaustive n<=3: " + ", ".join(f"{k} {v}" for k, v in sorted(exhaustive.items()))
            + f"; random n<=5: 1000 groups; syndromes {synd}"
        )
