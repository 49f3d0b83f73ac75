import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import Z2, dense
from qmem.codespec import FAMILIES, builtin_code, parse_code
from qmem.eclayer import build_decoder
from qmem.errors import AmbiguousGroundError, InputError, SizeLimitError
from qmem.sectors import (
    Syndrome,
    all_syndromes,
    cluster_levels,
    ground_projector,
    hamiltonian,
    oriented_generators,
    sector_basis,
    sector_projector,
    sector_spectra,
)

I2 = np.eye(2)


class TestSyndrome:
    def test_xor(self):
        assert Syndrome((1, 0, 1)) + Syndrome((1, 1, 0)) == Syndrome((0, 1, 1))

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            Syndrome((1,)) + Syndrome((1, 0))

    def test_string_forms(self):
        s = Syndrome.from_string("101")
        assert str(s) == "101" and s.index == 5 and s.r == 3
        with pytest.raises(InputError):
            Syndrome.from_string("12")

    @given(st.integers(1, 12).flatmap(lambda r: st.tuples(st.just(r), st.integers(0, (1 << r) - 1))))
    def test_index_round_trip(self, ri):
        r, i = ri
        assert Syndrome.from_index(i, r).index == i

    def test_all_syndromes_zero_first(self):
        ss = all_syndromes(3)
        assert len(ss) == 8 and ss[0].is_zero and ss[0] == Syndrome.zero(3)

    def test_limit(self):
        with pytest.raises(SizeLimitError):
            all_syndromes(21)


class TestHamiltonian:
    def test_repetition_against_kron(self):
        H = hamiltonian(builtin_code("repetition", 3))
        expected = -np.kron(np.kron(Z2, Z2), I2) - np.kron(I2, np.kron(Z2, Z2))
        np.testing.assert_allclose(H, expected)

    def test_bacon_shor_against_oracle(self):
        code = builtin_code("baconshor2d", 3)
        expected = sum(r * dense(g) for r, g in code.gauge_terms)
        np.testing.assert_allclose(hamiltonian(code), expected, atol=1e-12)


class TestSpectra:
    def test_repetition_levels(self):
        spec = sector_spectra(builtin_code("repetition", 3))
        assert spec.method == "commuting"
        assert spec.levels == {
            Syndrome((0, 0)): ((-2.0, 2),),
            Syndrome((1, 0)): ((0.0, 2),),
            Syndrome((0, 1)): ((0.0, 2),),
            Syndrome((1, 1)): ((2.0, 2),),
        }
        assert spec.gap == 2.0 and spec.ground_energy == -2.0
        assert spec.ground_sector.is_zero

    @pytest.mark.parametrize("family", [f for f in FAMILIES if f != "baconshor2d"])
    def test_dense_matches_commuting(self, family):
        code = builtin_code(family, 2)
        a = sector_spectra(code, "dense")
        b = sector_spectra(code, "commuting")
        assert a.levels.keys() == b.levels.keys()
        for s in a.levels:
            assert len(a.levels[s]) == len(b.levels[s])
            for (ea, ma), (eb, mb) in zip(a.levels[s], b.levels[s]):
                assert ma == mb and abs(ea - eb) < 1e-10
        assert abs(a.gap - b.gap) < 1e-10

    @pytest.mark.parametrize("family, param", [(f, 2) for f in FAMILIES] + [("baconshor2d", 3)])
    def test_energies_match_full_diagonalisation(self, family, param):
        code = builtin_code(family, param)
        spec = sector_spectra(code)
        assert len(spec.energies()) == 1 << code.n
        np.testing.assert_allclose(spec.energies(), np.linalg.eigvalsh(hamiltonian(code)), atol=1e-9)

    def test_bacon_shor(self):
        spec = sector_spectra(builtin_code("baconshor2d", 3))
        assert spec.method == "dense"
        assert spec.ground_sector.is_zero
        assert spec.levels[Syndrome.zero(4)][0][1] == 2  # the encoded qubit
        assert sum(m for lv in spec.levels.values() for _, m in lv) == 512
        assert abs(spec.gap - 0.5176123277844829) < 1e-9
        assert abs(spec.ground_energy - -7.790213031855071) < 1e-9
        assert all(spec.sector_dimension(s) == 32 for s in spec.levels)

    def test_commuting_refused_for_nonabelian(self):
        with pytest.raises(InputError):
            sector_spectra(builtin_code("baconshor2d", 3), "commuting")

    def test_unknown_method(self):
        with pytest.raises(InputError):
            sector_spectra(builtin_code("repetition", 3), "magic")

    def test_positive_coupling_relabels_ground(self):
        code = parse_code("qubits: 2\ngauge: 1.5 Z0 Z1\n")
        spec = sector_spectra(code)
        assert spec.ground_sector == Syndrome((1,))
        assert str(spec.generators[0]) == "- Z0 Z1"
        assert spec.levels[Syndrome((0,))] == ((-1.5, 2),)
        assert spec.levels[Syndrome((1,))] == ((1.5, 2),)

    def test_ambiguous_ground(self):
        code = parse_code("qubits: 2\ngauge: -1 Z0 Z1\ngauge: 1 Z0 Z1\ngauge: -1 Z0\n")
        # Z0 Z1 cancels: two sectors share the minimum -1
        with pytest.raises(AmbiguousGroundError):
            sector_spectra(code)

    def test_single_level_gap_zero(self):
        code = parse_code("qubits: 1\ngauge: 1 X0\ngauge: 1 Z0\ngauge: 1 Y0\n")
        spec = sector_spectra(code)
        assert spec.r == 0 and spec.gap == pytest.approx(2 * np.sqrt(3))

    def test_as_dict(self):
        d = sector_spectra(builtin_code("repetition", 3)).as_dict()
        assert d["sectors"][0]["syndrome"] == "00"
        assert d["gap"] == 2.0


class TestDenseCapWithCache:
    def test_cached_spectrum_still_respects_cap(self, monkeypatch):
        code = builtin_code("ising2d", 2)
        sector_spectra(code, "dense")
        monkeypatch.setenv("QMEM_DENSE_LIMIT", "3")
        with pytest.raises(SizeLimitError):
            sector_spectra(code, "dense")
        with pytest.raises(SizeLimitError):
            sector_basis(code)
        # the closed form never builds a matrix
        assert sector_spectra(code, "commuting").r == 3


class TestClusterLevels:
    def test_merges_within_tolerance(self):
        assert cluster_levels([1.0, 0.0, 1.0 + 1e-12, 2.0], 1e-9) == ((0.0, 1), (1.0 + 5e-13, 2), (2.0, 1))

    def test_keeps_separate(self):
        assert len(cluster_levels([0.0, 1e-6], 1e-9)) == 2


class TestProjectors:
    @pytest.mark.parametrize("family, param", [("repetition", 3), ("ising2d", 2), ("surface2d", 2), ("baconshor2d", 3)])
    def test_three_constructions_agree(self, family, param):
        code = builtin_code(family, param)
        dec = build_decoder(code)
        for s in all_syndromes(dec.r):
            A = sector_projector(code, s, "basis")
            B = sector_projector(code, s, "expansion")
            C = sector_projector(code, s, "conjugation", decoder=dec)
            np.testing.assert_allclose(A, B, atol=1e-10)
            np.testing.assert_allclose(A, C, atol=1e-10)

    def test_resolution_and_orthogonality(self):
        code = builtin_code("repetition", 3)
        Ps = [sector_projector(code, s) for s in all_syndromes(2)]
        np.testing.assert_allclose(sum(Ps), np.eye(8), atol=1e-12)
        for i, A in enumerate(Ps):
            np.testing.assert_allclose(A @ A, A, atol=1e-12)
            assert abs(np.trace(A) - 2) < 1e-12
            for B in Ps[i + 1:]:
                np.testing.assert_allclose(A @ B, 0, atol=1e-12)

    def test_projectors_commute_with_hamiltonian(self):
        code = builtin_code("baconshor2d", 3)
        H = hamiltonian(code)
        for s, V in sector_basis(code).items():
            P = V @ V.conj().T
            np.testing.assert_allclose(P @ H, H @ P, atol=1e-10)

    def test_oriented_generators_stabilize_zero_sector(self):
        code = parse_code("qubits: 3\ngauge: 1 Z0 Z1\ngauge: -1 Z1 Z2\n")
        P0 = sector_projector(code, Syndrome.zero(2))
        for g in oriented_generators(code):
            np.testing.assert_allclose(dense(g) @ P0, P0, atol=1e-12)

    def test_wrong_length(self):
        with pytest.raises(InputError):
            sector_projector(builtin_code("repetition", 3), Syndrome((0,)))

    def test_conjugation_needs_decoder(self):
        with pytest.raises(InputError):
            sector_projector(builtin_code("repetition", 3), Syndrome((0, 0)), "conjugation")

    def test_ground_projector_repetition(self):
        P = ground_projector(builtin_code("repetition", 3))
        expected = np.zeros((8, 8))
        expected[0, 0] = expected[7, 7] = 1
        np.testing.assert_allclose(P, expected, atol=1e-12)
