#include "cupcode/sparse_sim.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <vector>

using namespace cupcode;

namespace {

Code simplex_code() {
    return build_2d_code(build_triangle_lattice(1, ComplexKind::simplicial));
}

bool state_equal(SparseState a, SparseState b) {
    a.canonicalize();
    b.canonicalize();
    return a.denom_exp == b.denom_exp && a.amps == b.amps;
}

bool unit_norm(const SparseState& s) {
    auto [num, e2] = s.norm2();
    return e2 < 62 && num == (int64_t(1) << e2);
}

// random sparse state over the flat configurations, zeta-power amplitudes
SparseState random_state(const Code& code, const std::vector<Config>& flats, Rng& rng) {
    SparseState s;
    s.code = &code;
    for (const Config& x : flats)
        if (rng.bit())
            s.amps[x] = Zeta16::zeta_pow(int(rng.below(16)));
    if (s.amps.empty())
        s.amps[flats[0]] = Zeta16::one();
    return s;
}

DiagOp simplex_phase_op(const Code& code) {
    DiagOp op;
    op.cx = &code.cx();
    op.ncolors = code.ncolors;
    op.name = "test-phase";
    op.terms.push_back({4, "", {DiagFactor::gauge(0), DiagFactor::gauge(2)}});
    return op;
}

} // namespace

TEST(ScaledZeta, RingBasics) {
    ScaledZeta two{Zeta16::from_int(2), 0};
    ScaledZeta sq{Zeta16::sqrt2() * Zeta16::sqrt2(), 0};
    EXPECT_TRUE(two.equals(sq));

    // 4/2^2 reduces to 1
    ScaledZeta q{Zeta16::from_int(4), 2};
    EXPECT_TRUE(q.is_one());
    EXPECT_EQ(q.as_zeta_power(), 0);

    // sqrt2/2 is irreducible but squares to 1/2
    ScaledZeta h{Zeta16::sqrt2(), 1};
    EXPECT_EQ(h.as_zeta_power(), -1);
    ScaledZeta hh{h.z * h.z, h.denom_exp * 2};
    EXPECT_TRUE(hh.equals(ScaledZeta{Zeta16::one(), 1}));

    ScaledZeta z14{Zeta16::zeta_pow(14), 0};
    EXPECT_EQ(z14.as_zeta_power(), 14);
}

TEST(FlatConfigs, TorusCount) {
    Code code = build_2d_code(build_torus_nd({2, 2}, ComplexKind::cubical));
    std::vector<Config> flats = flat_configs(code);
    EXPECT_EQ(flats.size(), 32768u);
    EXPECT_EQ(flats[0], Config{});
    EXPECT_TRUE(is_flat(code, flats[1]));
    EXPECT_TRUE(is_flat(code, flats.back()));
}

TEST(Apply, CnotLayerInvolution) {
    Code code = simplex_code();
    std::vector<Config> flats = flat_configs(code);
    CnotLayer v{{{0, 1}, {2, 1}}};
    Rng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        SparseState s = random_state(code, flats, rng);
        SparseState t = s;
        apply_cnot_layer(t, v);
        apply_cnot_layer(t, v);
        EXPECT_TRUE(state_equal(s, t));
    }
}

TEST(Apply, DiagInverseUndoes) {
    Code code = simplex_code();
    std::vector<Config> flats = flat_configs(code);
    DiagOp op = simplex_phase_op(code);
    Rng rng(8);
    SparseState s = random_state(code, flats, rng);
    SparseState t = s;
    apply_diag(t, op);
    apply_diag(t, op, -1);
    EXPECT_TRUE(state_equal(s, t));
}

TEST(Apply, UnitaryLayersPreserveInner) {
    Code code = simplex_code();
    std::vector<Config> flats = flat_configs(code);
    CnotLayer v{{{0, 1}, {2, 1}}};
    DiagOp op = simplex_phase_op(code);
    Rng rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        SparseState a = random_state(code, flats, rng);
        SparseState b = random_state(code, flats, rng);
        ScaledZeta before = a.inner(b);
        apply_cnot_layer(a, v);
        apply_cnot_layer(b, v);
        EXPECT_TRUE(a.inner(b).equals(before));
        apply_diag(a, op);
        apply_diag(b, op);
        EXPECT_TRUE(a.inner(b).equals(before));
    }
}

TEST(Apply, NormTwoWaysAgree) {
    Code code = simplex_code();
    std::vector<Config> flats = flat_configs(code);
    Rng rng(10);
    for (int rep = 0; rep < 10; ++rep) {
        SparseState s = random_state(code, flats, rng);
        ScaledZeta self = s.inner(s);
        EXPECT_TRUE(self.z.is_rational());
        auto [num, e2] = s.norm2();
        // self.z / 2^self.denom == num / 2^e2
        EXPECT_EQ(self.z.c[0] << e2, num << self.denom_exp) << "rep " << rep;
    }
}

TEST(Project, ZStabilizersFixFlatConfig) {
    Code code = simplex_code();
    SparseState s = SparseState::basis_state(code, Config{});
    for (const StabilizerGenerator& g : code.zgens)
        project(s, g);
    EXPECT_TRUE(state_equal(s, SparseState::basis_state(code, Config{})));
}

TEST(Project, Idempotent) {
    Code code = simplex_code();
    ASSERT_EQ(code.xgens.size(), 1u);
    SparseState once = SparseState::basis_state(code, Config{});
    project(once, code.xgens[0]);
    SparseState twice = once;
    project(twice, code.xgens[0]);
    EXPECT_TRUE(state_equal(once, twice));
}

TEST(Project, SupportBound) {
    Code code = simplex_code();
    std::vector<Config> flats = flat_configs(code);
    for (const Config& x : flats) {
        SparseState s = SparseState::basis_state(code, x);
        for (const StabilizerGenerator& g : code.xgens)
            project(s, g);
        EXPECT_LE(s.amps.size(), size_t(1) << code.xgens.size());
        EXPECT_FALSE(s.is_zero());
    }
}

TEST(Codespace, SectorCounts) {
    struct Row {
        Code code;
        size_t dim;
    };
    std::vector<Row> rows;
    rows.push_back({simplex_code(), 2});
    rows.push_back({build_2d_code(build_triangle_lattice(2, ComplexKind::cubical)), 2});
    rows.push_back({build_3d_code(build_tetrahedron(1)), 2});
    rows.push_back({build_bilayer_cs_code(build_triangle_lattice(1, ComplexKind::simplicial)), 4});
    for (const Row& r : rows) {
        std::vector<SparseState> basis = codespace_basis(r.code);
        EXPECT_EQ(basis.size(), r.dim) << r.code.name;
        for (size_t a = 0; a < basis.size(); ++a) {
            EXPECT_FALSE(basis[a].is_zero());
            for (size_t b = a + 1; b < basis.size(); ++b)
                EXPECT_TRUE(basis[a].inner(basis[b]).is_zero())
                    << r.code.name << " sectors " << a << "," << b;
        }
    }
}

TEST(Logical, IdentityCircuit) {
    for (Code code : {simplex_code(),
                      build_bilayer_cs_code(build_triangle_lattice(1, ComplexKind::simplicial))}) {
        LogicalMatrix m = logical_matrix(code, {});
        std::vector<int> ident(m.dim, 0);
        EXPECT_TRUE(m.equals_diag(ident)) << m.str();
    }
}

TEST(Logical, PauliZEigenvalues) {
    Code code = simplex_code();
    PhasedPauli zop;
    for (auto q : logical_Z(code).at(0))
        zop.z.push_back(q);
    LogicalMatrix m = logical_matrix(code, {CircuitStep::pauli_step(zop)});
    EXPECT_TRUE(m.equals_diag({0, 8})) << m.str();

    Code bl = build_bilayer_cs_code(build_triangle_lattice(1, ComplexKind::simplicial));
    PhasedPauli zr;
    for (auto q : logical_Z(bl).at(0))
        zr.z.push_back(q);
    LogicalMatrix mb = logical_matrix(bl, {CircuitStep::pauli_step(zr)});
    EXPECT_TRUE(mb.equals_diag({0, 8, 0, 8})) << mb.str();
}

TEST(Logical, LeakageIsHardError) {
    Code code = simplex_code();
    PhasedPauli bad;
    bad.x.push_back({0, 0}); // flip one red edge: leaves the flat subspace
    EXPECT_THROW(logical_matrix(code, {CircuitStep::pauli_step(bad)}), std::runtime_error);
}

TEST(Measure, DeterministicZ) {
    Code code = simplex_code();
    PhasedPauli zg;
    zg.z.push_back({0, 1});
    for (uint64_t seed : {1u, 2u, 3u}) {
        Rng rng(seed);
        SparseState s = SparseState::basis_state(code, Config{});
        EXPECT_EQ(measure(s, zg, rng), 1);
        EXPECT_TRUE(state_equal(s, SparseState::basis_state(code, Config{})));
    }
}

TEST(Measure, XGeneratorFairCoin) {
    Code code = simplex_code();
    const StabilizerGenerator& g = code.xgens[0];
    int plus = 0;
    for (uint64_t seed = 1; seed <= 200; ++seed) {
        Rng rng(seed);
        SparseState s = SparseState::basis_state(code, Config{});
        int out = measure(s, g, rng);
        plus += out == 1;
        EXPECT_TRUE(unit_norm(s));
        // repeated measurement is deterministic
        EXPECT_EQ(measure(s, g, rng), out);
        EXPECT_TRUE(unit_norm(s));
    }
    EXPECT_GT(plus, 60);
    EXPECT_LT(plus, 140);
}

TEST(Measure, PostStateIsEigenstate) {
    Code code = simplex_code();
    const StabilizerGenerator& g = code.xgens[0];
    Rng rng(5);
    SparseState s = SparseState::basis_state(code, Config{});
    int out = measure(s, g, rng);
    SparseState t = s;
    apply_generator(t, g);
    ScaledZeta ip = s.inner(t);
    EXPECT_TRUE(ip.equals({Zeta16::from_int(out), 0}));
}

TEST(Normalize, RejectsNonPowerOfTwoNorm) {
    Code code = simplex_code();
    std::vector<Config> flats = flat_configs(code);
    SparseState s;
    s.code = &code;
    s.amps[flats[0]] = Zeta16::one();
    s.amps[flats[1]] = Zeta16::one();
    s.amps[flats[2]] = Zeta16::one();
    EXPECT_THROW(s.normalize(), std::runtime_error);
}

TEST(XGens, CommuteOnFlatSubspace) {
    std::vector<Code> zoo;
    zoo.push_back(build_bilayer_cs_code(build_triangle_lattice(1, ComplexKind::simplicial)));
    zoo.push_back(build_2d_code(build_triangle_lattice(2, ComplexKind::cubical)));
    for (const Code& code : zoo) {
        std::vector<Config> flats = flat_configs(code);
        for (size_t i = 0; i < code.xgens.size(); ++i)
            for (size_t j = i + 1; j < code.xgens.size(); ++j)
                for (const Config& x : flats) {
                    SparseState ab = SparseState::basis_state(code, x);
                    apply_generator(ab, code.xgens[j]);
                    apply_generator(ab, code.xgens[i]);
                    SparseState ba = SparseState::basis_state(code, x);
                    apply_generator(ba, code.xgens[i]);
                    apply_generator(ba, code.xgens[j]);
                    EXPECT_TRUE(state_equal(ab, ba))
                        << code.name << ": " << code.xgens[i].label << " vs "
                        << code.xgens[j].label;
                }
    }
}

TEST(Gsd, TorusTwistedAndUntwisted) {
    CellComplex cx = build_torus_nd({2, 2}, ComplexKind::cubical);
    EXPECT_EQ(gsd(build_2d_code(cx)), 22);
    EXPECT_EQ(gsd(build_2d_code(cx, false)), 64);
    // the Gauss-sum path must agree with direct enumeration
    EXPECT_EQ(gsd(build_2d_code(cx), 0), 22);
    EXPECT_EQ(gsd(build_2d_code(cx, false), 0), 64);
}

TEST(Gsd, RejectsBoundedComplex) {
    EXPECT_THROW(gsd(simplex_code()), std::runtime_error);
}
