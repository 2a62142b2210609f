#include "cupcode/cochain.hpp"
#include "cupcode/f2.hpp"
#include "cupcode/rng.hpp"

#include <gtest/gtest.h>

using namespace cupcode;

namespace {

Cochain random_cochain(const CellComplex& cx, int degree, int modulus, Rng& rng) {
    Cochain f = make_cochain(cx, degree, modulus);
    for (int& x : f.v)
        x = int(rng.below(uint64_t(modulus)));
    return f;
}

// random element of ker d on 1-cochains mod 2
Cochain random_cocycle1(const CellComplex& cx, Rng& rng) {
    F2Matrix m(cx.ncells(2), cx.ncells(1));
    for (int i = 0; i < cx.ncells(2); ++i)
        for (auto [e, s] : cx.boundary(2, i))
            m.row(i).flip(e);
    auto basis = m.kernel_basis();
    Cochain f = make_cochain(cx, 1, 2);
    for (const F2Vec& b : basis)
        if (rng.bit())
            for (int e = 0; e < cx.ncells(1); ++e)
                f.v[e] ^= b.get(e);
    return f;
}

Cochain combine(const Cochain& a, const Cochain& b, int ca, int cb) {
    Cochain r = a;
    for (size_t i = 0; i < r.v.size(); ++i) {
        int m = r.modulus;
        r.v[i] = ((ca * a.v[i] + cb * b.v[i]) % m + m) % m;
    }
    return r;
}

bool is_zero(const Cochain& f) {
    for (int x : f.v)
        if (x != 0)
            return false;
    return true;
}

std::vector<CellComplex> survey_complexes() {
    std::vector<CellComplex> out;
    out.push_back(build_triangle_lattice(2, ComplexKind::simplicial));
    out.push_back(build_triangle_lattice(2, ComplexKind::cubical));
    out.push_back(build_tetrahedron(2));
    out.push_back(build_torus({2, 2}, ComplexKind::cubical));
    out.push_back(build_torus({2, 2}, ComplexKind::simplicial));
    out.push_back(build_torus({1, 1, 1}, ComplexKind::cubical));
    out.push_back(refine_cubical(build_torus({1, 1, 1}, ComplexKind::cubical)));
    return out;
}

} // namespace

TEST(Cochain, CoboundarySquaredVanishes) {
    Rng rng(101);
    for (const CellComplex& cx : survey_complexes())
        for (int m : {2, 16})
            for (int k = 0; k + 2 <= cx.dim; ++k)
                for (int rep = 0; rep < 20; ++rep) {
                    Cochain f = random_cochain(cx, k, m, rng);
                    EXPECT_TRUE(is_zero(coboundary(coboundary(f))));
                }
}

TEST(Cochain, CoboundaryTopDegreeThrows) {
    CellComplex cx = build_triangle_lattice(1, ComplexKind::simplicial);
    Cochain f = make_cochain(cx, 2, 2);
    EXPECT_THROW(coboundary(f), std::runtime_error);
}

TEST(Cochain, ModulusValidation) {
    CellComplex cx = build_triangle_lattice(1, ComplexKind::simplicial);
    for (int m : {2, 4, 8, 16})
        EXPECT_NO_THROW(make_cochain(cx, 1, m));
    for (int m : {0, 1, 3, 6, 32})
        EXPECT_THROW(make_cochain(cx, 1, m), std::runtime_error);
}

TEST(Cochain, SimplicialCupFormula) {
    CellComplex cx = build_triangle_lattice(1, ComplexKind::simplicial);
    Rng rng(5);
    int e01 = cx.subsimplex(2, 0, {0, 1});
    int e02 = cx.subsimplex(2, 0, {0, 2});
    int e12 = cx.subsimplex(2, 0, {1, 2});
    for (int rep = 0; rep < 50; ++rep) {
        Cochain f = random_cochain(cx, 1, 16, rng);
        Cochain g = random_cochain(cx, 1, 16, rng);
        EXPECT_EQ(cup(f, g).v[0], f(e01) * g(e12) % 16);
        Cochain h = random_cochain(cx, 0, 16, rng);
        // front-face / back-face evaluation for the mixed degrees
        Cochain hg = cup(h, g);
        Cochain gh = cup(g, h);
        EXPECT_EQ(hg.v[e02], h(0) * g(e02) % 16);
        EXPECT_EQ(gh.v[e02], g(e02) * h(2) % 16);
    }
}

TEST(Cochain, PlaquetteCupFormula) {
    // on a square with corners 0=(0,0), 1=(1,0), 2=(0,1), 3=(1,1):
    // (f u g)(square) = f(bottom) g(right) - f(left) g(top)
    CellComplex cx = build_triangle_lattice(2, ComplexKind::cubical);
    Rng rng(6);
    for (int p = 0; p < cx.ncells(2); ++p) {
        int bottom = cx.cub_subface(2, p, {0}, 0);
        int right = cx.cub_subface(2, p, {1}, 1);
        int left = cx.cub_subface(2, p, {1}, 0);
        int top = cx.cub_subface(2, p, {0}, 2);
        for (int rep = 0; rep < 25; ++rep) {
            Cochain f = random_cochain(cx, 1, 16, rng);
            Cochain g = random_cochain(cx, 1, 16, rng);
            int want = ((f(bottom) * g(right) - f(left) * g(top)) % 16 + 16) % 16;
            EXPECT_EQ(cup(f, g).v[p], want);
        }
    }
}

TEST(Cochain, CupMismatchErrors) {
    CellComplex a = build_triangle_lattice(1, ComplexKind::simplicial);
    CellComplex b = build_triangle_lattice(1, ComplexKind::simplicial);
    Cochain f = make_cochain(a, 1, 16);
    Cochain g = make_cochain(b, 1, 16);
    EXPECT_THROW(cup(f, g), std::runtime_error);
    Cochain h = make_cochain(a, 1, 2);
    EXPECT_THROW(cup(f, h), std::runtime_error);
}

TEST(Cochain, LiftSquareIdentity) {
    // for a mod-2 cocycle a with 0/1 lift to mod 4: d(lift a) = 2 (lift a u lift a).
    // halving recovers a u a mod 2.
    Rng rng(7);
    for (const CellComplex& cx : {build_torus({2, 2}, ComplexKind::cubical),
                                  build_torus({2, 2}, ComplexKind::simplicial),
                                  build_triangle_lattice(2, ComplexKind::cubical),
                                  build_triangle_lattice(2, ComplexKind::simplicial)}) {
        for (int rep = 0; rep < 25; ++rep) {
            Cochain a = random_cocycle1(cx, rng);
            ASSERT_TRUE(is_cocycle(a));
            Cochain la = lift(a, 4);
            Cochain dla = coboundary(la);
            Cochain twice_sq = cup(la, la);
            for (int& x : twice_sq.v)
                x = 2 * x % 4;
            EXPECT_EQ(dla.v, twice_sq.v);
            Cochain half = divide_by_2(dla);
            EXPECT_EQ(half.modulus, 2);
            Cochain asq = cup(a, a);
            EXPECT_EQ(half.v, asq.v);
        }
    }
}

TEST(Cochain, DivideByTwoOddThrows) {
    CellComplex cx = build_triangle_lattice(1, ComplexKind::simplicial);
    Cochain f = make_cochain(cx, 1, 4);
    f.v[0] = 1;
    EXPECT_THROW(divide_by_2(f), std::runtime_error);
}

TEST(Cochain, Leibniz) {
    Rng rng(8);
    auto check = [&](const CellComplex& cx, int df, int dg) {
        if (df + dg + 1 > cx.dim)
            return;
        for (int rep = 0; rep < 20; ++rep) {
            Cochain f = random_cochain(cx, df, 16, rng);
            Cochain g = random_cochain(cx, dg, 16, rng);
            Cochain lhs = coboundary(cup(f, g));
            int sgn = df % 2 == 0 ? 1 : -1;
            Cochain rhs = combine(cup(coboundary(f), g), cup(f, coboundary(g)), 1, sgn);
            EXPECT_EQ(lhs.v, rhs.v) << cx.name << " degrees " << df << "," << dg;
        }
    };
    for (const CellComplex& cx : survey_complexes()) {
        check(cx, 0, 0);
        check(cx, 0, 1);
        check(cx, 1, 0);
        check(cx, 1, 1);
    }
    // mixed (1,2)/(2,1) need a 4-dimensional complex for the coboundary
    CellComplex t4 = build_torus_nd({1, 1, 1, 1}, ComplexKind::cubical);
    check(t4, 1, 1);
    check(t4, 1, 2);
    check(t4, 2, 1);
}

TEST(Cochain, CupAssociativity) {
    Rng rng(9);
    for (const CellComplex& cx : survey_complexes()) {
        if (cx.dim < 3)
            continue;
        for (int rep = 0; rep < 20; ++rep) {
            Cochain f = random_cochain(cx, 1, 16, rng);
            Cochain g = random_cochain(cx, 1, 16, rng);
            Cochain h = random_cochain(cx, 1, 16, rng);
            Cochain nary = cup({f, g, h});
            EXPECT_EQ(nary.v, cup(cup(f, g), h).v) << cx.name;
            EXPECT_EQ(nary.v, cup(f, cup(g, h)).v) << cx.name;
        }
    }
}

TEST(Cochain, HirschFormula) {
    // (a u b) u1 c = a u (b u1 c) + (a u1 c) u b mod 2,
    // 1000 random triples of 1-cochains on a refined 2x2 patch
    CellComplex cx = refine_cubical(build_triangle_lattice(2, ComplexKind::cubical));
    Rng rng(10);
    for (int rep = 0; rep < 1000; ++rep) {
        Cochain a = random_cochain(cx, 1, 2, rng);
        Cochain b = random_cochain(cx, 1, 2, rng);
        Cochain c = random_cochain(cx, 1, 2, rng);
        Cochain lhs = cup1(cup(a, b), c);
        Cochain rhs = combine(cup(a, cup1(b, c)), cup(cup1(a, c), b), 1, 1);
        ASSERT_EQ(lhs.v, rhs.v) << "failed at triple " << rep;
    }
}

TEST(Cochain, Cup1CoboundaryRelation) {
    // d(f u1 g) = df u1 g + f u1 dg + f u g + g u f mod 2 for 1-cochains
    Rng rng(11);
    for (const CellComplex& cx :
         {refine_cubical(build_triangle_lattice(2, ComplexKind::cubical)),
          refine_cubical(build_torus({1, 1, 1}, ComplexKind::cubical)),
          build_tetrahedron(2)}) {
        for (int rep = 0; rep < 100; ++rep) {
            Cochain f = random_cochain(cx, 1, 2, rng);
            Cochain g = random_cochain(cx, 1, 2, rng);
            Cochain lhs = coboundary(cup1(f, g));
            Cochain rhs = combine(combine(cup1(coboundary(f), g), cup1(f, coboundary(g)), 1, 1),
                                  combine(cup(f, g), cup(g, f), 1, 1), 1, 1);
            ASSERT_EQ(lhs.v, rhs.v) << cx.name;
        }
    }
}

TEST(Cochain, Cup1PointwiseOnEdges) {
    // degree (1,1): f u1 g is the edgewise product
    CellComplex cx = build_tetrahedron(1);
    Rng rng(12);
    Cochain f = random_cochain(cx, 1, 16, rng);
    Cochain g = random_cochain(cx, 1, 16, rng);
    Cochain h = cup1(f, g);
    for (int e = 0; e < cx.ncells(1); ++e)
        EXPECT_EQ(h.v[e], f(e) * g(e) % 16);
}

TEST(Cochain, Cup1RequiresSimplicial) {
    CellComplex cx = build_torus({2, 2}, ComplexKind::cubical);
    Cochain f = make_cochain(cx, 1, 2);
    try {
        cup1(f, f);
        FAIL() << "expected cup1 to reject cubical complexes";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("refinement"), std::string::npos);
    }
}

TEST(Cochain, CocycleSpaceDimensionOnTorus) {
    // [2,2] torus: 8 edges per color, rank of d1 is 3, so dim Z1 = 5
    CellComplex cx = build_torus({2, 2}, ComplexKind::cubical);
    F2Matrix m(cx.ncells(2), cx.ncells(1));
    for (int i = 0; i < cx.ncells(2); ++i)
        for (auto [e, s] : cx.boundary(2, i))
            m.row(i).flip(e);
    EXPECT_EQ(m.rank(), 3);
    EXPECT_EQ(int(m.kernel_basis().size()), 5);
}

TEST(Cochain, StokesOverRegions) {
    Rng rng(13);
    // 2d patches: the whole-complex integral of d(beta) equals the sum of the
    // three boundary line integrals taken with induced orientations
    for (const CellComplex& cx : {build_triangle_lattice(1, ComplexKind::simplicial),
                                  build_triangle_lattice(2, ComplexKind::simplicial),
                                  build_triangle_lattice(3, ComplexKind::cubical)}) {
        for (int rep = 0; rep < 50; ++rep) {
            Cochain b = random_cochain(cx, 1, 16, rng);
            int lhs = integrate(coboundary(b));
            int rhs = (integrate(b, "L_r") + integrate(b, "L_b") + integrate(b, "L_rb")) % 16;
            EXPECT_EQ(lhs, rhs);
        }
    }
    // 3d: same statement for the four faces of the solid tetrahedron
    for (int refinement : {1, 2}) {
        CellComplex cx = build_tetrahedron(refinement);
        for (int rep = 0; rep < 50; ++rep) {
            Cochain g = random_cochain(cx, 2, 16, rng);
            int lhs = integrate(coboundary(g));
            int rhs = 0;
            for (int i = 1; i <= 4; ++i)
                rhs = (rhs + integrate(g, "bdry_" + std::to_string(i))) % 16;
            EXPECT_EQ(lhs, rhs);
        }
    }
    // closed manifolds: integral of any coboundary vanishes
    for (const CellComplex& cx : {build_torus({2, 2}, ComplexKind::simplicial),
                                  build_torus({2, 2, 2}, ComplexKind::cubical)}) {
        for (int rep = 0; rep < 50; ++rep) {
            Cochain b = random_cochain(cx, cx.dim - 1, 16, rng);
            EXPECT_EQ(integrate(coboundary(b)), 0);
        }
    }
}

TEST(Cochain, IntegrateWholeComplexNeedsTopDegree) {
    CellComplex cx = build_triangle_lattice(2, ComplexKind::cubical);
    Cochain f = make_cochain(cx, 1, 16);
    EXPECT_THROW(integrate(f), std::runtime_error);
}
