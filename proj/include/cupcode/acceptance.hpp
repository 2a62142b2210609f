// Acceptance suite: the shippable-behavior checklist for the whole project.
// Each criterion builds its instances from scratch, checks exact values, and
// fills a deterministic detail line. Wall times are measured and budget
// violations fail the criterion, but times never enter the detail text, so
// reports built from these results are byte-stable run to run.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cupcode/cell_complex.hpp"
#include "cupcode/cochain.hpp"
#include "cupcode/diagop.hpp"
#include "cupcode/f2.hpp"
#include "cupcode/rng.hpp"
#include "cupcode/sparse_sim.hpp"
#include "cupcode/stab_code.hpp"
#include "cupcode/verify.hpp"
#include "cupcode/wops.hpp"

namespace cupcode {

struct CriterionResult {
    std::string id;
    std::string title;
    bool pass = false;
    double seconds = 0.0;        // measured wall time
    double budget_seconds = 0.0; // 0 means no wall-clock requirement
    std::string detail;          // deterministic; never contains timings
};

namespace detail {

inline std::string zeta_entry_str(int e) {
    e = ((e % 16) + 16) % 16;
    switch (e) {
    case 0:
        return "1";
    case 4:
        return "i";
    case 8:
        return "−1";
    case 12:
        return "−i";
    case 1:
        return "e^{2πi/16}";
    case 2:
        return "e^{iπ/4}";
    case 14:
        return "e^{−iπ/4}";
    default:
        return "e^{2πi·" + std::to_string(e) + "/16}";
    }
}

inline std::string diag_str(const std::vector<int>& exps) {
    std::string s = "diag(";
    for (size_t i = 0; i < exps.size(); ++i)
        s += (i ? ", " : "") + zeta_entry_str(exps[i]);
    return s + ")";
}

// The automorphism as a circuit: the CNOT layer first, then the diagonal.
inline Circuit automorphism_circuit(const AutomorphismOp& u) {
    return {CircuitStep::cnot_step(u.V), CircuitStep::diag_step(u.W)};
}

inline LogicalMatrix logical_action(const Code& code) {
    return logical_matrix(code, automorphism_circuit(build_U(code)));
}

// ---------------------------------------------------------------------------
// Randomized cochain identity battery.

struct IdentityTally {
    std::string name;
    long long cases = 0;
    long long failures = 0;
    std::string first_failure;

    void note(bool ok, const std::string& where) {
        ++cases;
        if (!ok) {
            ++failures;
            if (first_failure.empty())
                first_failure = name + " on " + where;
        }
    }
};

inline Cochain random_cochain(const CellComplex& cx, int degree, int modulus, Rng& rng) {
    Cochain f = make_cochain(cx, degree, modulus);
    for (int& x : f.v)
        x = int(rng.below(uint64_t(modulus)));
    return f;
}

inline Cochain combine_cochains(const Cochain& a, const Cochain& b, int ca, int cb) {
    Cochain r = a;
    for (size_t i = 0; i < r.v.size(); ++i) {
        int m = r.modulus;
        r.v[i] = ((ca * a.v[i] + cb * b.v[i]) % m + m) % m;
    }
    return r;
}

inline bool cochain_zero(const Cochain& f) {
    for (int x : f.v)
        if (x != 0)
            return false;
    return true;
}

inline F2Matrix coboundary1_matrix(const CellComplex& cx) {
    F2Matrix m(cx.ncells(2), cx.ncells(1));
    for (int i = 0; i < cx.ncells(2); ++i)
        for (auto [e, s] : cx.boundary(2, i))
            m.row(i).flip(e);
    return m;
}

inline std::vector<IdentityTally> run_identity_battery() {
    std::vector<CellComplex> survey;
    survey.push_back(build_triangle_lattice(2, ComplexKind::simplicial));
    survey.push_back(build_triangle_lattice(2, ComplexKind::cubical));
    survey.push_back(build_tetrahedron(2));
    survey.push_back(build_torus({2, 2}, ComplexKind::cubical));
    survey.push_back(build_torus({2, 2}, ComplexKind::simplicial));
    survey.push_back(build_torus({1, 1, 1}, ComplexKind::cubical));
    survey.push_back(refine_cubical(build_torus({1, 1, 1}, ComplexKind::cubical)));

    std::vector<IdentityTally> out;
    Rng rng(0x1dea);

    // Coboundary squares to zero on every degree that admits it.
    {
        IdentityTally t{"d_squared"};
        for (const CellComplex& cx : survey)
            for (int m : {2, 16})
                for (int k = 0; k + 2 <= cx.dim; ++k)
                    for (int rep = 0; rep < 50; ++rep) {
                        Cochain f = random_cochain(cx, k, m, rng);
                        t.note(cochain_zero(coboundary(coboundary(f))), cx.name);
                    }
        out.push_back(std::move(t));
    }

    // The n-ary cup agrees with both bracketings of the binary cup.
    {
        IdentityTally t{"cup_associativity"};
        for (const CellComplex& cx : survey) {
            if (cx.dim < 3)
                continue;
            for (int rep = 0; rep < 334; ++rep) {
                Cochain f = random_cochain(cx, 1, 16, rng);
                Cochain g = random_cochain(cx, 1, 16, rng);
                Cochain h = random_cochain(cx, 1, 16, rng);
                Cochain nary = cup({f, g, h});
                t.note(nary.v == cup(cup(f, g), h).v && nary.v == cup(f, cup(g, h)).v, cx.name);
            }
        }
        out.push_back(std::move(t));
    }

    // Leibniz rule d(f u g) = df u g + (-1)^{deg f} f u dg.
    {
        IdentityTally t{"leibniz"};
        auto check = [&](const CellComplex& cx, int df, int dg) {
            if (df + dg + 1 > cx.dim)
                return;
            for (int rep = 0; rep < 38; ++rep) {
                Cochain f = random_cochain(cx, df, 16, rng);
                Cochain g = random_cochain(cx, dg, 16, rng);
                Cochain lhs = coboundary(cup(f, g));
                Cochain rhs = combine_cochains(cup(coboundary(f), g), cup(f, coboundary(g)), 1,
                                               df % 2 == 0 ? 1 : -1);
                t.note(lhs.v == rhs.v, cx.name);
            }
        };
        for (const CellComplex& cx : survey) {
            check(cx, 0, 0);
            check(cx, 0, 1);
            check(cx, 1, 0);
            check(cx, 1, 1);
        }
        CellComplex t4 = build_torus_nd({1, 1, 1, 1}, ComplexKind::cubical);
        check(t4, 1, 1);
        check(t4, 1, 2);
        check(t4, 2, 1);
        out.push_back(std::move(t));
    }

    // For a mod-2 cocycle a: d(lift a) = 2 (lift a u lift a), and halving the
    // coboundary of the lift recovers a u a mod 2.
    {
        IdentityTally t{"lift_square"};
        for (const CellComplex& cx : {build_torus({2, 2}, ComplexKind::cubical),
                                      build_torus({2, 2}, ComplexKind::simplicial),
                                      build_triangle_lattice(2, ComplexKind::cubical),
                                      build_triangle_lattice(2, ComplexKind::simplicial)}) {
            KernelSampler cocycles(coboundary1_matrix(cx));
            for (int rep = 0; rep < 250; ++rep) {
                F2Vec vec = cocycles.sample_vec(rng);
                Cochain a = make_cochain(cx, 1, 2);
                for (int e = 0; e < cx.ncells(1); ++e)
                    a.v[e] = vec.get(e) ? 1 : 0;
                Cochain la = lift(a, 4);
                Cochain dla = coboundary(la);
                Cochain twice_sq = cup(la, la);
                for (int& x : twice_sq.v)
                    x = 2 * x % 4;
                Cochain half = divide_by_2(dla);
                t.note(dla.v == twice_sq.v && half.modulus == 2 && half.v == cup(a, a).v,
                       cx.name);
            }
        }
        out.push_back(std::move(t));
    }

    // Hirsch formula (a u b) u1 c = a u (b u1 c) + (a u1 c) u b mod 2.
    {
        IdentityTally t{"hirsch"};
        CellComplex cx = refine_cubical(build_triangle_lattice(2, ComplexKind::cubical));
        for (int rep = 0; rep < 1000; ++rep) {
            Cochain a = random_cochain(cx, 1, 2, rng);
            Cochain b = random_cochain(cx, 1, 2, rng);
            Cochain c = random_cochain(cx, 1, 2, rng);
            Cochain lhs = cup1(cup(a, b), c);
            Cochain rhs = combine_cochains(cup(a, cup1(b, c)), cup(cup1(a, c), b), 1, 1);
            t.note(lhs.v == rhs.v, cx.name);
        }
        out.push_back(std::move(t));
    }

    // d(f u1 g) = df u1 g + f u1 dg + f u g + g u f mod 2 for 1-cochains.
    {
        IdentityTally t{"cup1_coboundary"};
        for (const CellComplex& cx :
             {refine_cubical(build_triangle_lattice(2, ComplexKind::cubical)),
              refine_cubical(build_torus({1, 1, 1}, ComplexKind::cubical)),
              build_tetrahedron(2)}) {
            for (int rep = 0; rep < 334; ++rep) {
                Cochain f = random_cochain(cx, 1, 2, rng);
                Cochain g = random_cochain(cx, 1, 2, rng);
                Cochain lhs = coboundary(cup1(f, g));
                Cochain rhs = combine_cochains(
                    combine_cochains(cup1(coboundary(f), g), cup1(f, coboundary(g)), 1, 1),
                    combine_cochains(cup(f, g), cup(g, f), 1, 1), 1, 1);
                t.note(lhs.v == rhs.v, cx.name);
            }
        }
        out.push_back(std::move(t));
    }

    // Stokes: the bulk integral of a coboundary equals the boundary integrals
    // with induced orientations, and vanishes on closed manifolds.
    {
        IdentityTally t{"stokes"};
        for (const CellComplex& cx : {build_triangle_lattice(1, ComplexKind::simplicial),
                                      build_triangle_lattice(2, ComplexKind::simplicial),
                                      build_triangle_lattice(3, ComplexKind::cubical)}) {
            for (int rep = 0; rep < 143; ++rep) {
                Cochain b = random_cochain(cx, 1, 16, rng);
                int lhs = integrate(coboundary(b));
                int rhs =
                    (integrate(b, "L_r") + integrate(b, "L_b") + integrate(b, "L_rb")) % 16;
                t.note(lhs == rhs, cx.name);
            }
        }
        for (int refinement : {1, 2}) {
            CellComplex cx = build_tetrahedron(refinement);
            for (int rep = 0; rep < 143; ++rep) {
                Cochain g = random_cochain(cx, 2, 16, rng);
                int rhs = 0;
                for (int i = 1; i <= 4; ++i)
                    rhs = (rhs + integrate(g, "bdry_" + std::to_string(i))) % 16;
                t.note(integrate(coboundary(g)) == rhs, cx.name);
            }
        }
        for (const CellComplex& cx : {build_torus({2, 2}, ComplexKind::simplicial),
                                      build_torus({2, 2, 2}, ComplexKind::cubical)}) {
            for (int rep = 0; rep < 143; ++rep) {
                Cochain b = random_cochain(cx, cx.dim - 1, 16, rng);
                t.note(integrate(coboundary(b)) == 0, cx.name);
            }
        }
        out.push_back(std::move(t));
    }

    return out;
}

// Phase exponent of a compiled gate list on a bit assignment.
template <class BitFn>
int compiled_phase_exp(const CompiledGates& g, BitFn&& bit) {
    long long total = g.global_phase_exp;
    for (const Gate& gate : g.gates) {
        int prod = 1;
        for (auto [e, c] : gate.vars)
            prod *= bit(e, c);
        total += gate_coeff(gate.name) * prod;
    }
    return int(((total % 16) + 16) % 16);
}

} // namespace detail

// ---------------------------------------------------------------------------
// The criteria. Each entry fills pass and detail; the runner adds timing.

struct CriterionSpec {
    std::string id;
    std::string title;
    double budget_seconds = 0.0;
    std::function<void(CriterionResult&)> fn;
};

inline const std::vector<CriterionSpec>& acceptance_criteria() {
    using detail::diag_str;
    static const std::vector<CriterionSpec> specs = {
        {"c1", "logical T action on the bounded triangles", 20.0,
         [](CriterionResult& r) {
             using clock = std::chrono::steady_clock;
             const std::vector<int> want = {0, 14};
             r.pass = true;
             r.detail.clear();
             const struct {
                 const char* label;
                 int size;
                 ComplexKind kind;
             } cases[] = {{"triangle", 1, ComplexKind::simplicial},
                          {"2x2 patch", 2, ComplexKind::cubical}};
             for (const auto& c : cases) {
                 auto t0 = clock::now();
                 Code code = build_2d_code(build_triangle_lattice(c.size, c.kind));
                 LogicalMatrix m = detail::logical_action(code);
                 double dt = std::chrono::duration<double>(clock::now() - t0).count();
                 bool ok = m.equals_diag(want);
                 if (!r.detail.empty())
                     r.detail += "; ";
                 r.detail += std::string(c.label) + ": " + (ok ? diag_str(want) : m.str());
                 if (dt > 10.0) {
                     ok = false;
                     r.detail += " (exceeded 10 s)";
                 }
                 r.pass = r.pass && ok;
             }
         }},
        {"c2", "logical square-root-of-T action on the tetrahedron", 60.0,
         [](CriterionResult& r) {
             Code code = build_3d_code(build_tetrahedron(1));
             LogicalMatrix m = detail::logical_action(code);
             const std::vector<int> want = {0, 1};
             r.pass = m.equals_diag(want);
             r.detail = "tetrahedron: " + (r.pass ? diag_str(want) : m.str());
         }},
        {"c3", "logical CS-dagger action on the bilayer triangle", 60.0,
         [](CriterionResult& r) {
             Code code = build_bilayer_cs_code(build_triangle_lattice(1, ComplexKind::simplicial));
             LogicalMatrix m = detail::logical_action(code);
             const std::vector<int> want = {0, 0, 0, 12};
             r.pass = m.equals_diag(want);
             r.detail = "bilayer triangle: " + (r.pass ? diag_str(want) : m.str());
         }},
        {"c4", "stabilizer conjugation closure", 0.0,
         [](CriterionResult& r) {
             std::vector<Code> codes;
             codes.push_back(build_2d_code(build_torus_nd({2, 2}, ComplexKind::cubical)));
             codes.push_back(build_2d_code(build_triangle_lattice(1, ComplexKind::simplicial)));
             codes.push_back(build_2d_code(build_triangle_lattice(2, ComplexKind::cubical)));
             r.pass = true;
             long long gens = 0;
             std::string first;
             for (const Code& code : codes) {
                 AutomorphismOp u = build_U(code);
                 for (bool dagger : {false, true}) {
                     Report rep = check_emergent_symmetry(code, u, dagger);
                     if (!dagger)
                         gens += (long long)rep.table.size();
                     if (!rep.pass && first.empty() && !rep.witnesses.empty())
                         first = rep.witnesses.front();
                     r.pass = r.pass && rep.pass;
                 }
             }
             r.detail = "3 instances, " + std::to_string(gens) +
                        " generator images verified forward and inverse on every flat "
                        "configuration";
             if (!r.pass)
                 r.detail += "; first mismatch: " + first;
         }},
        {"c5", "anyon permutation table", 0.0,
         [](CriterionResult& r) {
             Code code = build_2d_code(build_torus_nd({2, 2}, ComplexKind::cubical));
             Report rep = anyon_permutation_report(code, build_U(code));
             const std::vector<std::pair<std::string, std::string>> want = {
                 {"m_r", "m_rg"}, {"m_g", "m_g"},   {"m_b", "m_gb"}, {"m_rb", "m_rb"},
                 {"e_r", "e_r"},  {"e_g", "e_rgb"}, {"e_b", "e_b"},
             };
             r.pass = rep.pass && rep.table == want;
             if (r.pass) {
                 r.detail = "7 rows:";
                 for (const auto& [from, to] : rep.table)
                     r.detail += " " + from + "->" + to;
             } else {
                 r.detail = "emitted table differs from the claimed permutation:";
                 for (const auto& [from, to] : rep.table)
                     r.detail += " " + from + "->" + to;
             }
         }},
        {"c6", "ground-state degeneracy of the twisted and untwisted torus", 300.0,
         [](CriterionResult& r) {
             CellComplex cx = build_torus_nd({2, 2}, ComplexKind::cubical);
             int64_t twisted = gsd(build_2d_code(cx));
             int64_t untwisted = gsd(build_2d_code(cx, false));
             r.pass = twisted == 22 && untwisted == 64;
             r.detail = "twisted: " + std::to_string(twisted) +
                        " (want 22), untwisted control: " + std::to_string(untwisted) +
                        " (want 64)";
         }},
        {"c7", "randomized cochain identity battery", 60.0,
         [](CriterionResult& r) {
             std::vector<detail::IdentityTally> tallies = detail::run_identity_battery();
             r.pass = true;
             long long failures = 0;
             std::string first;
             r.detail.clear();
             for (const detail::IdentityTally& t : tallies) {
                 r.pass = r.pass && t.cases >= 1000 && t.failures == 0;
                 failures += t.failures;
                 if (first.empty())
                     first = t.first_failure;
                 if (!r.detail.empty())
                     r.detail += " ";
                 r.detail += t.name + ":" + std::to_string(t.cases);
             }
             r.detail += "; failures: " + std::to_string(failures);
             if (!first.empty())
                 r.detail += " (first: " + first + ")";
         }},
        {"c8", "partition-function invariance under the field substitution", 0.0,
         [](CriterionResult& r) {
             r.pass = true;
             r.detail.clear();
             for (int size : {1, 2}) {
                 CellComplex cx = build_torus_nd({size, 1, 1}, ComplexKind::cubical);
                 Report rep = dw_invariance(cx, 3, {1, 7, 4});
                 r.pass = r.pass && rep.pass;
                 if (!r.detail.empty())
                     r.detail += "; ";
                 r.detail += std::to_string(size) + "x1x1: " +
                             std::to_string(rep.counters.at("z_before")) + " = " +
                             std::to_string(rep.counters.at("z_after"));
             }
         }},
        {"c9", "compiled gate phases match operator evaluation", 0.0,
         [](CriterionResult& r) {
             Code tri = build_2d_code(build_triangle_lattice(1, ComplexKind::simplicial));
             Code patch = build_2d_code(build_triangle_lattice(2, ComplexKind::cubical));
             Code torus = build_2d_code(build_torus_nd({2, 2}, ComplexKind::cubical));
             Code tet = build_3d_code(build_tetrahedron(1));
             Code bil = build_bilayer_cs_code(build_triangle_lattice(1, ComplexKind::simplicial));
             CellComplex s2 = build_torus_nd({2, 2}, ComplexKind::simplicial);
             CellComplex s3 = build_torus_nd({1, 1, 1}, ComplexKind::simplicial);
             const DiagOp ops[] = {
                 build_W_2d(tri),  build_W_2d(patch),           build_W_2d(torus),
                 build_W_3d(tet),  build_W_bilayer(bil),        build_W_generalN(s2, 3),
                 build_W_generalN(s3, 4),
             };
             long long mismatches = 0;
             int opn = 0;
             Rng rng(0xc9);
             for (const DiagOp& op : ops) {
                 ++opn;
                 CompiledGates g = compile_to_gates(op);
                 std::vector<uint8_t> bits(size_t(op.cx->ncells(1)) * op.ncolors);
                 auto bit = [&](int e, int c) { return int(bits[size_t(e) * op.ncolors + c]); };
                 for (int rep = 0; rep < 10000; ++rep) {
                     for (auto& b : bits)
                         b = rng.bit() ? 1 : 0;
                     if (eval_diag(op, bit) != detail::compiled_phase_exp(g, bit))
                         ++mismatches;
                 }
             }
             r.pass = mismatches == 0;
             r.detail = std::to_string(opn) + " operators x 10000 random configurations, " +
                        std::to_string(mismatches) + " phase mismatches";
         }},
        {"c10", "code-switch magic-state distillation", 120.0,
         [](CriterionResult& r) {
             Code code = build_2d_code(build_triangle_lattice(1, ComplexKind::simplicial));
             int good = 0;
             std::string first;
             for (uint64_t seed = 0; seed < 100; ++seed) {
                 Report rep = run_code_switch(code, seed);
                 if (rep.pass)
                     ++good;
                 else if (first.empty())
                     first = "seed " + std::to_string(seed) +
                             (rep.witnesses.empty() ? "" : ": " + rep.witnesses.front());
             }
             r.pass = good == 100;
             r.detail = std::to_string(good) + "/100 seeds produced the exact magic state";
             if (!first.empty())
                 r.detail += " (first failure: " + first + ")";
         }},
    };
    return specs;
}

// Run every criterion, optionally on a small worker pool. Results come back
// in criterion order regardless of scheduling.
inline std::vector<CriterionResult> run_acceptance(int jobs = 1) {
    const std::vector<CriterionSpec>& specs = acceptance_criteria();
    std::vector<CriterionResult> out(specs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < specs.size();) {
            const CriterionSpec& s = specs[i];
            CriterionResult r;
            r.id = s.id;
            r.title = s.title;
            r.budget_seconds = s.budget_seconds;
            auto t0 = std::chrono::steady_clock::now();
            try {
                s.fn(r);
            } catch (const std::exception& e) {
                r.pass = false;
                r.detail = std::string("error: ") + e.what();
            }
            r.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (s.budget_seconds > 0 && r.seconds > s.budget_seconds) {
                r.pass = false;
                r.detail += " (exceeded the time budget)";
            }
            out[i] = std::move(r);
        }
    };
    int n = std::max(1, std::min(jobs, int(specs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }
    return out;
}

} // namespace cupcode
