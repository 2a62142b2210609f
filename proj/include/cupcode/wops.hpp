#pragma once

// Transversal automorphism circuits U = W * V for the twisted gauge codes.
// V is a CNOT layer mixing the gauge colors edge by edge; W is a diagonal
// operator whose zeta_16 exponent integrates cup-product densities of the
// gauge fields, with boundary and hinge corrections on bounded complexes.
//
// The boundary corrections are forced by a descent chain: on the constraint
// surface of boundary (4) the bulk 3-cochain becomes exact (alpha = d beta),
// and on the hinge between boundaries (1) and (4) the boundary 2-cochain
// becomes exact in turn (beta = d gamma). build_W_3d re-derives both
// identities cell by cell on sampled admissible configurations and refuses
// to construct an operator whose corrections do not actually cancel.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cupcode/cell_complex.hpp"
#include "cupcode/cochain.hpp"
#include "cupcode/diagop.hpp"
#include "cupcode/f2.hpp"
#include "cupcode/rng.hpp"
#include "cupcode/stab_code.hpp"

namespace cupcode {

// One logical automorphism: apply V first, then W.
struct AutomorphismOp {
    std::string name;
    CnotLayer V;
    DiagOp W;
};

// Evaluate a diagonal operator on a packed (edge * ncolors + color) bit
// vector laid out like the code's qubits.
inline int eval_on_bits(const DiagOp& op, const Code& code, const F2Vec& cfg) {
    return eval_diag(op, [&](int e, int c) { return cfg.get(code.qubit(e, c)) ? 1 : 0; });
}

inline bool has_region(const CellComplex& cx, const std::string& name) {
    for (const std::string& r : cx.boundary_regions())
        if (r == name)
            return true;
    return false;
}

// ---------------------------------------------------------------------------
// CNOT layer V: (control color, target color) pairs applied on every edge.

inline CnotLayer build_V(const Code& code) {
    switch (code.ncolors) {
    case 3:
        return {{{0, 1}, {2, 1}}}; // g += r, g += b
    case 4:
        return {{{0, 3}, {1, 3}, {2, 3}}}; // y += r + g + b
    case 6:
        return {{{0, 1}, {2, 1}, {3, 4}, {5, 4}}}; // per layer: g += r, g += b
    default:
        throw std::runtime_error("build_V: unsupported color count " +
                                 std::to_string(code.ncolors));
    }
}

// ---------------------------------------------------------------------------
// Diagonal operators

namespace detail {

// Every configuration in the joint kernel of the constraint rows while the
// kernel is small, otherwise a deterministic random sample of it.
inline std::vector<F2Vec> kernel_configs(const F2Matrix& m, int max_exhaustive_dim,
                                         int nsamples, uint64_t seed) {
    std::vector<F2Vec> basis = m.kernel_basis();
    int k = int(basis.size());
    std::vector<F2Vec> out;
    if (k <= max_exhaustive_dim) {
        for (uint64_t mask = 0; mask < (uint64_t(1) << k); ++mask) {
            F2Vec v(m.cols());
            for (int i = 0; i < k; ++i)
                if ((mask >> i) & 1)
                    v ^= basis[i];
            out.push_back(std::move(v));
        }
    } else {
        Rng rng(seed);
        for (int s = 0; s < nsamples; ++s) {
            F2Vec v(m.cols());
            for (const F2Vec& b : basis)
                if (rng.bit())
                    v ^= b;
            out.push_back(std::move(v));
        }
    }
    return out;
}

// One row per edge forcing the masked colors to sum to zero there.
inline void append_color_mask_rows(F2Matrix& m, const Code& code, unsigned color_mask) {
    for (int e = 0; e < code.cx().ncells(1); ++e) {
        F2Vec row(code.nqubits());
        for (int c = 0; c < code.ncolors; ++c)
            if ((color_mask >> c) & 1)
                row.set(code.qubit(e, c), true);
        m.append_row(row);
    }
}

// Lift one color's edge bits into a mod-16 1-cochain.
inline Cochain lift_color(const Code& code, const F2Vec& cfg, int color) {
    Cochain f = make_cochain(code.cx(), 1, 16);
    for (int e = 0; e < code.cx().ncells(1); ++e)
        f.v[e] = cfg.get(code.qubit(e, color)) ? 1 : 0;
    return f;
}

inline Cochain scale16(Cochain f, int k) {
    for (int& x : f.v)
        x = ((x * k) % 16 + 16) % 16;
    return f;
}

inline Cochain add16(Cochain f, const Cochain& g) {
    for (size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = (f.v[i] + g.v[i]) % 16;
    return f;
}

inline Cochain sub16(Cochain f, const Cochain& g) {
    for (size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = ((f.v[i] - g.v[i]) % 16 + 16) % 16;
    return f;
}

// Descent-chain re-derivation behind W_3d's boundary and hinge corrections.
//
// Step 1: with every color flat and a_r + a_g + a_b = 0 edgewise (the
// boundary-(4) constraint), the bulk 3-cochain
//     4 (a_r u a_b u a_g) + 8 (a_r u (a_g u1 a_b) u a_g)
// must equal d[2 (a_r u a_g)] on every 3-cell.
//
// Step 2: with a_r + a_g = 0 and a_b = 0 (the hinge-(1,4) constraint),
// 2 (a_r u a_g) must equal d[a_r] on every 2-cell.
inline void require_w3d_descent(const Code& code) {
    const CellComplex& cx = code.cx();
    {
        F2Matrix m = constraint_matrix(code, true, false);
        append_color_mask_rows(m, code, 0b0111u);
        for (const F2Vec& cfg : kernel_configs(m, 12, 128, 0x77309e01)) {
            Cochain ar = lift_color(code, cfg, 0);
            Cochain ag = lift_color(code, cfg, 1);
            Cochain ab = lift_color(code, cfg, 2);
            Cochain bulk = add16(scale16(cup({ar, ab, ag}), 4),
                                 scale16(cup({ar, cup1(ag, ab), ag}), 8));
            Cochain resid = sub16(bulk, coboundary(scale16(cup(ar, ag), 2)));
            for (int s = 0; s < cx.ncells(3); ++s)
                if (resid.v[s] % 16 != 0)
                    throw std::runtime_error(
                        "build_W_3d: bulk term fails to trivialize on the boundary "
                        "constraint surface (3-cell " + std::to_string(s) +
                        ", residual " + std::to_string(resid.v[s]) + ")");
        }
    }
    {
        F2Matrix m = constraint_matrix(code, true, false);
        append_color_mask_rows(m, code, 0b0011u);
        append_color_mask_rows(m, code, 0b0100u);
        for (const F2Vec& cfg : kernel_configs(m, 12, 128, 0x77309e02)) {
            Cochain ar = lift_color(code, cfg, 0);
            Cochain ag = lift_color(code, cfg, 1);
            Cochain resid = sub16(scale16(cup(ar, ag), 2), coboundary(ar));
            for (int f = 0; f < cx.ncells(2); ++f)
                if (resid.v[f] % 16 != 0)
                    throw std::runtime_error(
                        "build_W_3d: boundary term fails to trivialize on the hinge "
                        "constraint surface (2-cell " + std::to_string(f) +
                        ", residual " + std::to_string(resid.v[f]) + ")");
        }
    }
}

} // namespace detail

// 2D: bulk (a_r u a_b)/2 in half-turn units (exponent 4 per unit), and on a
// bounded patch the corner-free boundary correction -a_r/4 along L_rb
// (exponent -2 per unit).
inline DiagOp build_W_2d(const Code& code) {
    if (code.ncolors != 3)
        throw std::runtime_error("build_W_2d: expected a three-color code");
    DiagOp op;
    op.cx = code.complex.get();
    op.ncolors = code.ncolors;
    op.name = "W_2d";
    op.terms.push_back({4, "", {DiagFactor::gauge(0), DiagFactor::gauge(2)}});
    if (has_region(code.cx(), "L_rb"))
        op.terms.push_back({14, "L_rb", {DiagFactor::gauge(0)}});
    return op;
}

// 3D: bulk (a_r u a_b u a_g)/2 + a_r u (a_g u1 a_b) u a_g, boundary-(4)
// correction -(a_r u a_g)/4, hinge-(1,4) correction +a_r/8. The corrections
// are validated against the descent chain before the operator is returned.
inline DiagOp build_W_3d(const Code& code) {
    if (code.ncolors != 4)
        throw std::runtime_error("build_W_3d: expected a four-color code");
    if (code.cx().kind != ComplexKind::simplicial)
        throw std::runtime_error("build_W_3d: the cup-1 bulk term needs a simplicial complex");
    DiagOp op;
    op.cx = code.complex.get();
    op.ncolors = code.ncolors;
    op.name = "W_3d";
    op.terms.push_back(
        {4, "", {DiagFactor::gauge(0), DiagFactor::gauge(2), DiagFactor::gauge(1)}});
    op.terms.push_back({8, "",
                        {DiagFactor::gauge(0), DiagFactor::gauge_cup1(1, 2),
                         DiagFactor::gauge(1)}});
    if (has_region(code.cx(), "bdry_4"))
        op.terms.push_back({14, "bdry_4", {DiagFactor::gauge(0), DiagFactor::gauge(1)}});
    if (has_region(code.cx(), "hinge_1_4"))
        op.terms.push_back({1, "hinge_1_4", {DiagFactor::gauge(0)}});
    detail::require_w3d_descent(code);
    return op;
}

// Bilayer: each layer carries its own bulk term, and the L_rb boundary
// carries i^{-a_r a_b} per edge (exponent -4 on the edgewise product, i.e.
// a CS^dagger between the unprimed r and b qubits of each boundary edge).
inline DiagOp build_W_bilayer(const Code& code) {
    if (code.ncolors != 6)
        throw std::runtime_error("build_W_bilayer: expected a six-color code");
    DiagOp op;
    op.cx = code.complex.get();
    op.ncolors = code.ncolors;
    op.name = "W_bilayer";
    op.terms.push_back({4, "", {DiagFactor::gauge(0), DiagFactor::gauge(2)}});
    op.terms.push_back({4, "", {DiagFactor::gauge(3), DiagFactor::gauge(5)}});
    if (has_region(code.cx(), "L_rb"))
        op.terms.push_back({12, "L_rb", {DiagFactor::gauge_cup1(0, 2)}});
    return op;
}

// Closed-manifold operator for the whole family: N-1 abstract gauge colors
// 0..N-2 (the fields a_2..a_N) on a closed (N-1)-dimensional simplicial
// complex. The leading term is 4 (a_2 u ... u a_N); each correction replaces
// slot j by the edgewise product a_i u1 a_j while a_i stays in slot i:
//     8 * a_2 u ... u (a_i u1 a_j) u ... u a_i u ... u a_N,  3 <= i <= N,
//                                                            2 <= j <= i-1.
inline DiagOp build_W_generalN(const CellComplex& cx, int N) {
    if (N < 3 || N > 5)
        throw std::runtime_error("build_W_generalN: N must be between 3 and 5");
    if (cx.dim != N - 1)
        throw std::runtime_error("build_W_generalN: need an (N-1)-dimensional complex");
    if (cx.kind != ComplexKind::simplicial)
        throw std::runtime_error("build_W_generalN: cup-1 corrections need a simplicial complex");
    DiagOp op;
    op.cx = &cx;
    op.ncolors = N - 1;
    op.name = "W_general_" + std::to_string(N);
    DiagTerm lead;
    lead.coeff = 4;
    for (int s = 2; s <= N; ++s)
        lead.factors.push_back(DiagFactor::gauge(s - 2));
    op.terms.push_back(std::move(lead));
    for (int i = 3; i <= N; ++i)
        for (int j = 2; j < i; ++j) {
            DiagTerm t;
            t.coeff = 8;
            for (int s = 2; s <= N; ++s)
                t.factors.push_back(s == j ? DiagFactor::gauge_cup1(i - 2, j - 2)
                                           : DiagFactor::gauge(s - 2));
            op.terms.push_back(std::move(t));
        }
    return op;
}

inline AutomorphismOp build_U(const Code& code) {
    AutomorphismOp u;
    u.V = build_V(code);
    switch (code.ncolors) {
    case 3:
        u.W = build_W_2d(code);
        u.name = "U_2d";
        break;
    case 4:
        u.W = build_W_3d(code);
        u.name = "U_3d";
        break;
    case 6:
        u.W = build_W_bilayer(code);
        u.name = "U_bilayer";
        break;
    default:
        throw std::runtime_error("build_U: unsupported color count " +
                                 std::to_string(code.ncolors));
    }
    return u;
}

} // namespace cupcode
