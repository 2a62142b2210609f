#pragma once

// Cochains with coefficients in Z_{2^k}, k <= 4, over the complexes of
// cell_complex.hpp: coboundary, cup product, cup-1 product, canonical lift,
// exact halving, and region-restricted integration.
//
// Sign and placement conventions:
//  * (df)(v_0..v_d) = sum_k (-1)^k f(v_0..omit k..v_d); cubical analogously
//    with the face signs of CellComplex::boundary.
//  * Simplicial cup is front-face/back-face along the branching: on a cell
//    the factors occupy consecutive position blocks.
//  * Cubical cup on an n-cube sums over ordered partitions of the axes into
//    blocks matching the factor degrees; factor j is evaluated on the face
//    spanned by its block, anchored at the corner where all earlier blocks
//    sit at 1 and all later blocks at 0; the sign is the parity of the
//    concatenated axis sequence. For two 1-cochains on a plaquette this is
//    f(e01)g(e13) - f(e02)g(e23).
//  * cup-1 is the standard simplicial formula
//      (f u1 g)(v_0..v_{m+n-1}) =
//        sum_{i=0..m-1} (-1)^{(m-i)(n+1)} f(0..i, i+n..m+n-1) g(i..i+n);
//    it is defined only on simplicial complexes (cubical inputs must be
//    refined first).

#include "cupcode/cell_complex.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cupcode {

struct Cochain {
    const CellComplex* cx = nullptr;
    int degree = 0;
    int modulus = 2; // 2, 4, 8, or 16
    std::vector<int> v; // one value in [0, modulus) per cell of the degree

    int operator()(int cell) const { return v[cell]; }
};

inline void check_modulus(int m) {
    if (m != 2 && m != 4 && m != 8 && m != 16)
        throw std::runtime_error("cochain: modulus must be one of 2,4,8,16");
}

inline Cochain make_cochain(const CellComplex& cx, int degree, int modulus) {
    check_modulus(modulus);
    if (degree < 0 || degree > cx.dim)
        throw std::runtime_error("cochain: degree out of range");
    Cochain f;
    f.cx = &cx;
    f.degree = degree;
    f.modulus = modulus;
    f.v.assign(cx.ncells(degree), 0);
    return f;
}

inline Cochain coboundary(const Cochain& f) {
    const CellComplex& cx = *f.cx;
    if (f.degree >= cx.dim)
        throw std::runtime_error("coboundary: degree would exceed complex dimension");
    Cochain g = make_cochain(cx, f.degree + 1, f.modulus);
    for (int i = 0; i < cx.ncells(f.degree + 1); ++i) {
        long long s = 0;
        for (auto [face, sgn] : cx.boundary(f.degree + 1, i))
            s += sgn * f.v[face];
        g.v[i] = int(((s % f.modulus) + f.modulus) % f.modulus);
    }
    return g;
}

inline bool is_cocycle(const Cochain& f) {
    if (f.degree >= f.cx->dim)
        return true;
    for (int x : coboundary(f).v)
        if (x != 0)
            return false;
    return true;
}

// Canonical lift Z_2 -> Z_{2^k}: values {0,1} reinterpreted.
inline Cochain lift(const Cochain& f, int modulus) {
    check_modulus(modulus);
    if (f.modulus != 2)
        throw std::runtime_error("lift: input must have modulus 2");
    Cochain g = f;
    g.modulus = modulus;
    return g;
}

inline Cochain reduce(const Cochain& f, int modulus) {
    check_modulus(modulus);
    Cochain g = f;
    g.modulus = modulus;
    for (int& x : g.v)
        x %= modulus;
    return g;
}

// Exact division by 2, Z_{2^k} -> Z_{2^{k-1}}. Odd entries are a hard error:
// the callers divide only quantities that are even by construction, so an odd
// entry means the construction itself is wrong.
inline Cochain divide_by_2(const Cochain& f) {
    if (f.modulus == 2)
        throw std::runtime_error("divide_by_2: modulus 2 has no half");
    Cochain g = f;
    g.modulus = f.modulus / 2;
    for (size_t i = 0; i < g.v.size(); ++i) {
        if (f.v[i] % 2 != 0)
            throw std::runtime_error("divide_by_2: value not even at cell " + std::to_string(i));
        g.v[i] = f.v[i] / 2;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Cup placements. One placement assigns each factor a cell and carries a sign;
// the product is summed over all placements of a given top cell. Shared with
// the diagonal-operator module, which enumerates the same placements
// symbolically for gate compilation.

struct CupPlacement {
    int sign = 1;
    std::vector<int> cells; // one per factor, in factor order
};

namespace detail {

inline void cubical_partitions(int nly, std::vector<int> remaining,
                               const std::vector<int>& degs, size_t j,
                               std::vector<std::vector<int>>& blocks,
                               std::vector<std::vector<int>>& out_blocks,
                               std::vector<int>& out_orders) {
    if (j == degs.size()) {
        // parity of the concatenated sequence
        std::vector<int> seq;
        for (const auto& b : blocks)
            for (int a : b)
                seq.push_back(a);
        int inv = 0;
        for (size_t i = 0; i < seq.size(); ++i)
            for (size_t k = i + 1; k < seq.size(); ++k)
                inv += seq[i] > seq[k];
        out_orders.push_back(inv % 2 == 0 ? 1 : -1);
        std::vector<int> flat;
        flat.push_back(nly);
        for (const auto& b : blocks) {
            flat.push_back(int(b.size()));
            for (int a : b)
                flat.push_back(a);
        }
        out_blocks.push_back(flat);
        return;
    }
    int d = degs[j];
    // choose an ascending d-subset of remaining
    std::vector<int> idx(d);
    std::vector<bool> used(remaining.size(), false);
    std::function<void(int, int)> rec = [&](int pos, int start) {
        if (pos == d) {
            std::vector<int> block, rest;
            for (size_t t = 0; t < remaining.size(); ++t)
                (used[t] ? block : rest).push_back(remaining[t]);
            blocks.push_back(block);
            cubical_partitions(nly, rest, degs, j + 1, blocks, out_blocks, out_orders);
            blocks.pop_back();
            return;
        }
        for (int t = start; t < int(remaining.size()); ++t) {
            used[t] = true;
            rec(pos + 1, t + 1);
            used[t] = false;
        }
    };
    rec(0, 0);
}

} // namespace detail

// All cup placements of factors with the given degrees on cell (d,i).
inline std::vector<CupPlacement> cup_placements(const CellComplex& cx, int d, int i,
                                                const std::vector<int>& degs) {
    int total = 0;
    for (int x : degs)
        total += x;
    if (total != d)
        throw std::runtime_error("cup_placements: degrees do not fill the cell");
    std::vector<CupPlacement> out;
    if (cx.kind == ComplexKind::simplicial) {
        CupPlacement pl;
        pl.sign = 1;
        int pos = 0;
        for (int deg : degs) {
            std::vector<int> keep;
            for (int p = pos; p <= pos + deg; ++p)
                keep.push_back(p);
            pl.cells.push_back(cx.subsimplex(d, i, keep));
            pos += deg;
        }
        out.push_back(std::move(pl));
        return out;
    }
    // cubical: ordered partitions of local axes into blocks of the factor
    // degrees; factor j anchored at the corner where earlier blocks are at 1.
    std::vector<int> axes(d);
    std::iota(axes.begin(), axes.end(), 0);
    std::vector<std::vector<int>> blocks, flat_blocks;
    std::vector<int> signs;
    detail::cubical_partitions(d, axes, degs, 0, blocks, flat_blocks, signs);
    for (size_t p = 0; p < flat_blocks.size(); ++p) {
        const std::vector<int>& flat = flat_blocks[p];
        CupPlacement pl;
        pl.sign = signs[p];
        size_t c = 1;
        int anchor = 0;
        std::vector<std::vector<int>> blks;
        for (size_t j = 0; j < degs.size(); ++j) {
            int bs = flat[c++];
            std::vector<int> b(flat.begin() + c, flat.begin() + c + bs);
            c += bs;
            blks.push_back(b);
        }
        for (size_t j = 0; j < blks.size(); ++j) {
            pl.cells.push_back(cx.cub_subface(d, i, blks[j], anchor));
            for (int a : blks[j])
                anchor |= 1 << a;
        }
        out.push_back(std::move(pl));
    }
    return out;
}

// Binary (and n-ary) cup product.
inline Cochain cup(const std::vector<Cochain>& fs) {
    if (fs.empty())
        throw std::runtime_error("cup: no factors");
    const CellComplex& cx = *fs[0].cx;
    int m = fs[0].modulus, total = 0;
    std::vector<int> degs;
    for (const Cochain& f : fs) {
        if (f.cx != &cx || f.modulus != m)
            throw std::runtime_error("cup: mismatched complexes or moduli");
        degs.push_back(f.degree);
        total += f.degree;
    }
    Cochain g = make_cochain(cx, total, m);
    for (int i = 0; i < cx.ncells(total); ++i) {
        long long s = 0;
        for (const CupPlacement& pl : cup_placements(cx, total, i, degs)) {
            long long prod = pl.sign;
            for (size_t j = 0; j < fs.size(); ++j)
                prod *= fs[j].v[pl.cells[j]];
            s += prod;
        }
        g.v[i] = int(((s % m) + m) % m);
    }
    return g;
}

inline Cochain cup(const Cochain& f, const Cochain& g) { return cup({f, g}); }

// cup-1 product (simplicial only).
inline Cochain cup1(const Cochain& f, const Cochain& g) {
    const CellComplex& cx = *f.cx;
    if (f.cx != g.cx)
        throw std::runtime_error("cup1: mismatched complexes");
    if (cx.kind == ComplexKind::cubical)
        throw std::runtime_error("cup1: cubical complex without refinement");
    if (f.modulus != g.modulus)
        throw std::runtime_error("cup1: mismatched moduli");
    int m = f.degree, n = g.degree, d = m + n - 1;
    if (d < 0)
        throw std::runtime_error("cup1: degree m+n-1 negative");
    if (d > cx.dim)
        throw std::runtime_error("cup1: degree exceeds complex dimension");
    int mod = f.modulus;
    Cochain h = make_cochain(cx, d, mod);
    for (int i = 0; i < cx.ncells(d); ++i) {
        long long s = 0;
        for (int t = 0; t < m; ++t) {
            // f on positions {0..t} u {t+n..d}, g on {t..t+n}
            std::vector<int> keep_f, keep_g;
            for (int p = 0; p <= t; ++p)
                keep_f.push_back(p);
            for (int p = t + n; p <= d; ++p)
                keep_f.push_back(p);
            for (int p = t; p <= t + n; ++p)
                keep_g.push_back(p);
            int sgn = ((m - t) * (n + 1)) % 2 == 0 ? 1 : -1;
            s += (long long)sgn * f.v[cx.subsimplex(d, i, keep_f)] *
                 g.v[cx.subsimplex(d, i, keep_g)];
        }
        h.v[i] = int(((s % mod) + mod) % mod);
    }
    return h;
}

// Region-restricted integral: sum of values weighted by the stored cell sign
// (orientation on top cells, induced orientation on boundary codimension-1
// cells, +1 on hinge and other lower cells, where the branching orientation
// is the convention). Region "" integrates over the whole complex, which then
// requires degree == dim.
inline int integrate(const Cochain& f, const std::string& region = "") {
    const CellComplex& cx = *f.cx;
    if (region.empty() && f.degree != cx.dim)
        throw std::runtime_error("integrate: whole-complex integral needs top degree");
    long long s = 0;
    for (int i : cx.region_cells(f.degree, region))
        s += (long long)cx.cells[f.degree][i].sign * f.v[i];
    return int(((s % f.modulus) + f.modulus) % f.modulus);
}

} // namespace cupcode
