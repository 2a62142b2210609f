#pragma once

#include "cupcode/diagop.hpp"
#include "cupcode/f2.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cupcode {

// Stabilizer codes with gauge-field qubits: one qubit per (edge, color).
// X-type generators sit at vertices and flip every odd-multiplicity star edge
// in each of their colors, followed by a diagonal dressing at the {-1,+1}
// level (coefficient 8). Z-type generators are face holonomies plus
// boundary-edge constraint rows.

struct StabilizerGenerator {
    std::string kind; // "X" or "Z"
    std::string label;
    int anchor = -1;         // X: vertex id; Z: face id, or edge id for boundary rows
    std::vector<int> colors; // X: color set chi, ascending; Z: the row's colors
    std::vector<std::pair<int, int>> x_layer;   // flipped (edge, color), sorted
    std::vector<std::pair<int, int>> z_support; // (edge, color), sorted
    DiagOp dressing;                            // X-type only; may have no terms

    bool is_pauli() const { return dressing.terms.empty(); }
};

struct Code {
    std::shared_ptr<const CellComplex> complex;
    std::string name;
    int ncolors = 0;
    std::vector<std::string> colors;
    bool twisted = true;
    std::vector<StabilizerGenerator> xgens;
    std::vector<StabilizerGenerator> zgens;
    // Per boundary region: color-mask rows m meaning sum_{c in m} a_c = 0 on
    // every edge of the region. Hinge regions carry both adjacent sets.
    std::map<std::string, std::vector<unsigned>> boundary_rows;
    std::vector<std::vector<std::pair<int, int>>> logical_zs; // Z strings per logical

    const CellComplex& cx() const { return *complex; }
    int nqubits() const { return ncolors * complex->ncells(1); }
    int qubit(int edge, int color) const { return edge * ncolors + color; }

    int color_index(const std::string& c) const {
        for (int i = 0; i < ncolors; ++i)
            if (colors[i] == c)
                return i;
        throw std::runtime_error("Code: unknown color " + c);
    }

    std::string color_suffix(const std::vector<int>& cs) const {
        std::string s;
        for (int c : cs)
            s += colors[c];
        return s;
    }
};

// Star edges of v that appear an odd number of times (a loop is hit twice and
// drops out): exactly the edges an X generator at v flips.
inline std::vector<int> odd_star_edges(const CellComplex& cx, int v) {
    std::map<int, int> mult;
    for (int e : cx.star_edges[v])
        mult[e]++;
    std::vector<int> out;
    for (auto [e, m] : mult)
        if (m & 1)
            out.push_back(e);
    return out;
}

namespace detail {

// Slot list of the Dijkgraaf-Witten weight containing `color`, as color
// indices in cup order: 2D (a_r, a_g, a_b); 3D (a_r, a_y, a_b, a_g); bilayer
// is two independent 2D layers.
inline std::vector<int> dressing_slots(const Code& code, int color) {
    switch (code.ncolors) {
    case 3:
        return {0, 1, 2};
    case 4:
        return {0, 3, 2, 1};
    case 6:
        return color < 3 ? std::vector<int>{0, 1, 2} : std::vector<int>{3, 4, 5};
    default:
        throw std::runtime_error("dressing_slots: unsupported color count " +
                                 std::to_string(code.ncolors));
    }
}

} // namespace detail

// The generator S^{c_1} ... S^{c_k} at vertex v (colors ascending, rightmost
// factor applied first). Its diagonal part sums, per factor c_j, the weight
// with slot c_j replaced by the vertex indicator and every color later in the
// list shifted a -> a + d v-hat by the flips already applied; the shift
// expands each affected slot into a gauge term plus a vertex_star term.
inline StabilizerGenerator make_x_generator(const Code& code, int v,
                                            std::vector<int> chi) {
    std::sort(chi.begin(), chi.end());
    const CellComplex& cx = code.cx();
    StabilizerGenerator g;
    g.kind = "X";
    g.anchor = v;
    g.colors = chi;
    g.label = "S_X^" + code.color_suffix(chi) + "@v" + std::to_string(v);
    for (int e : odd_star_edges(cx, v))
        for (int c : chi)
            g.x_layer.push_back({e, c});
    std::sort(g.x_layer.begin(), g.x_layer.end());
    g.dressing.cx = code.complex.get();
    g.dressing.ncolors = code.ncolors;
    g.dressing.name = g.label;
    if (!code.twisted)
        return g;
    for (size_t j = 0; j < chi.size(); ++j) {
        std::set<int> later(chi.begin() + j + 1, chi.end());
        std::vector<std::vector<DiagFactor>> options;
        for (int sc : detail::dressing_slots(code, chi[j])) {
            if (sc == chi[j])
                options.push_back({DiagFactor::vertex_hat(v)});
            else if (later.count(sc))
                options.push_back({DiagFactor::gauge(sc), DiagFactor::vertex_star(v)});
            else
                options.push_back({DiagFactor::gauge(sc)});
        }
        std::vector<std::vector<DiagFactor>> expanded = {{}};
        for (const auto& opt : options) {
            std::vector<std::vector<DiagFactor>> next;
            for (const auto& partial : expanded)
                for (const DiagFactor& f : opt) {
                    next.push_back(partial);
                    next.back().push_back(f);
                }
            expanded = std::move(next);
        }
        for (auto& factors : expanded)
            g.dressing.terms.push_back({8, "", std::move(factors)});
    }
    return g;
}

namespace detail {

// Nonzero color masks sorted by (popcount, contiguous-in-color-order first,
// index set lexicographic): the candidate order that reproduces the displayed
// boundary generator lists.
inline std::vector<unsigned> candidate_masks(int ncolors) {
    std::vector<unsigned> all;
    for (unsigned m = 1; m < (1u << ncolors); ++m)
        all.push_back(m);
    auto indices = [](unsigned m) {
        std::vector<int> ix;
        for (int i = 0; m; ++i, m >>= 1)
            if (m & 1)
                ix.push_back(i);
        return ix;
    };
    auto contiguous = [&](unsigned m) {
        std::vector<int> ix = indices(m);
        return ix.back() - ix.front() + 1 == int(ix.size());
    };
    std::stable_sort(all.begin(), all.end(), [&](unsigned a, unsigned b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb)
            return pa < pb;
        bool ca = contiguous(a), cb = contiguous(b);
        if (ca != cb)
            return ca;
        return indices(a) < indices(b);
    });
    return all;
}

// Greedy independent kernel members of the given constraint rows, scanned in
// candidate order.
inline std::vector<unsigned> truncated_color_sets(const std::vector<unsigned>& rows,
                                                  int ncolors) {
    auto in_kernel = [&](unsigned m) {
        for (unsigned r : rows)
            if (__builtin_popcount(r & m) & 1)
                return false;
        return true;
    };
    std::vector<unsigned> basis, out;
    for (unsigned cand : candidate_masks(ncolors)) {
        if (!in_kernel(cand))
            continue;
        unsigned red = cand;
        for (unsigned b : basis)
            red = std::min(red, red ^ b);
        if (!red)
            continue;
        basis.push_back(red);
        std::sort(basis.begin(), basis.end(), std::greater<unsigned>());
        out.push_back(cand);
    }
    return out;
}

inline std::vector<int> mask_colors(unsigned m) {
    std::vector<int> cs;
    for (int i = 0; m; ++i, m >>= 1)
        if (m & 1)
            cs.push_back(i);
    return cs;
}

// Shared generator construction once boundary_rows is in place.
inline void fill_generators(Code& code) {
    const CellComplex& cx = code.cx();
    // X generators: per vertex, the color sets surviving the boundary rows on
    // the flipped star edges.
    for (int v = 0; v < cx.ncells(0); ++v) {
        std::set<unsigned> rowset;
        for (int e : odd_star_edges(cx, v)) {
            const std::string& reg = cx.cells[1][e].region;
            if (reg == "bulk")
                continue;
            auto it = code.boundary_rows.find(reg);
            if (it == code.boundary_rows.end())
                throw std::runtime_error("fill_generators: no constraint rows for region " + reg);
            rowset.insert(it->second.begin(), it->second.end());
        }
        std::vector<unsigned> rows(rowset.begin(), rowset.end());
        for (unsigned m : truncated_color_sets(rows, code.ncolors))
            code.xgens.push_back(make_x_generator(code, v, mask_colors(m)));
    }
    // Z generators: per-face holonomies for every color...
    for (int f = 0; f < cx.ncells(2); ++f) {
        std::map<int, int> mult;
        for (auto [e, s] : cx.boundary(2, f))
            mult[e]++;
        std::vector<int> edges;
        for (auto [e, m] : mult)
            if (m & 1)
                edges.push_back(e);
        for (int c = 0; c < code.ncolors; ++c) {
            StabilizerGenerator g;
            g.kind = "Z";
            g.anchor = f;
            g.colors = {c};
            g.label = "S_Z^" + code.colors[c] + "@f" + std::to_string(f);
            for (int e : edges)
                g.z_support.push_back({e, c});
            std::sort(g.z_support.begin(), g.z_support.end());
            code.zgens.push_back(std::move(g));
        }
    }
    // ...plus the boundary constraint rows on region edges.
    for (const auto& [region, rows] : code.boundary_rows) {
        for (int e : cx.region_cells(1, region)) {
            for (unsigned m : rows) {
                StabilizerGenerator g;
                g.kind = "Z";
                g.anchor = e;
                g.colors = mask_colors(m);
                g.label = "Z^" + code.color_suffix(g.colors) + "@e" + std::to_string(e);
                for (int c : g.colors)
                    g.z_support.push_back({e, c});
                code.zgens.push_back(std::move(g));
            }
        }
    }
}

inline void require_regions(const CellComplex& cx, const std::vector<std::string>& want,
                            const std::string& who) {
    std::vector<std::string> have = cx.boundary_regions();
    if (have.empty())
        return; // closed manifold: no boundary stabilizers
    for (const std::string& r : have)
        if (std::find(want.begin(), want.end(), r) == want.end())
            throw std::runtime_error(who + ": unexpected region " + r);
    for (const std::string& r : want)
        if (!cx.has_region(r))
            throw std::runtime_error(who + ": missing region " + r);
}

inline std::vector<std::pair<int, int>> region_z_string(const CellComplex& cx,
                                                        const std::string& region,
                                                        int color) {
    std::vector<std::pair<int, int>> s;
    for (int e : cx.region_cells(1, region))
        s.push_back({e, color});
    return s;
}

} // namespace detail

inline Code build_2d_code(CellComplex cxv, bool twisted = true) {
    auto cx = std::make_shared<const CellComplex>(std::move(cxv));
    if (cx->dim != 2)
        throw std::runtime_error("build_2d_code: complex is not 2-dimensional");
    Code code;
    code.complex = cx;
    code.name = twisted ? "2d" : "2d-untwisted";
    code.ncolors = 3;
    code.colors = {"r", "g", "b"};
    code.twisted = twisted;
    detail::require_regions(*cx, {"L_r", "L_b", "L_rb"}, "build_2d_code");
    if (!cx->boundary_regions().empty()) {
        code.boundary_rows["L_r"] = {1u << 0};
        code.boundary_rows["L_b"] = {1u << 2};
        code.boundary_rows["L_rb"] = {(1u << 0) | (1u << 2), 1u << 1};
        code.logical_zs.push_back(detail::region_z_string(*cx, "L_rb", 0));
    }
    detail::fill_generators(code);
    return code;
}

inline Code build_3d_code(CellComplex cxv, bool twisted = true) {
    auto cx = std::make_shared<const CellComplex>(std::move(cxv));
    if (cx->dim != 3)
        throw std::runtime_error("build_3d_code: complex is not 3-dimensional");
    Code code;
    code.complex = cx;
    code.name = twisted ? "3d" : "3d-untwisted";
    code.ncolors = 4;
    code.colors = {"r", "g", "b", "y"};
    code.twisted = twisted;
    std::vector<std::string> want = {"bdry_1", "bdry_2", "bdry_3", "bdry_4"};
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j)
            want.push_back("hinge_" + std::to_string(i) + "_" + std::to_string(j));
    detail::require_regions(*cx, want, "build_3d_code");
    if (!cx->boundary_regions().empty()) {
        std::map<std::string, std::vector<unsigned>> face_rows = {
            {"bdry_1", {1u << 2}},                              // a_b = 0
            {"bdry_2", {1u << 0}},                              // a_r = 0
            {"bdry_3", {1u << 1}},                              // a_g = 0
            {"bdry_4", {(1u << 0) | (1u << 1) | (1u << 2), 1u << 3}}, // a_r+a_g+a_b = a_y = 0
        };
        code.boundary_rows = face_rows;
        for (const std::string& reg : cx->boundary_regions()) {
            if (reg.rfind("hinge_", 0) != 0)
                continue;
            std::string a = "bdry_" + reg.substr(6, 1), b = "bdry_" + reg.substr(8, 1);
            std::vector<unsigned> rows = face_rows.at(a);
            for (unsigned m : face_rows.at(b))
                if (std::find(rows.begin(), rows.end(), m) == rows.end())
                    rows.push_back(m);
            code.boundary_rows[reg] = rows;
        }
        code.logical_zs.push_back(detail::region_z_string(*cx, "hinge_1_4", 0));
    }
    detail::fill_generators(code);
    return code;
}

inline Code build_bilayer_cs_code(CellComplex cxv, bool twisted = true) {
    auto cx = std::make_shared<const CellComplex>(std::move(cxv));
    if (cx->dim != 2)
        throw std::runtime_error("build_bilayer_cs_code: complex is not 2-dimensional");
    Code code;
    code.complex = cx;
    code.name = twisted ? "bilayer" : "bilayer-untwisted";
    code.ncolors = 6;
    code.colors = {"r", "g", "b", "r'", "g'", "b'"};
    code.twisted = twisted;
    detail::require_regions(*cx, {"L_r", "L_b", "L_rb"}, "build_bilayer_cs_code");
    if (!cx->boundary_regions().empty()) {
        code.boundary_rows["L_r"] = {1u << 0, 1u << 3};            // a_r = a_r' = 0
        code.boundary_rows["L_b"] = {1u << 2, 1u << 5};            // a_b = a_b' = 0
        code.boundary_rows["L_rb"] = {(1u << 0) | (1u << 5),       // a_r = a_b'
                                      (1u << 2) | (1u << 3),       // a_b = a_r'
                                      (1u << 1) | (1u << 4)};      // a_g = a_g'
        code.logical_zs.push_back(detail::region_z_string(*cx, "L_rb", 0)); // n_r
        code.logical_zs.push_back(detail::region_z_string(*cx, "L_rb", 2)); // n_b
    }
    detail::fill_generators(code);
    return code;
}

// Symbolic description of the Z_2^N family in N-1 spatial dimensions.
struct CodeFamilySpec {
    int N = 0;
    int spatial_dim = 0;
    int dressing_level = 0;
    std::string twist;
    bool instantiable = false;
};

inline CodeFamilySpec general_N_descriptor(int N) {
    if (N < 3)
        throw std::runtime_error("general_N_descriptor: need N >= 3, got " + std::to_string(N));
    CodeFamilySpec s;
    s.N = N;
    s.spatial_dim = N - 1;
    s.dressing_level = N - 1;
    s.twist = "(-1)^{int a_1 u a_2 u ... u a_" + std::to_string(N) + "}";
    s.instantiable = N == 3 || N == 4;
    return s;
}

inline Code instantiate_family(const CodeFamilySpec& spec, CellComplex cx) {
    if (!spec.instantiable)
        throw std::runtime_error("instantiate_family: no instantiation for N = " +
                                 std::to_string(spec.N));
    return spec.N == 3 ? build_2d_code(std::move(cx)) : build_3d_code(std::move(cx));
}

inline const std::vector<std::vector<std::pair<int, int>>>& logical_Z(const Code& code) {
    return code.logical_zs;
}

// F2 rows over the (edge, color) qubit bits: flatness rows (one per face and
// color, odd-multiplicity boundary edges) and/or boundary constraint rows.
inline F2Matrix constraint_matrix(const Code& code, bool flatness, bool boundary) {
    const CellComplex& cx = code.cx();
    F2Matrix m(0, code.nqubits());
    if (flatness) {
        for (int f = 0; f < cx.ncells(2); ++f) {
            std::map<int, int> mult;
            for (auto [e, s] : cx.boundary(2, f))
                mult[e]++;
            for (int c = 0; c < code.ncolors; ++c) {
                F2Vec row(code.nqubits());
                for (auto [e, k] : mult)
                    if (k & 1)
                        row.set(code.qubit(e, c), true);
                m.append_row(row);
            }
        }
    }
    if (boundary) {
        for (const auto& [region, rows] : code.boundary_rows) {
            for (int e : cx.region_cells(1, region)) {
                for (unsigned mask : rows) {
                    F2Vec row(code.nqubits());
                    for (int c : detail::mask_colors(mask))
                        row.set(code.qubit(e, c), true);
                    m.append_row(row);
                }
            }
        }
    }
    return m;
}

} // namespace cupcode
