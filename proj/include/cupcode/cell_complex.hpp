#pragma once

// Cell complexes: simplicial Delta-complexes and cubical complexes, with
// branching structure, orientations, and named boundary regions.
//
// Conventions fixed here and relied on everywhere else:
//  * Global vertex order is the row-major rank of the coordinate tuple
//    (last coordinate most significant). Each cell lists its vertices in
//    ascending order of their universal-cover coordinates; this is the
//    branching structure all cup products use. On periodic complexes a cell
//    may repeat a vertex id (Delta-complex), so positions within a cell,
//    never global ids, define the local order.
//  * Cubical d-cells are (corner vertex, axis subset). Corner j of a cell
//    spanning local axes (a_0 < ... < a_{d-1}) sits at offset
//    sum_l ((j>>l)&1) * e_{a_l}; so for a plaquette, corners are
//    0=(0,0), 1=(1,0), 2=(0,1), 3=(1,1).
//  * Simplicial face k omits vertex position k; boundary sign (-1)^k.
//    Cubical faces come in (local axis l, side s) pairs with boundary sign
//    (-1)^l * (s ? +1 : -1).
//  * sign on a top cell is its orientation (simplicial: parity of the
//    integer-coordinate embedding, cubical: +1). On a codimension-1 cell
//    contained in exactly one top cell it is the induced boundary
//    orientation; otherwise +1.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cupcode {

enum class ComplexKind { simplicial, cubical };

struct Cell {
    std::vector<int> verts; // simplicial: d+1 entries; cubical: 2^d corners
    std::vector<int> faces; // simplicial: omit-position order; cubical: 2*local_axis+side
    std::vector<int> axes;  // cubical only: spanned global axes, ascending
    std::string region = "bulk";
    int sign = 1;
};

class CellComplex {
public:
    ComplexKind kind = ComplexKind::simplicial;
    int dim = 0;
    std::string name;
    std::vector<std::vector<Cell>> cells;     // by dimension, 0..dim
    std::vector<std::vector<int>> coords;     // per vertex
    std::vector<std::vector<int>> star_edges; // per vertex: incident edges, with multiplicity

    int ncells(int d) const {
        return d >= 0 && d < int(cells.size()) ? int(cells[d].size()) : 0;
    }

    const Cell& cell(int d, int i) const { return cells[d][i]; }

    // Signed boundary of a d-cell: list of (face id, sign).
    std::vector<std::pair<int, int>> boundary(int d, int i) const {
        const Cell& c = cells[d][i];
        std::vector<std::pair<int, int>> out;
        if (kind == ComplexKind::simplicial) {
            for (int k = 0; k <= d; ++k)
                out.push_back({c.faces[k], (k % 2 == 0) ? 1 : -1});
        } else {
            for (int l = 0; l < d; ++l) {
                int s = (l % 2 == 0) ? 1 : -1;
                out.push_back({c.faces[2 * l + 0], -s});
                out.push_back({c.faces[2 * l + 1], s});
            }
        }
        return out;
    }

    int euler_characteristic() const {
        int chi = 0;
        for (int d = 0; d <= dim; ++d)
            chi += (d % 2 == 0 ? 1 : -1) * ncells(d);
        return chi;
    }

    // Sorted list of distinct non-bulk region labels.
    std::vector<std::string> boundary_regions() const {
        std::vector<std::string> r;
        for (const auto& layer : cells)
            for (const Cell& c : layer)
                if (c.region != "bulk")
                    r.push_back(c.region);
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }

    // Cells of dimension d in a region ("" matches everything).
    std::vector<int> region_cells(int d, const std::string& region) const {
        std::vector<int> out;
        for (int i = 0; i < ncells(d); ++i)
            if (region.empty() || cells[d][i].region == region)
                out.push_back(i);
        return out;
    }

    bool has_region(const std::string& region) const {
        for (const auto& layer : cells)
            for (const Cell& c : layer)
                if (c.region == region)
                    return true;
        return false;
    }

    // The sub-simplex of simplicial cell (d,i) spanned by the given ascending
    // positions of its vertex tuple (e.g. keep={0,2} on a triangle -> edge 02).
    int subsimplex(int d, int i, const std::vector<int>& keep) const {
        if (kind != ComplexKind::simplicial)
            throw std::runtime_error("subsimplex: simplicial complexes only");
        int cd = d, ci = i;
        // Remove unwanted positions from highest to lowest so that lower
        // positions keep their indices during the descent.
        for (int p = d; p >= 0; --p) {
            if (std::find(keep.begin(), keep.end(), p) != keep.end())
                continue;
            ci = cells[cd][ci].faces[p];
            --cd;
        }
        return ci;
    }

    // Cubical: the face of cell (d,i) spanned by the given ascending subset of
    // its local axes, anchored at the corner whose bits on the removed axes
    // are read from corner_mask.
    int cub_subface(int d, int i, const std::vector<int>& local_axes,
                    int corner_mask) const {
        if (kind != ComplexKind::cubical)
            throw std::runtime_error("cub_subface: cubical complexes only");
        int cd = d, ci = i;
        // Remove from the highest local axis down; local indices of the axes
        // below the removed one are unaffected.
        for (int l = d - 1; l >= 0; --l) {
            if (std::find(local_axes.begin(), local_axes.end(), l) != local_axes.end())
                continue;
            int side = (corner_mask >> l) & 1;
            ci = cells[cd][ci].faces[2 * l + side];
            --cd;
        }
        return ci;
    }

    void validate() const {
        for (int d = 2; d <= dim; ++d)
            for (int i = 0; i < ncells(d); ++i) {
                std::map<int, int> cnt;
                for (auto [f, s] : boundary(d, i))
                    for (auto [g, t] : boundary(d - 1, f))
                        cnt[g] += s * t;
                for (auto [g, c] : cnt)
                    if (c != 0)
                        throw std::runtime_error("complex: signed boundary^2 != 0");
            }
    }
};

namespace detail {

// Shared post-construction pass: vertex stars, induced boundary orientations,
// sanity checks.
inline void finalize_complex(CellComplex& cx) {
    cx.star_edges.assign(cx.ncells(0), {});
    for (int e = 0; e < cx.ncells(1); ++e)
        for (int v : cx.cells[1][e].verts)
            cx.star_edges[v].push_back(e);
    if (cx.dim >= 1) {
        std::vector<int> owner(cx.ncells(cx.dim - 1), 0), osign(cx.ncells(cx.dim - 1), 0);
        for (int i = 0; i < cx.ncells(cx.dim); ++i)
            for (auto [f, s] : cx.boundary(cx.dim, i)) {
                owner[f] += 1;
                osign[f] = cx.cells[cx.dim][i].sign * s;
            }
        for (int f = 0; f < cx.ncells(cx.dim - 1); ++f)
            if (owner[f] == 1)
                cx.cells[cx.dim - 1][f].sign = osign[f];
    }
    cx.validate();
}

// Orientation of a simplex from integer coordinates: sign of det(q_i - q_0).
inline int orientation_sign(const std::vector<std::vector<int>>& pts) {
    int d = int(pts.size()) - 1;
    std::vector<std::vector<long long>> m(d, std::vector<long long>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m[i][j] = pts[i + 1][j] - pts[0][j];
    long long det = 0;
    if (d == 1)
        det = m[0][0];
    else if (d == 2)
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    else if (d == 3)
        det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    else
        throw std::runtime_error("orientation_sign: dimension out of range");
    if (det == 0)
        throw std::runtime_error("orientation_sign: degenerate simplex");
    return det > 0 ? 1 : -1;
}

// All permutations of 0..n-1 in lexicographic order, with parity.
inline std::vector<std::pair<std::vector<int>, int>> permutations_signed(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> out;
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                inv += p[i] > p[j];
        out.push_back({p, inv % 2 == 0 ? 1 : -1});
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Builder: cells are described by their universal-cover vertex coordinates and
// identified by a canonical key (coordinates translated so the componentwise
// minimum lies in the fundamental domain). This makes periodic identifications
// automatic and leaves bounded complexes untouched.

class ComplexBuilder {
public:
    ComplexBuilder(ComplexKind kind, int dim, int ambient,
                   std::optional<std::vector<int>> periods = std::nullopt)
        : ambient_(ambient), periods_(std::move(periods)) {
        cx_.kind = kind;
        cx_.dim = dim;
        cx_.cells.resize(dim + 1);
        keys_.resize(dim + 1);
    }

    int add_vertex(const std::vector<int>& c) {
        std::vector<int> rc = reduce_point(c);
        auto it = keys_[0].find(rc);
        if (it != keys_[0].end())
            return it->second;
        int id = int(cx_.cells[0].size());
        keys_[0][rc] = id;
        Cell cell;
        cell.verts = {id};
        cx_.cells[0].push_back(cell);
        cx_.coords.push_back(rc);
        return id;
    }

    // Simplex from cover coordinates listed in ascending row-major order.
    int add_simplex(const std::vector<std::vector<int>>& pts, int sigma = 1) {
        int d = int(pts.size()) - 1;
        if (d == 0)
            return add_vertex(pts[0]);
        std::vector<int> key = canon_key(pts, {});
        auto it = keys_[d].find(key);
        if (it != keys_[d].end())
            return it->second;
        Cell cell;
        cell.sign = sigma;
        for (const auto& p : pts)
            cell.verts.push_back(add_vertex(p));
        for (int k = 0; k <= d; ++k) {
            std::vector<std::vector<int>> fp;
            for (int j = 0; j <= d; ++j)
                if (j != k)
                    fp.push_back(pts[j]);
            cell.faces.push_back(add_simplex(fp));
        }
        int id = int(cx_.cells[d].size());
        keys_[d][key] = id;
        cx_.cells[d].push_back(std::move(cell));
        return id;
    }

    // Cube at a cover base point spanning the given ascending global axes.
    int add_cube(const std::vector<int>& base, const std::vector<int>& axes) {
        int d = int(axes.size());
        if (d == 0)
            return add_vertex(base);
        std::vector<std::vector<int>> pts;
        for (int m = 0; m < (1 << d); ++m) {
            std::vector<int> p = base;
            for (int l = 0; l < d; ++l)
                if ((m >> l) & 1)
                    p[axes[l]] += 1;
            pts.push_back(std::move(p));
        }
        std::vector<int> key = canon_key(pts, axes);
        auto it = keys_[d].find(key);
        if (it != keys_[d].end())
            return it->second;
        Cell cell;
        cell.axes = axes;
        for (const auto& p : pts)
            cell.verts.push_back(add_vertex(p));
        for (int l = 0; l < d; ++l) {
            std::vector<int> sub = axes;
            sub.erase(sub.begin() + l);
            std::vector<int> hi = base;
            hi[axes[l]] += 1;
            cell.faces.push_back(add_cube(base, sub));
            cell.faces.push_back(add_cube(hi, sub));
        }
        int id = int(cx_.cells[d].size());
        keys_[d][key] = id;
        cx_.cells[d].push_back(std::move(cell));
        return id;
    }

    CellComplex finish() {
        detail::finalize_complex(cx_);
        return std::move(cx_);
    }

private:
    std::vector<int> reduce_point(const std::vector<int>& p) const {
        if (!periods_)
            return p;
        std::vector<int> r = p;
        for (size_t c = 0; c < r.size(); ++c) {
            int L = (*periods_)[c];
            r[c] = ((r[c] % L) + L) % L;
        }
        return r;
    }

    std::vector<int> canon_key(const std::vector<std::vector<int>>& pts,
                               const std::vector<int>& axes) const {
        std::vector<int> shift(ambient_, 0);
        if (periods_) {
            for (int c = 0; c < ambient_; ++c) {
                int m = pts[0][c];
                for (const auto& p : pts)
                    m = std::min(m, p[c]);
                int L = (*periods_)[c];
                shift[c] = m - (((m % L) + L) % L);
            }
        }
        std::vector<int> key;
        key.reserve(pts.size() * ambient_ + axes.size() + 1);
        key.push_back(int(pts.size()));
        for (const auto& p : pts)
            for (int c = 0; c < ambient_; ++c)
                key.push_back(p[c] - shift[c]);
        key.insert(key.end(), axes.begin(), axes.end());
        return key;
    }

    int ambient_;
    std::optional<std::vector<int>> periods_;
    CellComplex cx_;
    std::vector<std::map<std::vector<int>, int>> keys_;
};

// ---------------------------------------------------------------------------
// Lattice builders

// Boundary vertices inherit the alphabetically smallest region label among
// their incident boundary edges. The label is informational; stabilizer
// truncation reads edge constraints, not vertex labels.
inline void assign_boundary_vertex_regions(CellComplex& cx) {
    for (int v = 0; v < cx.ncells(0); ++v) {
        std::string best;
        for (int e : cx.star_edges[v]) {
            const std::string& r = cx.cells[1][e].region;
            if (r != "bulk" && (best.empty() || r < best))
                best = r;
        }
        if (!best.empty())
            cx.cells[0][v].region = best;
    }
}

// k x k square-lattice patch (cubical) or its staircase triangulation
// (simplicial; patch_size 1 gives the single 2-simplex). Boundary regions:
// left column -> L_r, top row -> L_b, bottom row + right column -> L_rb.
inline CellComplex build_triangle_lattice(int patch_size, ComplexKind kind) {
    if (patch_size < 1)
        throw std::runtime_error("build_triangle_lattice: patch_size must be >= 1");
    int k = patch_size;

    if (kind == ComplexKind::simplicial && k == 1) {
        // Single 2-simplex on (0,0), (1,0), (0,1): one edge per region
        // (left -> L_r, hypotenuse -> L_b, bottom -> L_rb).
        ComplexBuilder bld(ComplexKind::simplicial, 2, 2);
        std::vector<std::vector<int>> pts = {{0, 0}, {1, 0}, {0, 1}};
        for (auto& p : pts)
            bld.add_vertex(p);
        bld.add_simplex(pts, detail::orientation_sign(pts));
        CellComplex cx = bld.finish();
        cx.name = "triangle_lattice(1,simplicial)";
        for (int e = 0; e < cx.ncells(1); ++e) {
            auto &a = cx.coords[cx.cells[1][e].verts[0]], &b = cx.coords[cx.cells[1][e].verts[1]];
            if (a[0] == 0 && b[0] == 0)
                cx.cells[1][e].region = "L_r";
            else if (a[1] == 0 && b[1] == 0)
                cx.cells[1][e].region = "L_rb";
            else
                cx.cells[1][e].region = "L_b";
        }
        assign_boundary_vertex_regions(cx);
        return cx;
    }

    ComplexBuilder bld(kind, 2, 2);
    for (int y = 0; y <= k; ++y)
        for (int x = 0; x <= k; ++x)
            bld.add_vertex({x, y});
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
            if (kind == ComplexKind::cubical) {
                bld.add_cube({x, y}, {0, 1});
            } else {
                std::vector<int> c00{x, y}, c10{x + 1, y}, c01{x, y + 1}, c11{x + 1, y + 1};
                bld.add_simplex({c00, c10, c11}, detail::orientation_sign({c00, c10, c11}));
                bld.add_simplex({c00, c01, c11}, detail::orientation_sign({c00, c01, c11}));
            }
        }
    CellComplex cx = bld.finish();
    cx.name = "triangle_lattice(" + std::to_string(k) + "," +
              (kind == ComplexKind::cubical ? "cubical" : "simplicial") + ")";
    for (int e = 0; e < cx.ncells(1); ++e) {
        auto &a = cx.coords[cx.cells[1][e].verts[0]], &b = cx.coords[cx.cells[1][e].verts[1]];
        std::string r = "bulk";
        if (a[0] == 0 && b[0] == 0)
            r = "L_r";
        else if (a[1] == k && b[1] == k)
            r = "L_b";
        else if ((a[1] == 0 && b[1] == 0) || (a[0] == k && b[0] == k))
            r = "L_rb";
        cx.cells[1][e].region = r;
    }
    assign_boundary_vertex_regions(cx);
    return cx;
}

// Solid tetrahedron; refinement r applies r-1 rounds of the standard 1->8
// subdivision. Boundary faces are labeled bdry_1..bdry_4 (bdry_i opposite
// corner 4-i), cells shared by faces i<j are hinge_{i,j}, interior is bulk.
inline CellComplex build_tetrahedron(int refinement) {
    if (refinement < 1)
        throw std::runtime_error("build_tetrahedron: refinement must be >= 1");
    int side = 1 << refinement; // corners at side*e_i keep all midpoints integral

    using Pts = std::vector<std::vector<int>>;
    auto colex_less = [](const std::vector<int>& a, const std::vector<int>& b) {
        for (int c = int(a.size()) - 1; c >= 0; --c)
            if (a[c] != b[c])
                return a[c] < b[c];
        return false;
    };
    std::vector<Pts> tets = {{{0, 0, 0}, {side, 0, 0}, {0, side, 0}, {0, 0, side}}};
    for (int round = 1; round < refinement; ++round) {
        std::vector<Pts> next;
        for (const Pts& t : tets) {
            auto mid = [&](int i, int j) {
                std::vector<int> m(3);
                for (int c = 0; c < 3; ++c)
                    m[c] = (t[i][c] + t[j][c]) / 2;
                return m;
            };
            std::vector<std::vector<int>> m = {mid(0, 1), mid(0, 2), mid(0, 3),
                                               mid(1, 2), mid(1, 3), mid(2, 3)};
            next.push_back({t[0], m[0], m[1], m[2]});
            next.push_back({t[1], m[0], m[3], m[4]});
            next.push_back({t[2], m[1], m[3], m[5]});
            next.push_back({t[3], m[2], m[4], m[5]});
            // central octahedron, split along the m(01)-m(23) diagonal
            next.push_back({m[0], m[1], m[2], m[5]});
            next.push_back({m[0], m[1], m[3], m[5]});
            next.push_back({m[0], m[2], m[4], m[5]});
            next.push_back({m[0], m[3], m[4], m[5]});
        }
        tets = std::move(next);
    }

    Pts verts;
    for (const Pts& t : tets)
        for (const auto& p : t)
            verts.push_back(p);
    std::sort(verts.begin(), verts.end(), colex_less);
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    ComplexBuilder bld(ComplexKind::simplicial, 3, 3);
    for (const auto& p : verts)
        bld.add_vertex(p);
    for (Pts t : tets) {
        std::sort(t.begin(), t.end(), colex_less);
        bld.add_simplex(t, detail::orientation_sign(t));
    }
    CellComplex cx = bld.finish();
    cx.name = "tetrahedron(" + std::to_string(refinement) + ")";

    // Region = the set of original boundary planes containing the cell:
    // bdry_1: z=0, bdry_2: y=0, bdry_3: x=0, bdry_4: x+y+z=side.
    auto planes_of = [&](const std::vector<int>& p) {
        std::vector<int> out;
        if (p[2] == 0)
            out.push_back(1);
        if (p[1] == 0)
            out.push_back(2);
        if (p[0] == 0)
            out.push_back(3);
        if (p[0] + p[1] + p[2] == side)
            out.push_back(4);
        return out;
    };
    for (int d = 0; d <= 2; ++d)
        for (int i = 0; i < cx.ncells(d); ++i) {
            std::vector<int> common = planes_of(cx.coords[cx.cells[d][i].verts[0]]);
            for (int v : cx.cells[d][i].verts) {
                std::vector<int> pv = planes_of(cx.coords[v]), keep;
                std::set_intersection(common.begin(), common.end(), pv.begin(), pv.end(),
                                      std::back_inserter(keep));
                common = keep;
            }
            std::string label = "bulk";
            if (common.size() == 1)
                label = "bdry_" + std::to_string(common[0]);
            else if (common.size() >= 2)
                // cells on 3 planes (original corners) take their smallest hinge
                label = "hinge_" + std::to_string(common[0]) + "_" + std::to_string(common[1]);
            cx.cells[d][i].region = label;
        }
    return cx;
}

// Hypercubical torus in n dimensions (periodic in every axis), or its
// staircase triangulation. Exposed publicly for n in {2,3} via build_torus;
// n=4 exists for the internal 4-field path-integral checks.
inline CellComplex build_torus_nd(const std::vector<int>& dims, ComplexKind kind) {
    int n = int(dims.size());
    if (n < 2 || n > 4)
        throw std::runtime_error("build_torus_nd: dimension out of range");
    for (int L : dims)
        if (L < 1)
            throw std::runtime_error("build_torus_nd: every extent must be >= 1");

    ComplexBuilder bld(kind, n, n, dims);
    std::vector<int> p(n, 0);
    auto advance = [&]() {
        for (int c = 0; c < n; ++c) {
            if (++p[c] < dims[c])
                return true;
            p[c] = 0;
        }
        return false;
    };
    do {
        bld.add_vertex(p);
    } while (advance());

    std::vector<int> all_axes(n);
    std::iota(all_axes.begin(), all_axes.end(), 0);
    auto perms = detail::permutations_signed(n);
    p.assign(n, 0);
    do {
        if (kind == ComplexKind::cubical) {
            bld.add_cube(p, all_axes);
        } else {
            for (const auto& [perm, sgn] : perms) {
                std::vector<std::vector<int>> pts = {p};
                std::vector<int> q = p;
                for (int step : perm) {
                    q[step] += 1;
                    pts.push_back(q);
                }
                bld.add_simplex(pts, sgn);
            }
        }
    } while (advance());

    CellComplex cx = bld.finish();
    std::string ds;
    for (int i = 0; i < n; ++i)
        ds += (i ? "," : "") + std::to_string(dims[i]);
    cx.name = "torus(" + ds + "," + (kind == ComplexKind::cubical ? "cubical" : "simplicial") + ")";
    return cx;
}

inline CellComplex build_torus(const std::vector<int>& dims, ComplexKind kind) {
    if (dims.size() != 2 && dims.size() != 3)
        throw std::runtime_error("build_torus: dims must have length 2 or 3");
    return build_torus_nd(dims, kind);
}

// ---------------------------------------------------------------------------
// Staircase (coordinate-order) triangulation of a cubical complex. Vertex ids
// are preserved; each d-cube contributes d! simplices given by monotone
// corner-mask chains. Works on periodic complexes: a refined simplex is keyed
// by its minimal containing cubical face plus its corner chain within it, so
// identified faces glue correctly. Regions are inherited from that face.

namespace detail {

struct CubicalRefiner {
    const CellComplex& cx;
    CellComplex out;
    std::map<std::vector<int>, int> memo[5]; // per refined dimension

    explicit CubicalRefiner(const CellComplex& c) : cx(c) {
        out.kind = ComplexKind::simplicial;
        out.dim = cx.dim;
        out.name = cx.name + "+refined";
        out.cells.resize(cx.dim + 1);
        out.coords = cx.coords;
        for (int v = 0; v < cx.ncells(0); ++v) {
            Cell cell;
            cell.verts = {v};
            cell.region = cx.cells[0][v].region;
            out.cells[0].push_back(cell);
        }
    }

    // Simplex given by a strictly increasing chain of corner masks inside
    // cubical cell (d,i). Returns its id in the refined complex, creating it
    // (and its faces) on demand. sigma is used only at top dimension.
    int add_chain(int d, int i, std::vector<int> masks, int sigma) {
        int sd = int(masks.size()) - 1;
        if (sd == 0)
            return cx.cells[d][i].verts[masks[0]];
        // canonicalize into the minimal containing face
        int span = masks.front() ^ masks.back();
        if (masks.front() != 0 || span != (1 << d) - 1) {
            std::vector<int> span_axes;
            for (int l = 0; l < d; ++l)
                if ((span >> l) & 1)
                    span_axes.push_back(l);
            int face = cx.cub_subface(d, i, span_axes, masks.front());
            std::vector<int> cmasks;
            for (int m : masks) {
                int rel = m ^ masks.front(), cm = 0;
                for (size_t l = 0; l < span_axes.size(); ++l)
                    if ((rel >> span_axes[l]) & 1)
                        cm |= 1 << l;
                cmasks.push_back(cm);
            }
            return add_chain(int(span_axes.size()), face, cmasks, sigma);
        }
        std::vector<int> key = {d, i};
        key.insert(key.end(), masks.begin(), masks.end());
        auto it = memo[sd].find(key);
        if (it != memo[sd].end())
            return it->second;
        Cell cell;
        cell.sign = sigma;
        cell.region = cx.cells[d][i].region;
        for (int m : masks)
            cell.verts.push_back(cx.cells[d][i].verts[m]);
        for (int k = 0; k <= sd; ++k) {
            std::vector<int> fm;
            for (int j = 0; j <= sd; ++j)
                if (j != k)
                    fm.push_back(masks[j]);
            cell.faces.push_back(add_chain(d, i, fm, 1));
        }
        int id = int(out.cells[sd].size());
        memo[sd][key] = id;
        out.cells[sd].push_back(std::move(cell));
        return id;
    }
};

} // namespace detail

inline CellComplex refine_cubical(const CellComplex& cx) {
    if (cx.kind != ComplexKind::cubical)
        throw std::runtime_error("refine_cubical: input must be cubical");
    detail::CubicalRefiner ref(cx);
    auto perms = detail::permutations_signed(cx.dim);
    for (int i = 0; i < cx.ncells(cx.dim); ++i)
        for (const auto& [perm, sgn] : perms) {
            std::vector<int> masks = {0};
            for (int step : perm)
                masks.push_back(masks.back() | (1 << step));
            ref.add_chain(cx.dim, i, masks, sgn * cx.cells[cx.dim][i].sign);
        }
    CellComplex out = std::move(ref.out);
    detail::finalize_complex(out);
    return out;
}

} // namespace cupcode
