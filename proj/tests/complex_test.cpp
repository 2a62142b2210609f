#include "cupcode/cell_complex.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace cupcode;

namespace {

// Transitive closure of the face relation: all cells of every dimension lying
// in the closure of (d,i).
std::set<std::pair<int, int>> closure_of(const CellComplex& cx, int d, int i) {
    std::set<std::pair<int, int>> out;
    std::vector<std::pair<int, int>> stack = {{d, i}};
    while (!stack.empty()) {
        auto [cd, ci] = stack.back();
        stack.pop_back();
        if (!out.insert({cd, ci}).second)
            continue;
        if (cd > 0)
            for (auto [f, s] : cx.boundary(cd, ci))
                stack.push_back({cd - 1, f});
    }
    return out;
}

void expect_branching_acyclic(const CellComplex& cx) {
    // Within each 2-cell, edge directions (vertex tuple order) must not close
    // a directed cycle on the cell's corner positions.
    for (int i = 0; i < cx.ncells(2); ++i) {
        const Cell& c = cx.cells[2][i];
        int n = int(c.verts.size());
        // map: for each edge of the cell, find which corner positions it uses
        // and record the direction; then look for a directed cycle among
        // positions (n is 3 or 4, brute force).
        std::vector<std::vector<int>> adj(n);
        auto positions_of_edge = [&](int e) {
            const Cell& ec = cx.cells[1][e];
            // locate a pair of positions whose vertices match the edge tuple
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (a == b)
                        continue;
                    if (c.verts[a] == ec.verts[0] && c.verts[b] == ec.verts[1])
                        return std::pair<int, int>(a, b);
                }
            return std::pair<int, int>(-1, -1);
        };
        for (auto [e, s] : cx.boundary(2, i)) {
            auto [a, b] = positions_of_edge(e);
            ASSERT_GE(a, 0);
            adj[a].push_back(b);
        }
        // DFS cycle check
        std::vector<int> state(n, 0);
        std::function<bool(int)> has_cycle = [&](int u) {
            state[u] = 1;
            for (int v : adj[u]) {
                if (state[v] == 1)
                    return true;
                if (state[v] == 0 && has_cycle(v))
                    return true;
            }
            state[u] = 2;
            return false;
        };
        for (int u = 0; u < n; ++u)
            if (state[u] == 0)
                EXPECT_FALSE(has_cycle(u));
    }
}

void expect_hinges_in_both_closures(const CellComplex& cx) {
    // every hinge_{i,j} cell lies in the closure of a bdry_i cell and of a
    // bdry_j cell
    for (int d = 0; d <= cx.dim; ++d)
        for (int i = 0; i < cx.ncells(d); ++i) {
            const std::string& r = cx.cells[d][i].region;
            if (r.rfind("hinge_", 0) != 0)
                continue;
            std::string a = "bdry_" + r.substr(6, 1), b = "bdry_" + r.substr(8, 1);
            for (const std::string& want : {a, b}) {
                bool found = false;
                for (int fd = d; fd <= cx.dim && !found; ++fd)
                    for (int fi = 0; fi < cx.ncells(fd) && !found; ++fi)
                        if (cx.cells[fd][fi].region == want &&
                            closure_of(cx, fd, fi).count({d, i}))
                            found = true;
                EXPECT_TRUE(found) << r << " cell not in closure of " << want;
            }
        }
}

} // namespace

TEST(Complex, TrianglePatchSimplicialSize1) {
    CellComplex cx = build_triangle_lattice(1, ComplexKind::simplicial);
    EXPECT_EQ(cx.ncells(0), 3);
    EXPECT_EQ(cx.ncells(1), 3);
    EXPECT_EQ(cx.ncells(2), 1);
    // one edge in each boundary region
    std::map<std::string, int> count;
    for (int e = 0; e < 3; ++e)
        count[cx.cells[1][e].region]++;
    EXPECT_EQ(count["L_r"], 1);
    EXPECT_EQ(count["L_b"], 1);
    EXPECT_EQ(count["L_rb"], 1);
    // vertices: (0,0) -> id 0, (1,0) -> id 1, (0,1) -> id 2 in global order;
    // bottom edge (0,1) is L_rb, left edge (0,2) is L_r, hypotenuse is L_b
    auto region_of_edge = [&](int u, int v) {
        for (int e = 0; e < 3; ++e)
            if (cx.cells[1][e].verts == std::vector<int>{u, v})
                return cx.cells[1][e].region;
        return std::string("missing");
    };
    EXPECT_EQ(region_of_edge(0, 1), "L_rb");
    EXPECT_EQ(region_of_edge(0, 2), "L_r");
    EXPECT_EQ(region_of_edge(1, 2), "L_b");
    EXPECT_EQ(cx.cells[2][0].sign, 1);
    // the L_rb edge carries induced boundary orientation +1 (this feeds the
    // boundary term of the 2D membrane operator)
    for (int e = 0; e < 3; ++e)
        if (cx.cells[1][e].region == "L_rb")
            EXPECT_EQ(cx.cells[1][e].sign, 1);
    EXPECT_EQ(cx.euler_characteristic(), 1);
    expect_branching_acyclic(cx);
}

TEST(Complex, TrianglePatchCubical) {
    CellComplex cx = build_triangle_lattice(2, ComplexKind::cubical);
    EXPECT_EQ(cx.ncells(0), 9);
    EXPECT_EQ(cx.ncells(1), 12);
    EXPECT_EQ(cx.ncells(2), 4);
    // vertex ids follow row-major coordinates
    EXPECT_EQ(cx.coords[4], (std::vector<int>{1, 1}));
    // region tallies: 2 left (L_r), 2 top (L_b), 2+2 bottom+right (L_rb)
    std::map<std::string, int> count;
    for (int e = 0; e < cx.ncells(1); ++e)
        count[cx.cells[1][e].region]++;
    EXPECT_EQ(count["L_r"], 2);
    EXPECT_EQ(count["L_b"], 2);
    EXPECT_EQ(count["L_rb"], 4);
    EXPECT_EQ(count["bulk"], 4);
    // plaquette corner order: 0=(0,0),1=(1,0),2=(0,1),3=(1,1)
    const Cell& p = cx.cells[2][0];
    EXPECT_EQ(cx.coords[p.verts[0]], (std::vector<int>{0, 0}));
    EXPECT_EQ(cx.coords[p.verts[1]], (std::vector<int>{1, 0}));
    EXPECT_EQ(cx.coords[p.verts[2]], (std::vector<int>{0, 1}));
    EXPECT_EQ(cx.coords[p.verts[3]], (std::vector<int>{1, 1}));
    // induced orientation on L_rb edges is +1
    for (int e = 0; e < cx.ncells(1); ++e)
        if (cx.cells[1][e].region == "L_rb")
            EXPECT_EQ(cx.cells[1][e].sign, 1);
    expect_branching_acyclic(cx);

    for (int k = 1; k <= 4; ++k) {
        CellComplex c2 = build_triangle_lattice(k, ComplexKind::cubical);
        EXPECT_EQ(c2.ncells(1), 2 * k * (k + 1));
        EXPECT_EQ(c2.ncells(2), k * k);
    }
}

TEST(Complex, TrianglePatchSimplicialSize2) {
    CellComplex cx = build_triangle_lattice(2, ComplexKind::simplicial);
    EXPECT_EQ(cx.ncells(0), 9);
    EXPECT_EQ(cx.ncells(1), 16); // 12 grid + 4 diagonals
    EXPECT_EQ(cx.ncells(2), 8);
    EXPECT_EQ(cx.euler_characteristic(), 1);
    int plus = 0, minus = 0;
    for (int i = 0; i < cx.ncells(2); ++i)
        (cx.cells[2][i].sign > 0 ? plus : minus)++;
    EXPECT_EQ(plus, 4);
    EXPECT_EQ(minus, 4);
    expect_branching_acyclic(cx);
}

TEST(Complex, BuilderRejections) {
    EXPECT_THROW(build_triangle_lattice(0, ComplexKind::cubical), std::runtime_error);
    EXPECT_THROW(build_tetrahedron(0), std::runtime_error);
    EXPECT_THROW(build_torus({2}, ComplexKind::cubical), std::runtime_error);
    EXPECT_THROW(build_torus({2, 2, 2, 2}, ComplexKind::cubical), std::runtime_error);
    EXPECT_THROW(build_torus({2, 0}, ComplexKind::cubical), std::runtime_error);
}

TEST(Complex, TetrahedronRefinement1) {
    CellComplex cx = build_tetrahedron(1);
    EXPECT_EQ(cx.ncells(0), 4);
    EXPECT_EQ(cx.ncells(1), 6);
    EXPECT_EQ(cx.ncells(2), 4);
    EXPECT_EQ(cx.ncells(3), 1);
    // four face regions, six hinge regions
    std::map<std::string, int> fcount, ecount;
    for (int f = 0; f < 4; ++f)
        fcount[cx.cells[2][f].region]++;
    for (int e = 0; e < 6; ++e)
        ecount[cx.cells[1][e].region]++;
    for (int i = 1; i <= 4; ++i)
        EXPECT_EQ(fcount["bdry_" + std::to_string(i)], 1);
    for (const char* h : {"hinge_1_2", "hinge_1_3", "hinge_1_4", "hinge_2_3", "hinge_2_4", "hinge_3_4"})
        EXPECT_EQ(ecount[h], 1);
    // hinge_1_4 is the edge shared by bdry_1 and bdry_4: vertices 1 and 2
    for (int e = 0; e < 6; ++e)
        if (cx.cells[1][e].region == "hinge_1_4")
            EXPECT_EQ(cx.cells[1][e].verts, (std::vector<int>{1, 2}));
    // bdry_4 (face on vertices 1,2,3) carries induced orientation +1
    for (int f = 0; f < 4; ++f)
        if (cx.cells[2][f].region == "bdry_4") {
            EXPECT_EQ(cx.cells[2][f].verts, (std::vector<int>{1, 2, 3}));
            EXPECT_EQ(cx.cells[2][f].sign, 1);
        }
    expect_hinges_in_both_closures(cx);
    expect_branching_acyclic(cx);
}

TEST(Complex, TetrahedronRefinement2) {
    CellComplex cx = build_tetrahedron(2);
    EXPECT_EQ(cx.ncells(0), 10);
    EXPECT_EQ(cx.ncells(1), 25);
    EXPECT_EQ(cx.ncells(2), 24);
    EXPECT_EQ(cx.ncells(3), 8);
    EXPECT_EQ(cx.euler_characteristic(), 1);
    // each original boundary face contributes 4 sub-faces
    std::map<std::string, int> fcount;
    for (int f = 0; f < cx.ncells(2); ++f)
        fcount[cx.cells[2][f].region]++;
    for (int i = 1; i <= 4; ++i)
        EXPECT_EQ(fcount["bdry_" + std::to_string(i)], 4);
    EXPECT_EQ(fcount["bulk"], 8);
    // each original edge is split into two hinge edges
    std::map<std::string, int> ecount;
    for (int e = 0; e < cx.ncells(1); ++e)
        ecount[cx.cells[1][e].region]++;
    for (const char* h : {"hinge_1_2", "hinge_1_3", "hinge_1_4", "hinge_2_3", "hinge_2_4", "hinge_3_4"})
        EXPECT_EQ(ecount[h], 2);
    expect_hinges_in_both_closures(cx);
    expect_branching_acyclic(cx);
}

TEST(Complex, TetrahedronRefinement3) {
    CellComplex cx = build_tetrahedron(3);
    EXPECT_EQ(cx.ncells(3), 64);
    EXPECT_EQ(cx.euler_characteristic(), 1);
}

TEST(Complex, TorusCubical) {
    CellComplex t22 = build_torus({2, 2}, ComplexKind::cubical);
    EXPECT_EQ(t22.ncells(0), 4);
    EXPECT_EQ(t22.ncells(1), 8);
    EXPECT_EQ(t22.ncells(2), 4);
    EXPECT_EQ(t22.euler_characteristic(), 0);
    EXPECT_TRUE(t22.boundary_regions().empty());

    CellComplex t111 = build_torus({1, 1, 1}, ComplexKind::cubical);
    EXPECT_EQ(t111.ncells(0), 1);
    EXPECT_EQ(t111.ncells(1), 3);
    EXPECT_EQ(t111.ncells(2), 3);
    EXPECT_EQ(t111.ncells(3), 1);
    EXPECT_TRUE(t111.boundary_regions().empty());
    // each square of the minimal 3-torus meets each of its edges twice:
    // the two faces of the cube along any axis are identified
    for (auto [f, s] : t111.boundary(3, 0)) {
        int twice = 0;
        for (auto [g, t] : t111.boundary(3, 0))
            if (g == f)
                ++twice;
        EXPECT_EQ(twice, 2);
    }
}

TEST(Complex, TorusSimplicial) {
    CellComplex t = build_torus({1, 1}, ComplexKind::simplicial);
    EXPECT_EQ(t.ncells(0), 1);
    EXPECT_EQ(t.ncells(1), 3); // two axis loops + diagonal
    EXPECT_EQ(t.ncells(2), 2);
    EXPECT_EQ(t.euler_characteristic(), 0);

    CellComplex t3 = build_torus({1, 1, 1}, ComplexKind::simplicial);
    EXPECT_EQ(t3.ncells(0), 1);
    EXPECT_EQ(t3.ncells(1), 7); // 3 axis + 3 face diagonals + body diagonal
    EXPECT_EQ(t3.ncells(2), 12);
    EXPECT_EQ(t3.ncells(3), 6);
    EXPECT_EQ(t3.euler_characteristic(), 0);

    CellComplex t22 = build_torus({2, 2}, ComplexKind::simplicial);
    EXPECT_EQ(t22.ncells(0), 4);
    EXPECT_EQ(t22.ncells(1), 12);
    EXPECT_EQ(t22.ncells(2), 8);
    EXPECT_EQ(t22.euler_characteristic(), 0);
    expect_branching_acyclic(t22);
}

TEST(Complex, RefineCubicalTorus) {
    CellComplex c = build_torus({2, 2}, ComplexKind::cubical);
    CellComplex r = refine_cubical(c);
    EXPECT_EQ(r.kind, ComplexKind::simplicial);
    EXPECT_EQ(r.ncells(0), 4);
    EXPECT_EQ(r.ncells(1), 12);
    EXPECT_EQ(r.ncells(2), 8);
    EXPECT_EQ(r.euler_characteristic(), 0);
    // matches the directly built staircase torus cell-for-cell in counts
    CellComplex d = build_torus({2, 2}, ComplexKind::simplicial);
    for (int dd = 0; dd <= 2; ++dd)
        EXPECT_EQ(r.ncells(dd), d.ncells(dd));
}

TEST(Complex, RefineCubicalPatchKeepsRegions) {
    CellComplex c = build_triangle_lattice(2, ComplexKind::cubical);
    CellComplex r = refine_cubical(c);
    EXPECT_EQ(r.ncells(0), 9);
    EXPECT_EQ(r.ncells(1), 16);
    EXPECT_EQ(r.ncells(2), 8);
    std::map<std::string, int> count;
    for (int e = 0; e < r.ncells(1); ++e)
        count[r.cells[1][e].region]++;
    EXPECT_EQ(count["L_r"], 2);
    EXPECT_EQ(count["L_b"], 2);
    EXPECT_EQ(count["L_rb"], 4);
    EXPECT_EQ(count["bulk"], 8); // 4 interior grid edges + 4 diagonals
    expect_branching_acyclic(r);
}

TEST(Complex, RefineCubical3dMinimalTorus) {
    CellComplex c = build_torus({1, 1, 1}, ComplexKind::cubical);
    CellComplex r = refine_cubical(c);
    EXPECT_EQ(r.ncells(0), 1);
    EXPECT_EQ(r.ncells(1), 7);
    EXPECT_EQ(r.ncells(3), 6);
    EXPECT_EQ(r.euler_characteristic(), 0);
}

TEST(Complex, SubcellNavigation) {
    CellComplex cx = build_triangle_lattice(1, ComplexKind::simplicial);
    int tri = 0;
    int e01 = cx.subsimplex(2, tri, {0, 1});
    int e02 = cx.subsimplex(2, tri, {0, 2});
    int e12 = cx.subsimplex(2, tri, {1, 2});
    EXPECT_EQ(cx.cells[1][e01].verts, (std::vector<int>{0, 1}));
    EXPECT_EQ(cx.cells[1][e02].verts, (std::vector<int>{0, 2}));
    EXPECT_EQ(cx.cells[1][e12].verts, (std::vector<int>{1, 2}));
    EXPECT_EQ(cx.subsimplex(2, tri, {1}), cx.cells[1][e01].verts[1]);

    CellComplex q = build_triangle_lattice(1, ComplexKind::cubical);
    // bottom edge: axes {0} anchored at corner 0; right edge: axes {1}
    // anchored at corner 1 (x-bit set)
    int bottom = q.cub_subface(2, 0, {0}, 0);
    int right = q.cub_subface(2, 0, {1}, 1);
    int left = q.cub_subface(2, 0, {1}, 0);
    int top = q.cub_subface(2, 0, {0}, 2);
    EXPECT_EQ(q.cells[1][bottom].verts, (std::vector<int>{0, 1}));
    EXPECT_EQ(q.cells[1][right].verts, (std::vector<int>{1, 3}));
    EXPECT_EQ(q.cells[1][left].verts, (std::vector<int>{0, 2}));
    EXPECT_EQ(q.cells[1][top].verts, (std::vector<int>{2, 3}));
    // corner vertices by full descent
    EXPECT_EQ(q.cub_subface(2, 0, {}, 3), 3);
}

TEST(Complex, StarEdgesMultiplicity) {
    // on the 1x1 torus both endpoints of each loop are the same vertex, so
    // each edge appears twice in its star
    CellComplex t = build_torus({1, 1}, ComplexKind::cubical);
    ASSERT_EQ(int(t.star_edges.size()), 1);
    EXPECT_EQ(int(t.star_edges[0].size()), 4); // two loops, each twice
}
