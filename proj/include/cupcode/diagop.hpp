#pragma once

#include "cupcode/cochain.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cupcode {

// Diagonal phase operators. A DiagOp is a sum of terms
//
//     coeff * integral_region (f_1 u f_2 u ... u f_k)
//
// where each factor is a {0,1}-valued cochain read off a gauge configuration:
// a per-color edge field, a pointwise (cup-1) product of two edge fields, or
// the indicator of a single vertex. Coefficients are exponents of
// zeta_16 = exp(i pi / 8), so 1 = sqrt(T), 2 = T, 4 = S, 8 = Z mod 16, and
// the value of the operator on a configuration is zeta_16^eval.

enum class FactorKind {
    gauge,       // a_c for one color: 1-cochain of edge bits
    gauge_cup1,  // edgewise product a_c * a_c2 (cup-1 of two gauge fields)
    vertex_hat,  // indicator of one vertex, degree 0
    vertex_star, // coboundary of a vertex indicator: 1 on edges touching the
                 // vertex once, degree 1, independent of the configuration
};

struct DiagFactor {
    FactorKind kind = FactorKind::gauge;
    int color = -1;
    int color2 = -1;
    int cell = -1;

    int degree() const { return kind == FactorKind::vertex_hat ? 0 : 1; }

    // 0/1 value of a vertex_star factor on an edge: the parity of endpoints
    // equal to the vertex (a loop through the vertex contributes 0).
    int star_value(const CellComplex& cx, int edge) const {
        const std::vector<int>& ev = cx.cells[1][edge].verts;
        return ((ev[0] == cell ? 1 : 0) + (ev[1] == cell ? 1 : 0)) & 1;
    }

    static DiagFactor gauge(int c) {
        DiagFactor f;
        f.kind = FactorKind::gauge;
        f.color = c;
        return f;
    }
    static DiagFactor gauge_cup1(int c, int c2) {
        DiagFactor f;
        f.kind = FactorKind::gauge_cup1;
        f.color = c;
        f.color2 = c2;
        return f;
    }
    static DiagFactor vertex_hat(int v) {
        DiagFactor f;
        f.kind = FactorKind::vertex_hat;
        f.cell = v;
        return f;
    }
    static DiagFactor vertex_star(int v) {
        DiagFactor f;
        f.kind = FactorKind::vertex_star;
        f.cell = v;
        return f;
    }
};

struct DiagTerm {
    int coeff = 0;      // zeta_16 exponent, taken mod 16
    std::string region; // "" selects every cell of the matching dimension
    std::vector<DiagFactor> factors;
};

struct DiagOp {
    const CellComplex* cx = nullptr;
    int ncolors = 0;
    std::string name;
    std::vector<DiagTerm> terms;
};

// Transversal CNOT layer: (control color, target color) pairs acting on every
// edge, applied left to right. Each pair is an involution; a layer of pairs
// with a shared target commutes within itself.
struct CnotLayer {
    std::vector<std::pair<int, int>> pairs;
};

// Evaluate the zeta_16 exponent of op on a configuration. `bit(edge, color)`
// must return the 0/1 value of that color's field on that edge.
template <class Getter>
int eval_diag(const DiagOp& op, Getter&& bit) {
    const CellComplex& cx = *op.cx;
    long long total = 0;
    for (const DiagTerm& term : op.terms) {
        std::vector<int> degs;
        int deg = 0;
        for (const DiagFactor& f : term.factors) {
            if (f.kind == FactorKind::gauge_cup1 && cx.kind == ComplexKind::cubical)
                throw std::runtime_error("eval_diag: cup-1 factor needs a simplicial complex");
            degs.push_back(f.degree());
            deg += f.degree();
        }
        for (int i : cx.region_cells(deg, term.region)) {
            long long cell_sum = 0;
            for (const CupPlacement& pl : cup_placements(cx, deg, i, degs)) {
                int prod = pl.sign;
                for (size_t j = 0; j < term.factors.size() && prod != 0; ++j) {
                    const DiagFactor& f = term.factors[j];
                    int v = 0;
                    switch (f.kind) {
                    case FactorKind::gauge:
                        v = bit(pl.cells[j], f.color);
                        break;
                    case FactorKind::gauge_cup1:
                        v = bit(pl.cells[j], f.color) & bit(pl.cells[j], f.color2);
                        break;
                    case FactorKind::vertex_hat:
                        v = pl.cells[j] == f.cell ? 1 : 0;
                        break;
                    case FactorKind::vertex_star:
                        v = f.star_value(cx, pl.cells[j]);
                        break;
                    }
                    prod *= v;
                }
                cell_sum += prod;
            }
            total += (long long)term.coeff * cx.cells[deg][i].sign * cell_sum;
        }
    }
    return int(((total % 16) + 16) % 16);
}

// ---------------------------------------------------------------------------
// Gate compilation. Expanding every term over cup placements gives a sum of
// monomials c * x_1 ... x_k in distinct edge-color variables (bits square to
// themselves, so repeats are merged). Each monomial becomes diagonal phase
// gates on the touched qubits.

struct Gate {
    std::string name;
    std::vector<std::pair<int, int>> vars; // (edge, color), ascending
};

struct CompiledGates {
    int global_phase_exp = 0; // exponent of the variable-free part
    std::vector<Gate> gates;
};

// zeta_16 exponent contributed by one gate: coeff * product of its bits
inline int gate_coeff(const std::string& name) {
    static const std::map<std::string, int> k = {
        {"sqrtT", 1}, {"T", 2},     {"S", 4},     {"Z", 8},    {"Sdag", 12},
        {"Tdag", 14}, {"CS", 4},    {"CZ", 8},    {"CSdag", 12}, {"CTdag", 14},
        {"CCS", 4},   {"CCZ", 8},   {"CCCZ", 8},
    };
    auto it = k.find(name);
    if (it == k.end())
        throw std::runtime_error("gate_coeff: unknown gate " + name);
    return it->second;
}

namespace detail {

inline std::string var_str(const std::vector<std::pair<int, int>>& vars) {
    std::string s;
    for (auto [e, c] : vars)
        s += "(e" + std::to_string(e) + ",c" + std::to_string(c) + ")";
    return s;
}

inline void emit_phase_gates(int k, const std::vector<std::pair<int, int>>& vars,
                             std::vector<Gate>& out) {
    k = ((k % 16) + 16) % 16;
    if (k == 0)
        return;
    auto push = [&](const char* name) { out.push_back({name, vars}); };
    switch (vars.size()) {
    case 1: {
        int rest = k;
        if (k >= 14) {
            push("Tdag");
            rest = k - 14;
        } else if (k >= 12) {
            push("Sdag");
            rest = k - 12;
        } else if (k >= 8) {
            push("Z");
            rest = k - 8;
        }
        if (rest & 4)
            push("S");
        if (rest & 2)
            push("T");
        if (rest & 1)
            push("sqrtT");
        return;
    }
    case 2: {
        if (k % 2 != 0)
            throw std::runtime_error("compile: odd coefficient " + std::to_string(k) +
                                     " on qubit pair " + var_str(vars));
        if (k % 4 == 2) {
            push("CTdag");
            k = (k + 2) % 16;
        }
        if (k == 4)
            push("CS");
        else if (k == 8)
            push("CZ");
        else if (k == 12)
            push("CSdag");
        return;
    }
    case 3: {
        if (k % 4 != 0)
            throw std::runtime_error("compile: coefficient " + std::to_string(k) +
                                     " not a multiple of 4 on qubit triple " + var_str(vars));
        if (k == 4) {
            push("CCS");
        } else if (k == 8) {
            push("CCZ");
        } else { // 12
            push("CCZ");
            push("CCS");
        }
        return;
    }
    case 4: {
        if (k != 8)
            throw std::runtime_error("compile: coefficient " + std::to_string(k) +
                                     " not realizable on qubit quadruple " + var_str(vars));
        push("CCCZ");
        return;
    }
    default:
        throw std::runtime_error("compile: monomial touches " + std::to_string(vars.size()) +
                                 " qubits, " + var_str(vars));
    }
}

} // namespace detail

inline CompiledGates compile_to_gates(const DiagOp& op) {
    const CellComplex& cx = *op.cx;
    std::map<std::vector<std::pair<int, int>>, int> monomials;
    int constant = 0;
    for (const DiagTerm& term : op.terms) {
        std::vector<int> degs;
        int deg = 0;
        for (const DiagFactor& f : term.factors) {
            if (f.kind == FactorKind::gauge_cup1 && cx.kind == ComplexKind::cubical)
                throw std::runtime_error("compile: cup-1 factor needs a simplicial complex");
            degs.push_back(f.degree());
            deg += f.degree();
        }
        for (int i : cx.region_cells(deg, term.region)) {
            int w = cx.cells[deg][i].sign;
            for (const CupPlacement& pl : cup_placements(cx, deg, i, degs)) {
                std::vector<std::pair<int, int>> vars;
                bool dead = false;
                for (size_t j = 0; j < term.factors.size(); ++j) {
                    const DiagFactor& f = term.factors[j];
                    switch (f.kind) {
                    case FactorKind::gauge:
                        vars.push_back({pl.cells[j], f.color});
                        break;
                    case FactorKind::gauge_cup1:
                        vars.push_back({pl.cells[j], f.color});
                        vars.push_back({pl.cells[j], f.color2});
                        break;
                    case FactorKind::vertex_hat:
                        dead = dead || pl.cells[j] != f.cell;
                        break;
                    case FactorKind::vertex_star:
                        dead = dead || f.star_value(cx, pl.cells[j]) == 0;
                        break;
                    }
                }
                if (dead)
                    continue;
                std::sort(vars.begin(), vars.end());
                vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
                int c = term.coeff * w * pl.sign;
                if (vars.empty())
                    constant += c;
                else
                    monomials[vars] += c;
            }
        }
    }
    CompiledGates out;
    out.global_phase_exp = ((constant % 16) + 16) % 16;
    for (const auto& [vars, c] : monomials)
        detail::emit_phase_gates(c, vars, out.gates);
    return out;
}

} // namespace cupcode
