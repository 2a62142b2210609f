#pragma once

#include "cupcode/rng.hpp"
#include "cupcode/stab_code.hpp"
#include "cupcode/zeta16.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cupcode {

// Exact sparse simulation over the configuration basis. Amplitudes are
// Z[zeta_16] elements over a shared power-of-2 denominator, so every check in
// the experiments is an integer comparison.

// One bit per (edge, color) qubit, edge-major; up to 128 qubit bits.
struct Config {
    std::array<uint64_t, 2> w{};

    bool get(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void set(int i, bool v) {
        if (v)
            w[i >> 6] |= uint64_t(1) << (i & 63);
        else
            w[i >> 6] &= ~(uint64_t(1) << (i & 63));
    }
    void flip(int i) { w[i >> 6] ^= uint64_t(1) << (i & 63); }

    Config operator^(const Config& o) const {
        Config r;
        r.w[0] = w[0] ^ o.w[0];
        r.w[1] = w[1] ^ o.w[1];
        return r;
    }
    bool operator==(const Config& o) const { return w == o.w; }
    bool operator!=(const Config& o) const { return w != o.w; }
    bool operator<(const Config& o) const {
        return w[1] != o.w[1] ? w[1] < o.w[1] : w[0] < o.w[0];
    }
};

inline Config config_from_f2(const F2Vec& v) {
    if (v.size() > 128)
        throw std::runtime_error("Config: more than 128 qubit bits");
    Config c;
    for (int i = 0; i < v.size(); ++i)
        if (v.get(i))
            c.flip(i);
    return c;
}

// A ring element over a power-of-2 denominator: z / 2^denom_exp.
struct ScaledZeta {
    Zeta16 z;
    int denom_exp = 0;

    ScaledZeta reduced() const {
        ScaledZeta r = *this;
        while (r.denom_exp > 0 && r.all_even())
            r = {r.z.half(), r.denom_exp - 1};
        return r;
    }

    bool all_even() const {
        for (int64_t x : z.c)
            if (x & 1)
                return false;
        return true;
    }

    bool equals(const ScaledZeta& o) const {
        ScaledZeta a = reduced(), b = o.reduced();
        if (a.z.is_zero())
            return b.z.is_zero();
        return a.denom_exp == b.denom_exp && a.z == b.z;
    }

    bool is_zero() const { return z.is_zero(); }
    bool is_one() const { return equals({Zeta16::one(), 0}); }

    // If this equals zeta^k exactly, report k; else -1.
    int as_zeta_power() const {
        ScaledZeta r = reduced();
        return r.denom_exp == 0 ? r.z.as_zeta_power() : -1;
    }

    std::string str() const {
        ScaledZeta r = reduced();
        std::string s = r.z.str();
        if (r.denom_exp > 0)
            s = "(" + s + ")/2^" + std::to_string(r.denom_exp);
        return s;
    }
};

// Phased Pauli operator: zeta^phase_exp * (X flips) * (Z signs), with the Z
// part evaluated on the configuration before the flips.
struct PhasedPauli {
    int phase_exp = 0;
    std::vector<std::pair<int, int>> x; // (edge, color) flips
    std::vector<std::pair<int, int>> z; // (edge, color) sign factors
};

struct SparseState {
    const Code* code = nullptr;
    std::map<Config, Zeta16> amps;
    int denom_exp = 0; // state = amps / 2^denom_exp

    static SparseState basis_state(const Code& c, const Config& x) {
        SparseState s;
        s.code = &c;
        s.amps[x] = Zeta16::one();
        return s;
    }

    void add(const Config& x, const Zeta16& v) {
        if (v.is_zero())
            return;
        Zeta16& slot = amps[x];
        slot += v;
        if (slot.is_zero())
            amps.erase(x);
    }

    bool is_zero() const { return amps.empty(); }

    // Shrink the shared denominator when every amplitude coefficient is even.
    void canonicalize() {
        if (amps.empty()) {
            denom_exp = 0;
            return;
        }
        auto all_even = [&] {
            for (const auto& [x, z] : amps)
                for (int64_t c : z.c)
                    if (c & 1)
                        return false;
            return true;
        };
        while (denom_exp > 0 && all_even()) {
            for (auto& [x, z] : amps)
                z = z.half();
            denom_exp -= 1;
        }
    }

    // <this|other> as an exact ring element.
    ScaledZeta inner(const SparseState& o) const {
        Zeta16 acc;
        for (const auto& [x, z] : amps) {
            auto it = o.amps.find(x);
            if (it != o.amps.end())
                acc += z.conj() * it->second;
        }
        return ScaledZeta{acc, denom_exp + o.denom_exp}.reduced();
    }

    // norm^2 = num / 2^exp2 from per-entry magnitudes (always rational).
    std::pair<int64_t, int> norm2() const {
        int64_t num = 0;
        for (const auto& [x, z] : amps) {
            num += z.norm2_int();
            if (num > (int64_t(1) << 56))
                throw std::runtime_error("SparseState: norm bookkeeping overflow");
        }
        return {num, 2 * denom_exp};
    }

    // Rescale to exact norm 1; the squared norm must be a power of 2.
    void normalize() {
        auto [num, e2] = norm2();
        if (num == 0)
            throw std::runtime_error("SparseState: normalizing the zero state");
        if (num & (num - 1))
            throw std::runtime_error("SparseState: squared norm is not a power of 2");
        int m = 0;
        while ((int64_t(1) << m) < num)
            ++m;
        int diff = m - e2; // norm^2 = 2^diff; scale by 2^{-diff/2}
        if (diff & 1) {
            // fold the odd half into the numerators: amps *= sqrt2
            Zeta16 s2 = Zeta16::sqrt2();
            for (auto& [x, z] : amps)
                z = z * s2;
            diff += 1;
        }
        denom_exp += diff / 2;
        if (denom_exp < 0) {
            int64_t f = int64_t(1) << (-denom_exp);
            for (auto& [x, z] : amps)
                z = z * Zeta16::from_int(f);
            denom_exp = 0;
        }
        canonicalize();
    }
};

inline void apply_pauli(SparseState& s, const PhasedPauli& p) {
    const Code& code = *s.code;
    std::map<Config, Zeta16> out;
    for (const auto& [x, z] : s.amps) {
        int exp = p.phase_exp;
        for (auto [e, c] : p.z)
            if (x.get(code.qubit(e, c)))
                exp += 8;
        Config y = x;
        for (auto [e, c] : p.x)
            y.flip(code.qubit(e, c));
        Zeta16& slot = out[y];
        slot += z.times_zeta_pow(exp);
        if (slot.is_zero())
            out.erase(y);
    }
    s.amps = std::move(out);
}

// Transversal CNOT layer on every edge; `reverse` applies the pairs in
// opposite order (the inverse, since each pair is an involution).
inline void apply_cnot_layer(SparseState& s, const CnotLayer& layer, bool reverse = false) {
    const Code& code = *s.code;
    int ne = code.cx().ncells(1);
    std::vector<std::pair<int, int>> pairs = layer.pairs;
    if (reverse)
        std::reverse(pairs.begin(), pairs.end());
    std::map<Config, Zeta16> out;
    for (const auto& [x, z] : s.amps) {
        Config y = x;
        for (auto [ctrl, tgt] : pairs)
            for (int e = 0; e < ne; ++e)
                if (y.get(code.qubit(e, ctrl)))
                    y.flip(code.qubit(e, tgt));
        Zeta16& slot = out[y];
        slot += z;
        if (slot.is_zero())
            out.erase(y);
    }
    s.amps = std::move(out);
}

// Diagonal phase operator; sign -1 applies the inverse.
inline void apply_diag(SparseState& s, const DiagOp& op, int sign = 1) {
    const Code& code = *s.code;
    for (auto& [x, z] : s.amps) {
        const Config& cfg = x;
        int exp = eval_diag(op, [&](int e, int c) { return cfg.get(code.qubit(e, c)) ? 1 : 0; });
        z = z.times_zeta_pow(sign * exp);
    }
}

// One stabilizer generator as an operator: Z-type is a diagonal sign; X-type
// applies the dressing phase and then the configuration flips (the staging of
// multi-color factors is already folded into the dressing terms).
inline void apply_generator(SparseState& s, const StabilizerGenerator& g) {
    const Code& code = *s.code;
    if (g.kind == "Z") {
        for (auto& [x, z] : s.amps) {
            int par = 0;
            for (auto [e, c] : g.z_support)
                par ^= x.get(code.qubit(e, c));
            if (par)
                z = z.times_zeta_pow(8);
        }
        return;
    }
    std::map<Config, Zeta16> out;
    for (const auto& [x, z] : s.amps) {
        const Config& cfg = x;
        int exp =
            eval_diag(g.dressing, [&](int e, int c) { return cfg.get(code.qubit(e, c)) ? 1 : 0; });
        Config y = x;
        for (auto [e, c] : g.x_layer)
            y.flip(code.qubit(e, c));
        Zeta16& slot = out[y];
        slot += z.times_zeta_pow(exp);
        if (slot.is_zero())
            out.erase(y);
    }
    s.amps = std::move(out);
}

// psi' = (1 + S) psi / 2.
inline void project(SparseState& s, const StabilizerGenerator& g) {
    SparseState t = s;
    apply_generator(t, g);
    for (const auto& [x, z] : t.amps)
        s.add(x, z);
    s.denom_exp += 1;
    s.canonicalize();
}

// A circuit is a list of steps applied first-to-last.
struct CircuitStep {
    enum class Kind { cnot, diag, diag_inverse, pauli, generator };
    Kind kind = Kind::cnot;
    CnotLayer cnot;
    DiagOp diag;
    PhasedPauli pauli;
    StabilizerGenerator gen;

    static CircuitStep cnot_step(CnotLayer l) {
        CircuitStep s;
        s.kind = Kind::cnot;
        s.cnot = std::move(l);
        return s;
    }
    static CircuitStep diag_step(DiagOp op, bool inverse = false) {
        CircuitStep s;
        s.kind = inverse ? Kind::diag_inverse : Kind::diag;
        s.diag = std::move(op);
        return s;
    }
    static CircuitStep pauli_step(PhasedPauli p) {
        CircuitStep s;
        s.kind = Kind::pauli;
        s.pauli = std::move(p);
        return s;
    }
    static CircuitStep generator_step(StabilizerGenerator g) {
        CircuitStep s;
        s.kind = Kind::generator;
        s.gen = std::move(g);
        return s;
    }
};

using Circuit = std::vector<CircuitStep>;

inline void apply_circuit(SparseState& s, const Circuit& circuit) {
    for (const CircuitStep& step : circuit) {
        switch (step.kind) {
        case CircuitStep::Kind::cnot:
            apply_cnot_layer(s, step.cnot);
            break;
        case CircuitStep::Kind::diag:
            apply_diag(s, step.diag);
            break;
        case CircuitStep::Kind::diag_inverse:
            apply_diag(s, step.diag, -1);
            break;
        case CircuitStep::Kind::pauli:
            apply_pauli(s, step.pauli);
            break;
        case CircuitStep::Kind::generator:
            apply_generator(s, step.gen);
            break;
        }
    }
}

// All configurations with flat gauge fields and satisfied boundary rows,
// enumerated deterministically from the F2 kernel basis (all-zero first).
inline std::vector<Config> flat_configs(const Code& code) {
    std::vector<F2Vec> basis = constraint_matrix(code, true, true).kernel_basis();
    int k = int(basis.size());
    if (k > 21)
        throw std::runtime_error("flat_configs: flat subspace has dimension " +
                                 std::to_string(k) + ", too large to enumerate");
    std::vector<Config> cbasis;
    for (const F2Vec& v : basis)
        cbasis.push_back(config_from_f2(v));
    std::vector<Config> out;
    out.reserve(size_t(1) << k);
    for (uint64_t idx = 0; idx < (uint64_t(1) << k); ++idx) {
        Config c;
        for (int i = 0; i < k; ++i)
            if ((idx >> i) & 1)
                c = c ^ cbasis[i];
        out.push_back(c);
    }
    return out;
}

inline bool is_flat(const Code& code, const Config& x) {
    F2Matrix m = constraint_matrix(code, true, true);
    for (int i = 0; i < m.rows(); ++i) {
        int par = 0;
        const F2Vec& row = m.row(i);
        for (int j = 0; j < row.size(); ++j)
            if (row.get(j) && x.get(j))
                par ^= 1;
        if (par)
            return false;
    }
    return true;
}

// Random elements of the kernel of an F2 constraint matrix.
struct KernelSampler {
    int nbits = 0;
    std::vector<F2Vec> basis;

    explicit KernelSampler(const F2Matrix& m) : nbits(m.cols()), basis(m.kernel_basis()) {}

    F2Vec sample_vec(Rng& rng) const {
        F2Vec v(nbits);
        for (const F2Vec& b : basis)
            if (rng.bit())
                v ^= b;
        return v;
    }

    Config sample(Rng& rng) const { return config_from_f2(sample_vec(rng)); }
};

// One projected representative per logical-Z sector, ordered by the sector
// bits (logical 0 = index bit 0). Throws if a sector projects to zero.
inline std::vector<SparseState> codespace_basis(const Code& code) {
    int nlog = int(code.logical_zs.size());
    if (nlog == 0)
        throw std::runtime_error("codespace_basis: code has no logicals defined");
    F2Matrix m = constraint_matrix(code, true, true);
    int nrows0 = m.rows();
    for (const auto& s : code.logical_zs) {
        F2Vec row(code.nqubits());
        for (auto [e, c] : s)
            row.set(code.qubit(e, c), true);
        m.append_row(row);
    }
    std::vector<SparseState> basis;
    for (int sector = 0; sector < (1 << nlog); ++sector) {
        F2Vec rhs(m.rows());
        for (int l = 0; l < nlog; ++l)
            rhs.set(nrows0 + l, (sector >> l) & 1);
        std::optional<F2Vec> rep = m.solve(rhs);
        if (!rep)
            throw std::runtime_error("codespace_basis: no flat configuration in logical sector " +
                                     std::to_string(sector));
        SparseState st = SparseState::basis_state(code, config_from_f2(*rep));
        for (const StabilizerGenerator& g : code.xgens)
            project(st, g);
        if (st.is_zero())
            throw std::runtime_error("codespace_basis: logical sector " + std::to_string(sector) +
                                     " projects to zero");
        basis.push_back(std::move(st));
    }
    return basis;
}

struct LogicalMatrix {
    int dim = 0;
    std::vector<ScaledZeta> m; // row-major

    const ScaledZeta& at(int a, int b) const { return m[a * dim + b]; }

    bool equals_diag(const std::vector<int>& zeta_exps) const {
        if (int(zeta_exps.size()) != dim)
            return false;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                ScaledZeta want =
                    a == b ? ScaledZeta{Zeta16::zeta_pow(zeta_exps[a]), 0} : ScaledZeta{};
                if (!at(a, b).equals(want))
                    return false;
            }
        return true;
    }

    std::string str() const {
        std::string s;
        for (int a = 0; a < dim; ++a) {
            s += a ? "; " : "[";
            for (int b = 0; b < dim; ++b)
                s += (b ? ", " : "") + at(a, b).str();
        }
        return s + "]";
    }
};

// Exact logical action of a codespace-preserving circuit: M_ab =
// <a|C|b> / (|a||b|). Leakage outside the codespace is a hard error carrying
// a witness configuration.
inline LogicalMatrix logical_matrix(const Code& code, const Circuit& circuit) {
    std::vector<SparseState> basis = codespace_basis(code);
    int dim = int(basis.size());
    std::vector<int> log_norm2(dim); // norm^2 = 2^{-log_norm2}
    for (int a = 0; a < dim; ++a) {
        auto [num, e2] = basis[a].norm2();
        if (num == 0 || (num & (num - 1)))
            throw std::runtime_error("logical_matrix: sector norm^2 is not a power of 2");
        int m = 0;
        while ((int64_t(1) << m) < num)
            ++m;
        log_norm2[a] = e2 - m;
    }
    LogicalMatrix out;
    out.dim = dim;
    out.m.assign(dim * dim, ScaledZeta{});
    for (int b = 0; b < dim; ++b) {
        SparseState img = basis[b];
        apply_circuit(img, circuit);
        // Residual = C|b> - sum_a |a> <a|C|b> / |a|^2; must vanish exactly.
        SparseState residual = img;
        for (int a = 0; a < dim; ++a) {
            ScaledZeta ip = basis[a].inner(img);
            // M_ab = ip / (|a| |b|) = ip * sqrt2^{log_norm2[a] + log_norm2[b]}
            int k = log_norm2[a] + log_norm2[b];
            if (k < 0)
                throw std::runtime_error("logical_matrix: unexpected sector norm");
            Zeta16 ez = ip.z;
            for (int i = 0; i < k; ++i)
                ez = ez * Zeta16::sqrt2();
            out.m[a * dim + b] = ScaledZeta{ez, ip.denom_exp}.reduced();
            // coeff against unnormalized |a>: ip / |a|^2 = ip * 2^{log_norm2[a]}
            Zeta16 num = ip.z;
            int dexp = ip.denom_exp - log_norm2[a];
            for (const auto& [x, z] : basis[a].amps) {
                // subtract coeff * z / 2^{basis denom}
                Zeta16 sub = num * z;
                int subden = dexp + basis[a].denom_exp;
                // align with residual denom
                int common = std::max(residual.denom_exp, subden);
                if (common > residual.denom_exp) {
                    Zeta16 f = Zeta16::from_int(int64_t(1) << (common - residual.denom_exp));
                    for (auto& [xx, zz] : residual.amps)
                        zz = zz * f;
                    residual.denom_exp = common;
                }
                Zeta16 f = Zeta16::from_int(int64_t(1) << (common - subden));
                residual.add(x, Zeta16::from_int(0) - sub * f);
            }
        }
        residual.canonicalize();
        if (!residual.is_zero())
            throw std::runtime_error("logical_matrix: circuit leaks out of the codespace (witness config present)");
    }
    return out;
}

namespace detail {

template <class Apply>
int measure_impl(SparseState& s, Rng& rng, Apply&& apply_obs) {
    SparseState img = s;
    apply_obs(img);
    SparseState plus = s, minus = s;
    for (const auto& [x, z] : img.amps) {
        plus.add(x, z);
        minus.add(x, Zeta16::from_int(0) - z);
    }
    plus.denom_exp += 1;
    minus.denom_exp += 1;
    plus.canonicalize();
    minus.canonicalize();
    auto [pn, pe] = plus.norm2();
    int outcome;
    if (pn == 0) {
        outcome = -1; // exact -1 eigenstate: the + branch cancelled entirely
    } else {
        auto [tn, te] = s.norm2();
        // p_plus = (pn / 2^pe) / (tn / 2^te) = pn / (tn * 2^shift); sample by
        // comparing u / 2^64 < p_plus exactly: u * tn < pn * 2^{64 - shift}.
        uint64_t u = rng.u64();
        int shift = pe - te; // >= 0: projection added denominator
        if (shift < 0 || shift > 60 || tn > (int64_t(1) << 56) || pn > (int64_t(1) << 56))
            throw std::runtime_error("measure: probability bookkeeping out of range");
        unsigned __int128 lhs = (unsigned __int128)u * (unsigned __int128)tn;
        unsigned __int128 rhs = ((unsigned __int128)pn) << (64 - shift);
        outcome = lhs < rhs ? 1 : -1;
    }
    s = outcome == 1 ? std::move(plus) : std::move(minus);
    if (s.is_zero())
        throw std::runtime_error("measure: selected a zero-probability branch");
    s.normalize();
    return outcome;
}

} // namespace detail

// Projective measurement of a stabilizer generator (squares to identity on
// the state's support); exact Born sampling, deterministic per seed.
inline int measure(SparseState& s, const StabilizerGenerator& g, Rng& rng) {
    return detail::measure_impl(s, rng, [&](SparseState& t) { apply_generator(t, g); });
}

inline int measure(SparseState& s, const PhasedPauli& p, Rng& rng) {
    return detail::measure_impl(s, rng, [&](SparseState& t) { apply_pauli(t, p); });
}

// ---------------------------------------------------------------------------
// Ground-state degeneracy on a closed 2-manifold: trace of the stabilizer
// projector over the flat subspace. Only generator subsets with trivial total
// X part contribute; on a connected complex these are, per color, the empty
// set or all vertices. The inner sum of dressing signs over the flat subspace
// is either enumerated directly or folded into an F2 quadratic form and
// evaluated as a Gauss sum.

namespace detail {

// Sum over t in F2^n of (-1)^{q(t)} for q(t) = sum_{i<j} A_ij t_i t_j +
// b.t + c, via repeated extraction of hyperbolic pairs:
// sum_{ti,tj} (-1)^{ti tj + ti P + tj Q} = 2 (-1)^{P Q}.
inline int64_t quad_gauss_sum(std::vector<F2Vec> A, F2Vec b, int c) {
    int n = b.size();
    std::vector<bool> active(n, true);
    int64_t factor = 1;
    int nactive = n;
    while (true) {
        int i = -1, j = -1;
        for (int p = 0; p < n && i < 0; ++p) {
            if (!active[p])
                continue;
            for (int q = 0; q < n; ++q)
                if (active[q] && q != p && A[p].get(q)) {
                    i = p;
                    j = q;
                    break;
                }
        }
        if (i < 0) {
            // purely affine on the remaining variables
            for (int p = 0; p < n; ++p)
                if (active[p] && b.get(p))
                    return 0;
            int64_t s = factor * (c ? -1 : 1);
            if (nactive > 60)
                throw std::runtime_error("quad_gauss_sum: result does not fit");
            return s << nactive;
        }
        // alpha = row_i, beta = row_j on the other active variables
        F2Vec alpha(n), beta(n);
        for (int p = 0; p < n; ++p) {
            if (!active[p] || p == i || p == j)
                continue;
            if (A[i].get(p))
                alpha.set(p, true);
            if (A[j].get(p))
                beta.set(p, true);
        }
        int bi = b.get(i), bj = b.get(j);
        active[i] = active[j] = false;
        nactive -= 2;
        factor *= 2;
        // fold in (alpha.t + bi)(beta.t + bj)
        for (int p = 0; p < n; ++p) {
            if (!active[p])
                continue;
            bool ap = alpha.get(p), bp = beta.get(p);
            if (ap && bp)
                b.flip(p); // t_p^2 = t_p
            if (ap && bj)
                b.flip(p);
            if (bp && bi)
                b.flip(p);
            if (!ap && !bp)
                continue;
            for (int q = p + 1; q < n; ++q) {
                if (!active[q])
                    continue;
                bool aq = alpha.get(q), bq = beta.get(q);
                if ((ap && bq) ^ (aq && bp)) {
                    A[p].flip(q);
                    A[q].flip(p);
                }
            }
        }
        c ^= bi & bj;
    }
}

} // namespace detail

// direct_limit caps the flat-subspace dimension enumerated directly; larger
// instances go through the quadratic-form Gauss sum (0 forces that path).
inline int64_t gsd(const Code& code, int direct_limit = 20) {
    const CellComplex& cx = code.cx();
    if (!cx.boundary_regions().empty())
        throw std::runtime_error("gsd: needs a closed manifold");
    if (cx.dim != 2)
        throw std::runtime_error("gsd: implemented for 2D codes");
    int nv = cx.ncells(0);
    // Per color, the vertex subsets with trivial X part = kernel of the
    // vertex -> flipped-edges map; on a connected complex {empty, all}.
    F2Matrix vmap(0, nv);
    {
        F2Matrix m(cx.ncells(1), nv);
        for (int v = 0; v < nv; ++v)
            for (int e : odd_star_edges(cx, v))
                m.set(e, v, true);
        vmap = m;
    }
    std::vector<F2Vec> vkernel = vmap.kernel_basis();
    if (vkernel.size() != 1)
        throw std::runtime_error("gsd: expected a connected complex (kernel dimension " +
                                 std::to_string(vkernel.size()) + ")");
    for (int v = 0; v < nv; ++v)
        if (!vkernel[0].get(v))
            throw std::runtime_error("gsd: vertex-map kernel is not the all-ones vector");

    // Per-color generator lists in vertex order (closed manifold: every
    // vertex carries each single color).
    std::vector<std::vector<const StabilizerGenerator*>> by_color(code.ncolors);
    for (const StabilizerGenerator& g : code.xgens) {
        if (g.colors.size() != 1)
            throw std::runtime_error("gsd: unexpected multi-color generator on closed manifold");
        by_color[g.colors[0]].push_back(&g);
    }
    int ngens = int(code.xgens.size());

    std::vector<F2Vec> kernel = constraint_matrix(code, true, true).kernel_basis();
    int k = int(kernel.size());
    std::vector<Config> kbasis;
    for (const F2Vec& v : kernel)
        kbasis.push_back(config_from_f2(v));

    // Staged sign exponent (0/1) of the product over colors in T of
    // prod_v S^c_v, applied rightmost-first to |x>.
    auto staged_q = [&](unsigned T, Config cfg) {
        Config start = cfg;
        int exp = 0;
        for (int c = code.ncolors - 1; c >= 0; --c) {
            if (!((T >> c) & 1))
                continue;
            for (auto it = by_color[c].rbegin(); it != by_color[c].rend(); ++it) {
                const StabilizerGenerator& g = **it;
                const Config& cc = cfg;
                exp += eval_diag(g.dressing,
                                 [&](int e, int col) { return cc.get(code.qubit(e, col)) ? 1 : 0; });
                for (auto [e, col] : g.x_layer)
                    cfg.flip(code.qubit(e, col));
            }
        }
        if (cfg != start)
            throw std::runtime_error("gsd: X part did not cancel");
        if (exp % 8)
            throw std::runtime_error("gsd: dressing sum is not a sign");
        return (exp / 8) & 1;
    };

    auto config_at = [&](const F2Vec& t) {
        Config c;
        for (int i = 0; i < k; ++i)
            if (t.get(i))
                c = c ^ kbasis[i];
        return c;
    };

    int64_t total = 0;
    for (unsigned T = 0; T < (1u << code.ncolors); ++T) {
        int64_t sub = 0;
        if (T == 0) {
            if (k > 60)
                throw std::runtime_error("gsd: flat dimension too large");
            sub = int64_t(1) << k;
        } else if (k <= direct_limit) {
            for (uint64_t idx = 0; idx < (uint64_t(1) << k); ++idx) {
                Config cfg;
                for (int i = 0; i < k; ++i)
                    if ((idx >> i) & 1)
                        cfg = cfg ^ kbasis[i];
                sub += staged_q(T, cfg) ? -1 : 1;
            }
        } else {
            // Extract the quadratic form q(t) on the kernel coordinates.
            auto qt = [&](const F2Vec& t) { return staged_q(T, config_at(t)); };
            F2Vec zero(k);
            int c0 = qt(zero);
            F2Vec b(k);
            std::vector<int> qi(k);
            for (int i = 0; i < k; ++i) {
                F2Vec t(k);
                t.set(i, true);
                qi[i] = qt(t);
                b.set(i, (qi[i] ^ c0) != 0);
            }
            std::vector<F2Vec> A(k, F2Vec(k));
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    F2Vec t(k);
                    t.set(i, true);
                    t.set(j, true);
                    int v = qt(t) ^ qi[i] ^ qi[j] ^ c0;
                    if (v) {
                        A[i].flip(j);
                        A[j].flip(i);
                    }
                }
            // Spot-check that no cubic terms were dropped.
            Rng check(12345);
            for (int rep = 0; rep < 10; ++rep) {
                F2Vec t(k);
                for (int i = 0; i < k; ++i)
                    t.set(i, check.bit());
                int got = qt(t);
                int want = c0;
                for (int i = 0; i < k; ++i)
                    if (t.get(i))
                        want ^= b.get(i) ? 1 : 0;
                for (int i = 0; i < k; ++i)
                    if (t.get(i))
                        for (int j = i + 1; j < k; ++j)
                            if (t.get(j) && A[i].get(j))
                                want ^= 1;
                if (got != want)
                    throw std::runtime_error("gsd: dressing phase is not quadratic");
            }
            sub = detail::quad_gauss_sum(std::move(A), std::move(b), c0);
        }
        total += sub;
    }
    if (total <= 0)
        throw std::runtime_error("gsd: nonpositive trace");
    // divide by 2^{#generators}
    for (int i = 0; i < ngens; ++i) {
        if (total & 1)
            throw std::runtime_error("gsd: trace is not an integer");
        total >>= 1;
    }
    return total;
}

} // namespace cupcode
