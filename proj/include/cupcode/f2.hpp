#pragma once

// Dense F2 linear algebra on 64-bit words: rank, kernel basis, affine solve.
// Sizes here are tiny (a few hundred columns at most), so no effort is spent
// on blocking or transposition tricks; determinism and clarity win.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cupcode {

class F2Vec {
public:
    F2Vec() = default;
    explicit F2Vec(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }

    bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    void set(int i, bool v) {
        uint64_t m = uint64_t(1) << (i & 63);
        if (v)
            w_[i >> 6] |= m;
        else
            w_[i >> 6] &= ~m;
    }

    void flip(int i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

    F2Vec& operator^=(const F2Vec& o) {
        if (o.n_ != n_)
            throw std::runtime_error("F2Vec: xor size mismatch");
        for (size_t k = 0; k < w_.size(); ++k)
            w_[k] ^= o.w_[k];
        return *this;
    }

    bool any() const {
        for (uint64_t x : w_)
            if (x)
                return true;
        return false;
    }

    int popcount() const {
        int c = 0;
        for (uint64_t x : w_)
            c += __builtin_popcountll(x);
        return c;
    }

    // Index of the lowest set bit, or -1.
    int first_set() const {
        for (size_t k = 0; k < w_.size(); ++k)
            if (w_[k])
                return int(k) * 64 + __builtin_ctzll(w_[k]);
        return -1;
    }

    bool operator==(const F2Vec& o) const { return n_ == o.n_ && w_ == o.w_; }

private:
    int n_ = 0;
    std::vector<uint64_t> w_;
};

// Row-major F2 matrix. Rows are F2Vec of a common width.
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(int rows, int cols) : cols_(cols), rows_(rows, F2Vec(cols)) {}

    int rows() const { return int(rows_.size()); }
    int cols() const { return cols_; }

    F2Vec& row(int i) { return rows_[i]; }
    const F2Vec& row(int i) const { return rows_[i]; }

    bool get(int i, int j) const { return rows_[i].get(j); }
    void set(int i, int j, bool v) { rows_[i].set(j, v); }

    void append_row(const F2Vec& r) {
        if (r.size() != cols_ && rows() > 0)
            throw std::runtime_error("F2Matrix: row width mismatch");
        if (rows() == 0 && cols_ == 0)
            cols_ = r.size();
        rows_.push_back(r);
    }

    // Gaussian elimination to row echelon form (in place); returns pivot columns.
    std::vector<int> echelonize() {
        std::vector<int> pivots;
        int r = 0;
        for (int c = 0; c < cols_ && r < rows(); ++c) {
            int p = -1;
            for (int i = r; i < rows(); ++i)
                if (rows_[i].get(c)) {
                    p = i;
                    break;
                }
            if (p < 0)
                continue;
            std::swap(rows_[r], rows_[p]);
            for (int i = 0; i < rows(); ++i)
                if (i != r && rows_[i].get(c))
                    rows_[i] ^= rows_[r];
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    int rank() const {
        F2Matrix m = *this;
        return int(m.echelonize().size());
    }

    // Basis of {x : Mx = 0}.
    std::vector<F2Vec> kernel_basis() const {
        F2Matrix m = *this;
        std::vector<int> pivots = m.echelonize();
        std::vector<bool> is_pivot(cols_, false);
        for (int c : pivots)
            is_pivot[c] = true;
        std::vector<F2Vec> basis;
        for (int c = 0; c < cols_; ++c) {
            if (is_pivot[c])
                continue;
            F2Vec v(cols_);
            v.set(c, true);
            // Back-substitute: pivot row i has its pivot at pivots[i].
            for (size_t i = 0; i < pivots.size(); ++i)
                if (m.row(int(i)).get(c))
                    v.set(pivots[i], true);
            basis.push_back(v);
        }
        return basis;
    }

    // One solution of Mx = b, or nullopt if inconsistent.
    std::optional<F2Vec> solve(const F2Vec& b) const {
        if (b.size() != rows())
            throw std::runtime_error("F2Matrix: solve rhs size mismatch");
        // Eliminate on the augmented matrix [M | b].
        F2Matrix aug(rows(), cols_ + 1);
        for (int i = 0; i < rows(); ++i) {
            for (int j = 0; j < cols_; ++j)
                aug.set(i, j, get(i, j));
            aug.set(i, cols_, b.get(i));
        }
        std::vector<int> pivots = aug.echelonize();
        for (int c : pivots)
            if (c == cols_)
                return std::nullopt; // pivot in the augmented column
        F2Vec x(cols_);
        for (size_t i = 0; i < pivots.size(); ++i)
            if (aug.row(int(i)).get(cols_))
                x.set(pivots[i], true);
        return x;
    }

    // Does v lie in the row span?
    bool in_row_span(const F2Vec& v) const {
        F2Matrix m = *this;
        int r0 = m.rank();
        m.append_row(v);
        return m.rank() == r0;
    }

    // Do two matrices span the same row space?
    static bool same_row_span(const F2Matrix& a, const F2Matrix& b) {
        if (a.cols() != b.cols())
            return false;
        F2Matrix ab = a, ba = b;
        for (int i = 0; i < b.rows(); ++i)
            ab.append_row(b.row(i));
        for (int i = 0; i < a.rows(); ++i)
            ba.append_row(a.row(i));
        return ab.rank() == a.rank() && ba.rank() == b.rank() &&
               a.rank() == b.rank();
    }

private:
    int cols_ = 0;
    std::vector<F2Vec> rows_;
};

} // namespace cupcode
