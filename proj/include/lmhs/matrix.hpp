#pragma once

// Dense exact matrices over Q(i) and the linear solves the rest of the
// library is built on.  Row-major; vectors are plain std::vector<GQ> and
// act as columns.

#include "lmhs/scalar.hpp"

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <vector>

namespace lmhs {

using Vec = std::vector<GQ>;

inline Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    Vec c(a.size());
    for (size_t j = 0; j < a.size(); ++j) c[j] = a[j] + b[j];
    return c;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    Vec c(a.size());
    for (size_t j = 0; j < a.size(); ++j) c[j] = a[j] - b[j];
    return c;
}

inline Vec operator*(const GQ& s, const Vec& a) {
    Vec c(a.size());
    for (size_t j = 0; j < a.size(); ++j) c[j] = s * a[j];
    return c;
}

inline bool is_zero(const Vec& a) {
    for (const auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

inline Vec conj(const Vec& a) {
    Vec c(a.size());
    for (size_t j = 0; j < a.size(); ++j) c[j] = a[j].conj();
    return c;
}

class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    Mat(std::initializer_list<std::initializer_list<GQ>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged initializer");
            for (const auto& x : r) a_.push_back(x);
        }
    }

    static Mat identity(size_t n) {
        Mat m(n, n);
        for (size_t j = 0; j < n; ++j) m(j, j) = GQ(1);
        return m;
    }
    static Mat zero(size_t r, size_t c) { return Mat(r, c); }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    GQ& operator()(size_t r, size_t c) { return a_[r * cols_ + c]; }
    const GQ& operator()(size_t r, size_t c) const { return a_[r * cols_ + c]; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }
    bool is_square() const { return rows_ == cols_; }

    Mat operator-() const {
        Mat m(rows_, cols_);
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = -a_[k];
        return m;
    }
    Mat& operator+=(const Mat& o) {
        check_same_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Mat& operator*=(const GQ& s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(const GQ& s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Mat c(a.rows_, b.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t k = 0; k < a.cols_; ++k) {
                const GQ& aik = a(i, k);
                if (aik.is_zero()) continue;
                for (size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vec operator*(const Mat& a, const Vec& v) {
        if (a.cols_ != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
        Vec out(a.rows_);
        for (size_t i = 0; i < a.rows_; ++i) {
            GQ acc;
            for (size_t j = 0; j < a.cols_; ++j) acc += a(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }
    friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

    Mat transpose() const {
        Mat m(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
    Mat conj() const {
        Mat m(rows_, cols_);
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k].conj();
        return m;
    }
    Mat conj_transpose() const { return conj().transpose(); }

    GQ trace() const {
        if (!is_square()) throw std::invalid_argument("trace of non-square matrix");
        GQ t;
        for (size_t j = 0; j < rows_; ++j) t += (*this)(j, j);
        return t;
    }

    Vec row(size_t i) const {
        Vec v(cols_);
        for (size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
        return v;
    }
    Vec col(size_t j) const {
        Vec v(rows_);
        for (size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    void set_row(size_t i, const Vec& v) {
        for (size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
    }

    /// Max |entry|^2 as a double; used only for diagnostics.
    double max_abs2() const {
        double m = 0;
        for (const auto& x : a_) m = std::max(m, to_double(x.norm2()));
        return m;
    }

  private:
    void check_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
    }

    size_t rows_, cols_;
    std::vector<GQ> a_;
};

inline Mat bracket(const Mat& a, const Mat& b) { return a * b - b * a; }

inline Mat pow(const Mat& a, unsigned k) {
    if (!a.is_square()) throw std::invalid_argument("pow of non-square matrix");
    Mat r = Mat::identity(a.rows());
    for (unsigned j = 0; j < k; ++j) r = r * a;
    return r;
}

inline bool is_nilpotent(const Mat& a) {
    if (!a.is_square()) return false;
    Mat p = a;
    for (size_t j = 1; j <= a.rows(); ++j) {
        if (p.is_zero()) return true;
        p = p * a;
    }
    return p.is_zero();
}

/// exp(a) for nilpotent a, computed as the finite sum.  Throws if a is not
/// nilpotent (the only exponentials taken exactly in this library are of
/// nilpotent elements).
inline Mat exp_nilpotent(const Mat& a) {
    if (!a.is_square()) throw std::invalid_argument("exp of non-square matrix");
    Mat term = Mat::identity(a.rows());
    Mat sum = term;
    for (size_t k = 1; k <= a.rows() + 1; ++k) {
        term = term * a;
        term *= GQ(Rational(1, BigInt(k)));
        if (term.is_zero()) return sum;
        sum += term;
    }
    throw std::domain_error("exp_nilpotent: matrix is not nilpotent");
}

/// Ad(g)x = g x g^-1 needs an inverse; for unipotent g = exp(nilpotent)
/// prefer conjugating with exp(-n) directly.
inline Mat conjugate(const Mat& g, const Mat& g_inv, const Mat& x) { return g * x * g_inv; }

// ---------------------------------------------------------------------------
// Reduced row echelon form and solves.

struct Rref {
    Mat m;                       // reduced row echelon form, zero rows dropped
    std::vector<size_t> pivots;  // pivot column of each remaining row
};

/// Canonical reduced row echelon form: leading entries 1, pivot columns
/// cleared, zero rows removed.  Two row spaces are equal iff their rrefs are
/// identical.
inline Rref rref(Mat m) {
    size_t rows = m.rows(), cols = m.cols();
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = rows;
        for (size_t i = r; i < rows; ++i)
            if (!m(i, c).is_zero()) {
                sel = i;
                break;
            }
        if (sel == rows) continue;
        if (sel != r)
            for (size_t j = 0; j < cols; ++j) std::swap(m(r, j), m(sel, j));
        GQ inv = GQ(1) / m(r, c);
        for (size_t j = c; j < cols; ++j) m(r, j) *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m(i, c).is_zero()) continue;
            GQ f = m(i, c);
            for (size_t j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    Mat out(r, cols);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < cols; ++j) out(i, j) = m(i, j);
    return Rref{std::move(out), std::move(pivots)};
}

inline size_t rank(const Mat& m) { return rref(m).m.rows(); }

struct LinearSolution {
    std::optional<Vec> particular;  // absent iff the system is inconsistent
    std::vector<Vec> kernel;        // basis of the solution space of A x = 0
};

/// Exact solve of A x = b with full kernel.  Inconsistency is a value, not
/// an error.
inline LinearSolution solve_linear(const Mat& a, const Vec& b) {
    if (a.rows() != b.size()) throw std::invalid_argument("solve_linear shape mismatch");
    size_t n = a.cols();
    Mat aug(a.rows(), n + 1);
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n) = b[i];
    }
    Rref r = rref(std::move(aug));

    LinearSolution sol;
    bool consistent = true;
    for (size_t i = 0; i < r.m.rows(); ++i)
        if (r.pivots[i] == n) consistent = false;

    std::vector<long> pivot_of_col(n, -1);
    for (size_t i = 0; i < r.pivots.size(); ++i)
        if (r.pivots[i] < n) pivot_of_col[r.pivots[i]] = static_cast<long>(i);

    if (consistent) {
        Vec x(n);
        for (size_t c = 0; c < n; ++c)
            if (pivot_of_col[c] >= 0) x[c] = r.m(static_cast<size_t>(pivot_of_col[c]), n);
        sol.particular = std::move(x);
    }
    for (size_t c = 0; c < n; ++c) {
        if (pivot_of_col[c] >= 0) continue;
        Vec k(n);
        k[c] = GQ(1);
        for (size_t i = 0; i < r.m.rows(); ++i)
            if (r.pivots[i] < n) k[r.pivots[i]] = -r.m(i, c);
        sol.kernel.push_back(std::move(k));
    }
    return sol;
}

/// Basis of { x : A x = 0 }.
inline std::vector<Vec> kernel_basis(const Mat& a) {
    return solve_linear(a, Vec(a.rows())).kernel;
}

inline std::optional<Mat> inverse(const Mat& a) {
    if (!a.is_square()) return std::nullopt;
    size_t n = a.rows();
    Mat aug(n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = GQ(1);
    }
    Rref r = rref(std::move(aug));
    if (r.m.rows() != n) return std::nullopt;
    for (size_t i = 0; i < n; ++i)
        if (r.pivots[i] != i) return std::nullopt;
    Mat inv(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv(i, j) = r.m(i, n + j);
    return inv;
}

inline GQ det(Mat m) {
    if (!m.is_square()) throw std::invalid_argument("det of non-square matrix");
    size_t n = m.rows();
    GQ d(1);
    for (size_t c = 0; c < n; ++c) {
        size_t sel = n;
        for (size_t i = c; i < n; ++i)
            if (!m(i, c).is_zero()) {
                sel = i;
                break;
            }
        if (sel == n) return GQ(0);
        if (sel != c) {
            for (size_t j = 0; j < n; ++j) std::swap(m(c, j), m(sel, j));
            d = -d;
        }
        d *= m(c, c);
        GQ inv = GQ(1) / m(c, c);
        for (size_t i = c + 1; i < n; ++i) {
            if (m(i, c).is_zero()) continue;
            GQ f = m(i, c) * inv;
            for (size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// gl(V) <-> coordinate vectors.  Endomorphisms are flattened row-major so
// that operators on gl(V) (ad X, projections, the Casimir) can themselves be
// exact matrices.

inline Vec flatten(const Mat& x) {
    Vec v(x.rows() * x.cols());
    for (size_t i = 0; i < x.rows(); ++i)
        for (size_t j = 0; j < x.cols(); ++j) v[i * x.cols() + j] = x(i, j);
    return v;
}

inline Mat unflatten(const Vec& v, size_t rows, size_t cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("unflatten size mismatch");
    Mat x(rows, cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) x(i, j) = v[i * cols + j];
    return x;
}

/// The matrix of ad(x) = [x, .] acting on flattened gl(V).
inline Mat ad_matrix(const Mat& x) {
    size_t n = x.rows();
    Mat out(n * n, n * n);
    // [x,E_{ab}] = sum_i x_{ia} E_{ib} - sum_j x_{bj} E_{aj}
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            size_t col = a * n + b;
            for (size_t i = 0; i < n; ++i) out(i * n + b, col) += x(i, a);
            for (size_t j = 0; j < n; ++j) out(a * n + j, col) -= x(b, j);
        }
    return out;
}

}  // namespace lmhs
