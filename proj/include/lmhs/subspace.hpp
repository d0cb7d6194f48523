#pragma once

// Subspaces of Q(i)^n in canonical form.  A subspace is stored as the
// reduced row echelon basis of its row space, so structural equality of the
// canonical matrices decides equality of subspaces.

#include "lmhs/matrix.hpp"

#include <string>
#include <vector>

namespace lmhs {

class Subspace {
  public:
    Subspace() : ambient_(0) {}

    explicit Subspace(size_t ambient_dim) : ambient_(ambient_dim), basis_(0, ambient_dim) {}

    static Subspace zero(size_t ambient_dim) { return Subspace(ambient_dim); }

    static Subspace full(size_t ambient_dim) {
        Subspace s(ambient_dim);
        s.basis_ = Mat::identity(ambient_dim);
        return s;
    }

    static Subspace span(size_t ambient_dim, const std::vector<Vec>& vectors) {
        Mat m(vectors.size(), ambient_dim);
        for (size_t i = 0; i < vectors.size(); ++i) {
            if (vectors[i].size() != ambient_dim)
                throw std::invalid_argument("span: vector length != ambient dimension");
            m.set_row(i, vectors[i]);
        }
        Subspace s(ambient_dim);
        s.basis_ = rref(std::move(m)).m;
        return s;
    }

    static Subspace span_rows(const Mat& m) {
        Subspace s(m.cols());
        s.basis_ = rref(m).m;
        return s;
    }

    size_t ambient_dim() const { return ambient_; }
    size_t dim() const { return basis_.rows(); }
    const Mat& basis() const { return basis_; }

    std::vector<Vec> basis_vectors() const {
        std::vector<Vec> out;
        out.reserve(dim());
        for (size_t i = 0; i < dim(); ++i) out.push_back(basis_.row(i));
        return out;
    }

    bool is_zero() const { return dim() == 0; }
    bool is_full() const { return dim() == ambient_; }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }
    friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }

    bool contains(const Vec& v) const {
        if (v.size() != ambient_) throw std::invalid_argument("contains: ambient mismatch");
        return coordinates(v).has_value();
    }

    bool contains(const Subspace& other) const {
        check_ambient(other);
        for (size_t i = 0; i < other.dim(); ++i)
            if (!contains(other.basis_.row(i))) return false;
        return true;
    }

    /// Coordinates of v in the canonical basis, when v lies in the subspace.
    std::optional<Vec> coordinates(const Vec& v) const {
        LinearSolution sol = solve_linear(basis_.transpose(), v);
        if (!sol.particular) return std::nullopt;
        return sol.particular;
    }

    Subspace conj() const {
        Subspace s(ambient_);
        s.basis_ = rref(basis_.conj()).m;
        return s;
    }

    /// Image under a linear map (rows act as column vectors: m * v).
    Subspace apply(const Mat& m) const {
        if (m.cols() != ambient_) throw std::invalid_argument("apply: shape mismatch");
        Mat img(dim(), m.rows());
        for (size_t i = 0; i < dim(); ++i) img.set_row(i, m * basis_.row(i));
        Subspace s(m.rows());
        s.basis_ = rref(std::move(img)).m;
        return s;
    }

    /// { v : m v in *this } as a subspace of the domain of m.
    Subspace preimage(const Mat& m) const {
        if (m.rows() != ambient_) throw std::invalid_argument("preimage: shape mismatch");
        // m v must be a combination of basis rows: [m | -basis^T] (v, c) = 0.
        size_t n = m.cols(), d = dim();
        Mat sys(ambient_, n + d);
        for (size_t i = 0; i < ambient_; ++i) {
            for (size_t j = 0; j < n; ++j) sys(i, j) = m(i, j);
            for (size_t k = 0; k < d; ++k) sys(i, n + k) = -basis_(k, i);
        }
        std::vector<Vec> ker = kernel_basis(sys);
        std::vector<Vec> vs;
        for (const auto& w : ker) vs.push_back(Vec(w.begin(), w.begin() + n));
        return Subspace::span(n, vs);
    }

    friend Subspace operator+(const Subspace& a, const Subspace& b) {
        a.check_ambient(b);
        Mat m(a.dim() + b.dim(), a.ambient_);
        for (size_t i = 0; i < a.dim(); ++i) m.set_row(i, a.basis_.row(i));
        for (size_t i = 0; i < b.dim(); ++i) m.set_row(a.dim() + i, b.basis_.row(i));
        Subspace s(a.ambient_);
        s.basis_ = rref(std::move(m)).m;
        return s;
    }

    friend Subspace intersect(const Subspace& a, const Subspace& b) {
        a.check_ambient(b);
        // x in a iff x is annihilated by ann(a); stack both annihilators.
        std::vector<Vec> ann_a = kernel_basis(a.basis_);
        std::vector<Vec> ann_b = kernel_basis(b.basis_);
        Mat sys(ann_a.size() + ann_b.size(), a.ambient_);
        for (size_t i = 0; i < ann_a.size(); ++i) sys.set_row(i, ann_a[i]);
        for (size_t i = 0; i < ann_b.size(); ++i) sys.set_row(ann_a.size() + i, ann_b[i]);
        return Subspace::span(a.ambient_, kernel_basis(sys));
    }

    /// Canonical vectors extending sub (a subspace of *this) to a basis of
    /// *this; chosen greedily from the canonical basis rows.
    std::vector<Vec> complement_in(const Subspace& sub) const {
        check_ambient(sub);
        if (!contains(sub)) throw std::invalid_argument("complement_in: not a subspace");
        std::vector<Vec> out;
        Subspace acc = sub;
        for (size_t i = 0; i < dim() && acc.dim() < dim(); ++i) {
            Vec v = basis_.row(i);
            if (!acc.contains(v)) {
                out.push_back(v);
                acc = acc + Subspace::span(ambient_, {v});
            }
        }
        return out;
    }

    std::string to_string() const {
        std::string s = "span{";
        for (size_t i = 0; i < dim(); ++i) {
            if (i) s += ", ";
            s += "(";
            for (size_t j = 0; j < ambient_; ++j) {
                if (j) s += ", ";
                s += lmhs::to_string(basis_(i, j));
            }
            s += ")";
        }
        return s + "}";
    }

  private:
    void check_ambient(const Subspace& o) const {
        if (ambient_ != o.ambient_) throw std::invalid_argument("ambient-dimension mismatch");
    }

    size_t ambient_;
    Mat basis_;
};

inline Vec unit_vector(size_t n, size_t j) {
    Vec v(n);
    v[j] = GQ(1);
    return v;
}

/// Decides whether the listed subspaces are independent and sum to the full
/// space; this is the direct-sum certificate used by bigradings.
inline bool is_direct_sum_of(const Subspace& whole, const std::vector<Subspace>& parts) {
    size_t total = 0;
    Subspace acc = Subspace::zero(whole.ambient_dim());
    for (const auto& p : parts) {
        total += p.dim();
        acc = acc + p;
    }
    return total == whole.dim() && acc == whole;
}

// Induced maps on quotients A/A' -> B/B'.  Only dimension-level predicates
// are needed; they are exact.

/// True iff m maps A into B (on subspace level).
inline bool maps_into(const Mat& m, const Subspace& a, const Subspace& b) {
    return b.contains(a.apply(m));
}

/// True iff the map A/A' -> B/B' induced by m is injective.  Requires
/// m(A) <= B and m(A') <= B'; the kernel is (m^{-1}(B') cap A)/A'.
inline bool induced_injective(const Mat& m, const Subspace& a, const Subspace& a1, const Subspace& b1) {
    return intersect(b1.preimage(m), a) == a1;
}

/// True iff the map A/A' -> B/B' induced by m is an isomorphism.
inline bool induced_bijective(const Mat& m, const Subspace& a, const Subspace& a1, const Subspace& b,
                              const Subspace& b1) {
    if (!maps_into(m, a, b) || !maps_into(m, a1, b1)) return false;
    if (!induced_injective(m, a, a1, b1)) return false;
    return a.apply(m) + b1 == b;  // surjectivity
}

}  // namespace lmhs
