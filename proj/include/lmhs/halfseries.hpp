#pragma once

// Formal series  sum_{m >= min} c_m y^{-m/2}  with exact matrix
// coefficients, truncated at a tracked half-power index: coefficients are
// known exactly for all m <= trunc().

#include "lmhs/matrix.hpp"

#include <map>

namespace lmhs {

class HalfPowerSeries {
  public:
    HalfPowerSeries() : n_(0), trunc_(0) {}
    HalfPowerSeries(size_t mat_dim, int trunc) : n_(mat_dim), trunc_(trunc) {}

    static HalfPowerSeries monomial(const Mat& c, int m, int trunc) {
        HalfPowerSeries s(c.rows(), trunc);
        if (m <= trunc && !c.is_zero()) s.coeff_[m] = c;
        return s;
    }

    size_t mat_dim() const { return n_; }
    int trunc() const { return trunc_; }

    Mat coeff(int m) const {
        auto it = coeff_.find(m);
        return it == coeff_.end() ? Mat::zero(n_, n_) : it->second;
    }
    const std::map<int, Mat>& coeffs() const { return coeff_; }

    bool is_zero() const { return coeff_.empty(); }

    /// Smallest index with nonzero coefficient (trunc()+1 when zero).
    int min_exponent() const { return coeff_.empty() ? trunc_ + 1 : coeff_.begin()->first; }

    void add_term(int m, const Mat& c) {
        if (m > trunc_ || c.is_zero()) return;
        auto it = coeff_.find(m);
        if (it == coeff_.end()) {
            coeff_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) coeff_.erase(it);
        }
    }

    HalfPowerSeries& truncate(int new_trunc) {
        trunc_ = std::min(trunc_, new_trunc);
        for (auto it = coeff_.begin(); it != coeff_.end();)
            it = (it->first > trunc_) ? coeff_.erase(it) : std::next(it);
        return *this;
    }

    friend HalfPowerSeries operator+(const HalfPowerSeries& a, const HalfPowerSeries& b) {
        HalfPowerSeries out(a.n_ ? a.n_ : b.n_, std::min(a.trunc_, b.trunc_));
        for (const auto& [m, c] : a.coeff_) out.add_term(m, c);
        for (const auto& [m, c] : b.coeff_) out.add_term(m, c);
        return out;
    }
    friend HalfPowerSeries operator-(const HalfPowerSeries& a, const HalfPowerSeries& b) {
        HalfPowerSeries out(a.n_ ? a.n_ : b.n_, std::min(a.trunc_, b.trunc_));
        for (const auto& [m, c] : a.coeff_) out.add_term(m, c);
        for (const auto& [m, c] : b.coeff_) out.add_term(m, -c);
        return out;
    }
    friend HalfPowerSeries operator*(const GQ& s, const HalfPowerSeries& a) {
        HalfPowerSeries out(a.n_, a.trunc_);
        for (const auto& [m, c] : a.coeff_) out.add_term(m, s * c);
        return out;
    }

    /// Product with truncation bookkeeping: the result is reliable up to
    /// min(a.trunc + b.min, b.trunc + a.min).
    friend HalfPowerSeries operator*(const HalfPowerSeries& a, const HalfPowerSeries& b) {
        int t = std::min(a.trunc_ + b.min_exponent(), b.trunc_ + a.min_exponent());
        HalfPowerSeries out(a.n_, t);
        for (const auto& [ma, ca] : a.coeff_)
            for (const auto& [mb, cb] : b.coeff_) out.add_term(ma + mb, ca * cb);
        return out;
    }

    friend HalfPowerSeries commutator(const HalfPowerSeries& a, const HalfPowerSeries& b) {
        return a * b - b * a;
    }

    /// d/dy: y^{-m/2} -> (-m/2) y^{-(m+2)/2}.
    HalfPowerSeries derivative() const {
        HalfPowerSeries out(n_, trunc_ + 2);
        for (const auto& [m, c] : coeff_) out.add_term(m + 2, GQ(Rational(-m, 2)) * c);
        return out;
    }

    /// Antiderivative with zero constant term; a y^{-1} term (m = 2) has no
    /// series antiderivative and is an error.
    HalfPowerSeries antiderivative() const {
        HalfPowerSeries out(n_, trunc_ - 2);
        for (const auto& [m, c] : coeff_) {
            if (m == 2) throw std::domain_error("antiderivative of a y^{-1} term");
            out.add_term(m - 2, GQ(Rational(-2, m - 2)) * c);
        }
        return out;
    }

    /// Coefficient-wise image under a linear operator on flattened gl.
    HalfPowerSeries map_coefficients(const Mat& op) const {
        HalfPowerSeries out(n_, trunc_);
        for (const auto& [m, c] : coeff_) out.add_term(m, unflatten(op * flatten(c), n_, n_));
        return out;
    }

    /// Exact evaluation at y = y0 when all tracked exponents are even, or
    /// at a perfect-square rational y0 in general (y0 = r^2 evaluates
    /// y^{-1/2} to 1/r).
    Mat eval_exact(const Rational& sqrt_y) const {
        Mat acc = Mat::zero(n_, n_);
        for (const auto& [m, c] : coeff_) {
            Rational p(1);
            if (m >= 0)
                for (int j = 0; j < m; ++j) p /= sqrt_y;
            else
                for (int j = 0; j < -m; ++j) p *= sqrt_y;
            acc += GQ(p) * c;
        }
        return acc;
    }

  private:
    size_t n_;
    int trunc_;
    std::map<int, Mat> coeff_;
};

}  // namespace lmhs
