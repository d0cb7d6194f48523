#pragma once

// Increasing (weight) and decreasing (Hodge) filtrations, stored sparsely:
// only the weights at which the subspace changes are kept.

#include "lmhs/subspace.hpp"

#include <map>
#include <string>
#include <vector>

namespace lmhs {

class IncreasingFiltration {
  public:
    IncreasingFiltration() : ambient_(0) {}
    explicit IncreasingFiltration(size_t ambient_dim) : ambient_(ambient_dim) {}

    static IncreasingFiltration single_weight(size_t ambient_dim, int k) {
        IncreasingFiltration w(ambient_dim);
        w.set_step(k, Subspace::full(ambient_dim));
        return w;
    }

    size_t ambient_dim() const { return ambient_; }

    void set_step(int k, Subspace s) {
        if (s.ambient_dim() != ambient_) throw std::invalid_argument("filtration step ambient mismatch");
        steps_[k] = std::move(s);
    }

    /// W_k: {0} below the lowest stored step, constant between stored
    /// steps, equal to the top step above it.
    Subspace step(int k) const {
        auto it = steps_.upper_bound(k);
        if (it == steps_.begin()) return Subspace::zero(ambient_);
        --it;
        return it->second;
    }

    bool empty() const { return steps_.empty(); }
    int lowest_weight() const { return steps_.begin()->first; }
    int highest_weight() const { return steps_.rbegin()->first; }

    /// Weights k with Gr_k != 0, assuming well-formedness.
    std::vector<int> jumps() const {
        std::vector<int> out;
        Subspace prev = Subspace::zero(ambient_);
        for (const auto& [k, s] : steps_) {
            if (s.dim() != prev.dim()) out.push_back(k);
            prev = s;
        }
        return out;
    }

    size_t graded_dim(int k) const { return step(k).dim() - step(k - 1).dim(); }

    bool well_formed() const {
        if (steps_.empty()) return false;
        Subspace prev = Subspace::zero(ambient_);
        for (const auto& [k, s] : steps_) {
            if (!s.contains(prev)) return false;
            prev = s;
        }
        return prev.is_full();
    }

    /// Closed under entrywise conjugation (real structure).
    bool real() const {
        for (const auto& [k, s] : steps_)
            if (s.conj() != s) return false;
        return true;
    }

    bool preserved_by(const Mat& m) const {
        for (const auto& [k, s] : steps_)
            if (!s.contains(s.apply(m))) return false;
        return true;
    }

    IncreasingFiltration apply(const Mat& m) const {
        IncreasingFiltration out(ambient_);
        for (const auto& [k, s] : steps_) out.set_step(k, s.apply(m));
        return out;
    }

    IncreasingFiltration shifted(int offset) const {
        IncreasingFiltration out(ambient_);
        for (const auto& [k, s] : steps_) out.set_step(k + offset, s);
        return out;
    }

    /// Canonical form: drop steps that repeat the previous subspace.
    IncreasingFiltration canonical() const {
        IncreasingFiltration out(ambient_);
        Subspace prev = Subspace::zero(ambient_);
        for (const auto& [k, s] : steps_) {
            if (s.dim() != prev.dim() || s != prev) out.set_step(k, s);
            prev = s;
        }
        return out;
    }

    friend bool operator==(const IncreasingFiltration& a, const IncreasingFiltration& b) {
        return a.ambient_ == b.ambient_ && a.canonical().steps_ == b.canonical().steps_;
    }
    friend bool operator!=(const IncreasingFiltration& a, const IncreasingFiltration& b) { return !(a == b); }

    const std::map<int, Subspace>& raw_steps() const { return steps_; }

  private:
    size_t ambient_;
    std::map<int, Subspace> steps_;
};

class DecreasingFiltration {
  public:
    DecreasingFiltration() : ambient_(0) {}
    explicit DecreasingFiltration(size_t ambient_dim) : ambient_(ambient_dim) {}

    size_t ambient_dim() const { return ambient_; }

    void set_step(int p, Subspace s) {
        if (s.ambient_dim() != ambient_) throw std::invalid_argument("filtration step ambient mismatch");
        steps_[p] = std::move(s);
    }

    /// F^p: full space below the lowest stored step, {0} above the highest.
    Subspace step(int p) const {
        auto it = steps_.upper_bound(p);
        if (it == steps_.begin()) return Subspace::full(ambient_);
        --it;
        if (it == std::prev(steps_.end()) && p > it->first) return Subspace::zero(ambient_);
        return it->second;
    }

    bool empty() const { return steps_.empty(); }
    int lowest_level() const { return steps_.begin()->first; }
    int highest_level() const { return steps_.rbegin()->first; }

    std::vector<int> jumps() const {
        std::vector<int> out;
        Subspace prev = Subspace::full(ambient_);
        for (const auto& [p, s] : steps_) {
            if (s.dim() != prev.dim()) out.push_back(p);
            prev = s;
        }
        return out;
    }

    bool well_formed() const {
        Subspace prev = Subspace::full(ambient_);
        for (const auto& [p, s] : steps_) {
            if (!prev.contains(s)) return false;
            prev = s;
        }
        return true;
    }

    DecreasingFiltration apply(const Mat& m) const {
        DecreasingFiltration out(ambient_);
        for (const auto& [p, s] : steps_) out.set_step(p, s.apply(m));
        return out;
    }

    DecreasingFiltration conj() const {
        DecreasingFiltration out(ambient_);
        for (const auto& [p, s] : steps_) out.set_step(p, s.conj());
        return out;
    }

    DecreasingFiltration canonical() const {
        DecreasingFiltration out(ambient_);
        Subspace prev = Subspace::full(ambient_);
        for (const auto& [p, s] : steps_) {
            if (s.dim() != prev.dim() || s != prev) out.set_step(p, s);
            prev = s;
        }
        return out;
    }

    friend bool operator==(const DecreasingFiltration& a, const DecreasingFiltration& b) {
        return a.ambient_ == b.ambient_ && a.canonical().steps_ == b.canonical().steps_;
    }
    friend bool operator!=(const DecreasingFiltration& a, const DecreasingFiltration& b) { return !(a == b); }

    const std::map<int, Subspace>& raw_steps() const { return steps_; }

  private:
    size_t ambient_;
    std::map<int, Subspace> steps_;
};

}  // namespace lmhs
