#pragma once

// Graded-polarized mixed Hodge data and its validation report.

#include "lmhs/bigrading.hpp"
#include "lmhs/filtration.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lmhs {

enum class HodgeShape { TypeI, TypeII, Pure, Other };

inline const char* to_string(HodgeShape s) {
    switch (s) {
        case HodgeShape::TypeI: return "I";
        case HodgeShape::TypeII: return "II";
        case HodgeShape::Pure: return "pure";
        default: return "other";
    }
}

struct GradedPolarization {
    std::map<int, Mat> forms;  // weight k -> matrix of Q_k on the canonical basis of Gr_k

    bool has(int k) const { return forms.count(k) != 0; }
    const Mat& form(int k) const {
        auto it = forms.find(k);
        if (it == forms.end()) throw std::out_of_range("no polarization at weight " + std::to_string(k));
        return it->second;
    }
};

struct MixedHodgeData {
    size_t dim = 0;
    IncreasingFiltration W;
    DecreasingFiltration F;
    GradedPolarization Q;
    std::vector<Mat> nilpotents;
    std::vector<std::string> basis_names;  // optional, for reporting

    /// Canonical basis of Gr^W_k: the canonical-form rows of W_k extending
    /// W_{k-1}.  All polarization matrices are read in this basis.
    std::vector<Vec> graded_basis(int k) const { return W.step(k).complement_in(W.step(k - 1)); }

    /// Class of v (required to lie in W_k) in the canonical basis of Gr_k.
    Vec graded_class(const Vec& v, int k) const {
        std::vector<Vec> g = graded_basis(k);
        Subspace lower = W.step(k - 1);
        size_t cols = g.size() + lower.dim();
        Mat sys(dim, cols);
        for (size_t i = 0; i < dim; ++i) {
            for (size_t j = 0; j < g.size(); ++j) sys(i, j) = g[j][i];
            for (size_t j = 0; j < lower.dim(); ++j) sys(i, g.size() + j) = lower.basis()(j, i);
        }
        LinearSolution sol = solve_linear(sys, v);
        if (!sol.particular) throw std::invalid_argument("graded_class: vector not in W_k");
        return Vec(sol.particular->begin(), sol.particular->begin() + g.size());
    }

    /// Q_k evaluated on classes (bilinear, no conjugation).
    GQ q_value(int k, const Vec& cls_u, const Vec& cls_v) const {
        const Mat& q = Q.form(k);
        GQ acc;
        for (size_t i = 0; i < cls_u.size(); ++i)
            for (size_t j = 0; j < cls_v.size(); ++j) acc += cls_u[i] * q(i, j) * cls_v[j];
        return acc;
    }

    /// The combined nilpotent (sum of all N_j).
    Mat combined_nilpotent() const {
        Mat n = Mat::zero(dim, dim);
        for (const auto& nj : nilpotents) n += nj;
        return n;
    }
};

/// Hodge numbers of the induced filtration on Gr_k by flag dimensions:
/// h^{p,k-p} = dim F^p Gr_k - dim F^{p+1} Gr_k.  This is pure dimension
/// bookkeeping and works whether or not the graded structure is an actual
/// Hodge structure at the given F.
inline std::map<std::pair<int, int>, size_t> graded_hodge_numbers(const MixedHodgeData& d, int k) {
    std::map<std::pair<int, int>, size_t> h;
    Subspace wk = d.W.step(k), wk1 = d.W.step(k - 1);
    // dim(F^p Gr_k) = dim((F^p cap W_k + W_{k-1}) / W_{k-1})
    auto fgr = [&](int p) { return (intersect(d.F.step(p), wk) + wk1).dim() - wk1.dim(); };
    if (d.F.empty()) return h;
    int lo = d.F.lowest_level() - 1, hi = d.F.highest_level() + 1;
    for (int p = lo; p <= hi; ++p) {
        size_t hp = fgr(p) - fgr(p + 1);
        if (hp) h[{p, k - p}] = hp;
    }
    return h;
}

/// Shape classification from graded Hodge numbers.
inline HodgeShape classify_shape(const MixedHodgeData& d) {
    std::vector<int> ws;
    for (int k : d.W.jumps())
        if (d.W.graded_dim(k) > 0) ws.push_back(k);
    if (ws.empty()) return HodgeShape::Other;
    if (ws.size() == 1) return HodgeShape::Pure;
    int lo = ws.front(), hi = ws.back();
    if (ws.size() == 2 && hi - lo == 1) return HodgeShape::TypeI;
    // type II: weights within {2k-2, ..., 2k}, outer pieces pure Tate
    if (hi - lo == 2 && hi % 2 == 0) {
        int kk = hi / 2;
        auto top = graded_hodge_numbers(d, hi);
        auto bot = graded_hodge_numbers(d, lo);
        bool top_tate = top.size() == 1 && top.count({kk, kk}) == 1;
        bool bot_tate = bot.size() == 1 && bot.count({kk - 1, kk - 1}) == 1;
        bool middle_odd = true;
        for (auto [pq, n] : graded_hodge_numbers(d, hi - 1))
            if (pq.first + pq.second != hi - 1) middle_odd = false;
        if (top_tate && bot_tate && middle_odd) return HodgeShape::TypeII;
    }
    return HodgeShape::Other;
}

struct ValidationReport {
    bool filtrations_well_formed = false;
    bool weight_filtration_real = false;
    bool parity_ok = false;
    bool nondegenerate_ok = false;
    bool polarizations_complete = false;
    bool nilpotents_nilpotent = true;
    bool nilpotents_preserve_w = true;
    bool nilpotents_horizontal = true;
    bool nilpotents_commute = true;
    bool fiber_mhs = false;           // (F, W) is itself a mixed Hodge structure
    bool first_bilinear_ok = false;   // Q_k(F^a Gr_k, F^{k-a+1} Gr_k) = 0
    bool graded_pure_hodge = false;   // induced graded structures are Hodge structures at F
    bool graded_positive = false;     // and positively polarized (checked exactly)
    HodgeShape shape = HodgeShape::Other;
    std::vector<std::string> errors;  // human-readable failures

    /// Structural validity: everything that must hold for the data to name
    /// a graded-polarized object at all.  Whether (F, W) is a fiber MHS or
    /// a nilpotent-orbit limit is reported separately.
    bool structurally_valid() const {
        return filtrations_well_formed && weight_filtration_real && parity_ok && nondegenerate_ok &&
               polarizations_complete && nilpotents_nilpotent && nilpotents_preserve_w && nilpotents_horizontal &&
               nilpotents_commute;
    }

    std::string to_text() const {
        std::ostringstream os;
        auto line = [&](const char* name, bool v) { os << "  " << name << ": " << (v ? "ok" : "FAIL") << "\n"; };
        os << "validation:\n";
        line("filtrations well-formed", filtrations_well_formed);
        line("weight filtration defined over R", weight_filtration_real);
        line("polarization parity (-1)^k", parity_ok);
        line("polarizations nondegenerate", nondegenerate_ok);
        line("polarizations present for all weights", polarizations_complete);
        line("nilpotents nilpotent", nilpotents_nilpotent);
        line("nilpotents preserve W", nilpotents_preserve_w);
        line("nilpotents horizontal  N F^p <= F^{p-1}", nilpotents_horizontal);
        line("nilpotents commute", nilpotents_commute);
        line("first bilinear relation on graded pieces", first_bilinear_ok);
        os << "  (F, W) is a mixed Hodge structure: " << (fiber_mhs ? "yes" : "no") << "\n";
        os << "  graded pieces pure Hodge at F: " << (graded_pure_hodge ? "yes" : "no") << "\n";
        if (graded_pure_hodge) line("graded polarization positivity", graded_positive);
        os << "  Hodge-number shape: type " << lmhs::to_string(shape) << "\n";
        for (const auto& e : errors) os << "  error: " << e << "\n";
        return os.str();
    }
};

inline ValidationReport validate(const MixedHodgeData& d);

namespace detail {

/// Induced filtration data on Gr_k: basis, induced F-flag in class
/// coordinates.
struct GradedPiece {
    int k = 0;
    size_t g = 0;
    DecreasingFiltration f_induced;  // on class coordinates
};

inline GradedPiece graded_piece(const MixedHodgeData& d, int k) {
    GradedPiece out;
    out.k = k;
    std::vector<Vec> basis = d.graded_basis(k);
    out.g = basis.size();
    Subspace wk = d.W.step(k);
    DecreasingFiltration f(out.g);
    if (!d.F.empty()) {
        for (int p = d.F.lowest_level() - 1; p <= d.F.highest_level() + 1; ++p) {
            Subspace fp = intersect(d.F.step(p), wk);
            std::vector<Vec> classes;
            for (const auto& v : fp.basis_vectors()) classes.push_back(d.graded_class(v, k));
            f.set_step(p, Subspace::span(out.g, classes));
        }
    }
    out.f_induced = f.canonical();
    return out;
}

}  // namespace detail

inline ValidationReport validate(const MixedHodgeData& d) {
    ValidationReport r;
    r.filtrations_well_formed = d.W.well_formed() && d.F.well_formed() && !d.F.empty() &&
                                d.F.step(d.F.lowest_level()).is_full();
    if (!r.filtrations_well_formed) r.errors.push_back("filtration nesting or exhaustiveness fails");
    r.weight_filtration_real = d.W.real();
    if (!r.weight_filtration_real) r.errors.push_back("weight filtration is not conjugation-stable");

    r.parity_ok = true;
    r.nondegenerate_ok = true;
    r.polarizations_complete = true;
    for (int k : d.W.jumps()) {
        if (d.W.graded_dim(k) == 0) continue;
        if (!d.Q.has(k)) {
            r.polarizations_complete = false;
            r.errors.push_back("missing polarization at weight " + std::to_string(k));
            continue;
        }
        const Mat& q = d.Q.form(k);
        if (q.rows() != d.W.graded_dim(k) || q.cols() != d.W.graded_dim(k)) {
            r.polarizations_complete = false;
            r.errors.push_back("polarization size mismatch at weight " + std::to_string(k));
            continue;
        }
        Mat qt = q.transpose();
        bool parity = ((k % 2 + 2) % 2 == 0) ? (q == qt) : (q == -qt);
        if (!parity) {
            r.parity_ok = false;
            r.errors.push_back("polarization at weight " + std::to_string(k) + " violates parity (-1)^k");
        }
        if (rank(q) != q.rows()) {
            r.nondegenerate_ok = false;
            r.errors.push_back("polarization at weight " + std::to_string(k) + " is degenerate");
        }
    }

    for (const auto& n : d.nilpotents) {
        if (!is_nilpotent(n)) r.nilpotents_nilpotent = false;
        if (!d.W.preserved_by(n)) r.nilpotents_preserve_w = false;
        if (!d.F.empty()) {
            for (int p = d.F.lowest_level(); p <= d.F.highest_level(); ++p)
                if (!d.F.step(p - 1).contains(d.F.step(p).apply(n))) r.nilpotents_horizontal = false;
        }
    }
    for (size_t i = 0; i < d.nilpotents.size(); ++i)
        for (size_t j = i + 1; j < d.nilpotents.size(); ++j)
            if (!bracket(d.nilpotents[i], d.nilpotents[j]).is_zero()) r.nilpotents_commute = false;
    if (!r.nilpotents_nilpotent) r.errors.push_back("a nilpotent entry is not nilpotent");
    if (!r.nilpotents_preserve_w) r.errors.push_back("a nilpotent does not preserve W");
    if (!r.nilpotents_horizontal) r.errors.push_back("a nilpotent violates horizontality");
    if (!r.nilpotents_commute) r.errors.push_back("nilpotents do not commute");

    r.fiber_mhs = r.filtrations_well_formed && try_deligne_bigrading(d.F, d.W).has_value();

    // first bilinear relation and graded purity/positivity
    if (r.structurally_valid()) {
        r.first_bilinear_ok = true;
        r.graded_pure_hodge = true;
        r.graded_positive = true;
        for (int k : d.W.jumps()) {
            auto piece = detail::graded_piece(d, k);
            if (piece.g == 0) continue;
            // Q_k(F^a Gr, F^{k-a+1} Gr) = 0
            for (int a = piece.f_induced.empty() ? 0 : piece.f_induced.lowest_level();
                 a <= (piece.f_induced.empty() ? 0 : piece.f_induced.highest_level()); ++a) {
                Subspace fa = piece.f_induced.step(a);
                Subspace fb = piece.f_induced.step(k - a + 1);
                for (const auto& u : fa.basis_vectors())
                    for (const auto& v : fb.basis_vectors())
                        if (!d.q_value(k, u, v).is_zero()) r.first_bilinear_ok = false;
            }
            // purity: Gr_k = F^p (+) conj(F^{k-p+1}) for each p (pure HS test)
            IncreasingFiltration pure_w = IncreasingFiltration::single_weight(piece.g, k);
            auto bg = try_deligne_bigrading(piece.f_induced, pure_w);
            bool is_pure_hs = bg.has_value();
            if (is_pure_hs) {
                for (const auto& [pq, s] : bg->pieces)
                    if (s.conj() != bg->piece(pq.second, pq.first)) is_pure_hs = false;
            }
            if (!is_pure_hs) {
                r.graded_pure_hodge = false;
                continue;
            }
            // positivity of i^{p-q} Q(v, conj v) via exact leading minors on
            // each I^{p,q}
            for (const auto& [pq, s] : bg->pieces) {
                GQ phase = i_power(pq.first - pq.second);
                size_t m = s.dim();
                Mat gram(m, m);
                for (size_t a = 0; a < m; ++a)
                    for (size_t b = 0; b < m; ++b)
                        gram(a, b) = phase * d.q_value(k, s.basis().row(a), conj(s.basis().row(b)));
                for (size_t lead = 1; lead <= m; ++lead) {
                    Mat sub(lead, lead);
                    for (size_t a = 0; a < lead; ++a)
                        for (size_t b = 0; b < lead; ++b) sub(a, b) = gram(a, b);
                    GQ dd = det(sub);
                    if (!dd.is_real() || dd.re <= 0) r.graded_positive = false;
                }
            }
        }
        if (!r.first_bilinear_ok) r.errors.push_back("first bilinear relation fails on a graded piece");
    }

    r.shape = classify_shape(d);
    return r;
}

}  // namespace lmhs
