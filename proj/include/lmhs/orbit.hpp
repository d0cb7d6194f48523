#pragma once

// End-to-end expansion of a short nilpotent orbit: splitting, sl2 data,
// parameter matching against the splitting, series assembly, and the
// verification battery (matching identity, kernel conditions, flow
// residuals, norm growth, limiting grading, shape of the full orbit).

#include "lmhs/delta.hpp"
#include "lmhs/metric.hpp"
#include "lmhs/mhs.hpp"
#include "lmhs/nahm.hpp"
#include "lmhs/weight_filtrations.hpp"

#include <complex>
#include <optional>
#include <sstream>

namespace lmhs {

// ---------------------------------------------------------------------------
// Thin complex-double layer for residual evaluation only.

using CD = std::complex<double>;

struct DMat {
    size_t rows = 0, cols = 0;
    std::vector<CD> a;

    DMat() = default;
    DMat(size_t r, size_t c) : rows(r), cols(c), a(r * c) {}
    CD& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    CD operator()(size_t i, size_t j) const { return a[i * cols + j]; }

    static DMat from(const Mat& m) {
        DMat d(m.rows(), m.cols());
        for (size_t i = 0; i < m.rows(); ++i)
            for (size_t j = 0; j < m.cols(); ++j)
                d(i, j) = CD(to_double(m(i, j).re), to_double(m(i, j).im));
        return d;
    }
    static DMat identity(size_t n) {
        DMat d(n, n);
        for (size_t j = 0; j < n; ++j) d(j, j) = 1.0;
        return d;
    }

    DMat operator*(const DMat& o) const {
        DMat out(rows, o.cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t k = 0; k < cols; ++k) {
                CD v = (*this)(i, k);
                if (v == CD(0)) continue;
                for (size_t j = 0; j < o.cols; ++j) out(i, j) += v * o(k, j);
            }
        return out;
    }
    DMat operator-(const DMat& o) const {
        DMat out(rows, cols);
        for (size_t k = 0; k < a.size(); ++k) out.a[k] = a[k] - o.a[k];
        return out;
    }
    DMat adjoint() const {
        DMat out(cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }
    double frob() const {
        double s = 0;
        for (const auto& x : a) s += std::norm(x);
        return std::sqrt(s);
    }
};

inline std::optional<DMat> dinverse(DMat m) {
    size_t n = m.rows;
    DMat inv = DMat::identity(n);
    for (size_t c = 0; c < n; ++c) {
        size_t sel = c;
        double best = std::abs(m(c, c));
        for (size_t i = c + 1; i < n; ++i)
            if (std::abs(m(i, c)) > best) {
                best = std::abs(m(i, c));
                sel = i;
            }
        if (best < 1e-14) return std::nullopt;
        if (sel != c)
            for (size_t j = 0; j < n; ++j) {
                std::swap(m(c, j), m(sel, j));
                std::swap(inv(c, j), inv(sel, j));
            }
        CD piv = m(c, c);
        for (size_t j = 0; j < n; ++j) {
            m(c, j) /= piv;
            inv(c, j) /= piv;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            CD f = m(i, c);
            if (f == CD(0)) continue;
            for (size_t j = 0; j < n; ++j) {
                m(i, j) -= f * m(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Frobenius distance between the h-orthogonal projections onto two spans
/// (columns of l and r), with gram the metric.
inline double projection_distance(const DMat& l, const DMat& r, const DMat& gram) {
    auto proj = [&](const DMat& b) -> DMat {
        DMat bg = b.adjoint() * gram;       // b* G
        DMat inner = bg * b;                // b* G b
        auto inv = dinverse(inner);
        if (!inv) throw std::runtime_error("projection_distance: degenerate basis");
        return b * (*inv * bg);
    };
    return (proj(l) - proj(r)).frob();
}

/// Columns of a subspace basis as a DMat.
inline DMat dcolumns(const Subspace& s) {
    DMat out(s.ambient_dim(), s.dim());
    for (size_t j = 0; j < s.dim(); ++j)
        for (size_t i = 0; i < s.ambient_dim(); ++i)
            out(i, j) = CD(to_double(s.basis()(j, i).re), to_double(s.basis()(j, i).im));
    return out;
}

// ---------------------------------------------------------------------------

struct AdmissibilityReport {
    bool horizontal = false;
    bool relw_exists = false;
    bool limit_is_mhs = false;
    bool n_is_minus11 = false;
    HodgeShape shape = HodgeShape::Other;
    std::vector<std::string> errors;

    bool admissible() const { return horizontal && relw_exists && limit_is_mhs && n_is_minus11; }

    std::string to_text() const {
        std::ostringstream os;
        os << "admissibility:\n";
        os << "  horizontality N F^p <= F^{p-1}: " << (horizontal ? "ok" : "FAIL") << "\n";
        os << "  relative weight filtration exists: " << (relw_exists ? "ok" : "FAIL") << "\n";
        os << "  (F, relW) is a mixed Hodge structure: " << (limit_is_mhs ? "ok" : "FAIL") << "\n";
        os << "  N is a (-1,-1)-morphism of the limit: " << (n_is_minus11 ? "ok" : "FAIL") << "\n";
        os << "  verdict: " << (admissible() ? "admissible" : "NOT admissible") << "\n";
        for (const auto& e : errors) os << "  error: " << e << "\n";
        return os.str();
    }
};

/// Admissibility of the orbit generated by the combined nilpotent.
inline AdmissibilityReport check_admissible_orbit(const MixedHodgeData& d) {
    AdmissibilityReport r;
    Mat n = d.combined_nilpotent();
    r.horizontal = true;
    if (!d.F.empty())
        for (int p = d.F.lowest_level(); p <= d.F.highest_level(); ++p)
            if (!d.F.step(p - 1).contains(d.F.step(p).apply(n))) r.horizontal = false;
    if (!d.W.preserved_by(n)) {
        r.errors.push_back("N does not preserve W");
        return r;
    }
    auto rel = relative_weight_filtration(n, d.W);
    r.relw_exists = rel.has_value();
    if (!r.relw_exists) return r;
    auto bg = try_deligne_bigrading(d.F, *rel);
    r.limit_is_mhs = bg.has_value();
    if (!r.limit_is_mhs) return r;
    // N I^{p,q} <= I^{p-1,q-1} (+) lower
    r.n_is_minus11 = true;
    for (const auto& [pq, s] : bg->pieces) {
        Subspace allowed = bg->piece(pq.first - 1, pq.second - 1);
        for (const auto& [rs, t] : bg->pieces)
            if (rs.first < pq.first - 1 && rs.second < pq.second - 1) allowed = allowed + t;
        if (!allowed.contains(s.apply(n))) r.n_is_minus11 = false;
    }
    r.shape = classify_shape(d);
    return r;
}

// ---------------------------------------------------------------------------

struct OrbitReport {
    bool matching_identity = false;        // e^{i delta} = e^zeta (1 + sum ...) exactly
    bool reconstructs_f = false;           // the matched series reproduces F exactly
    bool parameters_hodge = false;         // T_n, S_n land in the right Hodge types
    bool kernel_conditions = false;        // (ad N0)^{k+1} g_k = 0 etc.
    bool lax_residual_zero = false;
    bool nahm_residual_zero = false;
    bool zeta_in_kernel = false;
    bool type2_commutation = true;         // [beta^{0,0}, beta^{-1,-1}] = 0
    bool type2_hierarchy = true;           // depth rows of the extension system
    bool shape_ok = false;                 // Hodge component shape of beta
    std::vector<std::pair<double, double>> claim_a_residuals;  // (y, residual)
    std::vector<std::string> notes;

    bool all_ok() const {
        return matching_identity && reconstructs_f && parameters_hodge && kernel_conditions &&
               lax_residual_zero && nahm_residual_zero && zeta_in_kernel && type2_commutation &&
               type2_hierarchy && shape_ok;
    }
};

struct OrbitExpansion {
    MixedHodgeData data;
    OrbitType type = OrbitType::I;
    long long order = 8;

    Mat n;  // combined nilpotent
    IncreasingFiltration rel_w;
    Mat delta;
    DecreasingFiltration f_hat;
    Sl2Data sl2;
    DecreasingFiltration f_o;  // e^{i N0}.F_hat
    Bigrading bg_hat;          // bigrading of (F_hat, relW)
    GlBigrading gl_hat;        // and of gl at the split limit
    Bigrading bg_o;            // bigrading of (F_o, W)
    GlBigrading gl_o;
    HermitianForm metric_o;
    FlowOperator flow;

    Mat zeta;
    Mat eta;
    FreeParameters params;
    std::vector<HomSl2> phi;
    std::vector<HomU> psi;
    HalfPowerSeries beta;
    FrameSeries frame;
    int report_kmax = 0;  // g-coefficients attributed to the requested order

    OrbitReport report;

    /// g(y) including the constant factor e^zeta, truncated at the
    /// requested-order window, evaluated exactly.
    Mat g_at(const Rational& y) const {
        Mat acc = Mat::zero(data.dim, data.dim);
        Rational p(1);
        for (int k = 0; k <= std::min(report_kmax, frame.kmax); ++k) {
            acc += GQ(p) * frame.g[k];
            p /= y;
        }
        return exp_nilpotent(zeta) * acc;
    }

    /// The flag g(y) e^{iyN}.F_hat (exact at rational y).
    DecreasingFiltration rhs_flag(const Rational& y) const {
        Mat rot = g_at(y) * exp_nilpotent(GQ(Rational(0), y) * n);
        return f_hat.apply(rot);
    }

    /// The frame h(y) = g(y) e^{iy N_{-2}} y^{-H/2}, exact at perfect
    /// squares y = sqrt_y^2; satisfies beta(y) = Ad(h(y)^{-1}) N.
    Mat h_at(const Rational& sqrt_y) const {
        Rational y = sqrt_y * sqrt_y;
        std::vector<long long> eigs;
        for (long long a : sl2.rel_y.eigenvalues())
            for (long long b : sl2.y.eigenvalues()) eigs.push_back(a - b);
        std::sort(eigs.begin(), eigs.end());
        eigs.erase(std::unique(eigs.begin(), eigs.end()), eigs.end());
        Mat yh = Mat::zero(data.dim, data.dim);
        for (long long w : eigs) {
            Mat p = eigen_projection(sl2.triple.h, eigs, w);
            if (p.is_zero()) continue;
            Rational scale(1);
            if (w >= 0)
                for (long long j = 0; j < w; ++j) scale /= sqrt_y;
            else
                for (long long j = 0; j < -w; ++j) scale *= sqrt_y;
            yh += GQ(scale) * p;
        }
        return g_at(y) * exp_nilpotent(GQ(Rational(0), y) * sl2.n_minus2) * yh;
    }
    DecreasingFiltration lhs_flag(const Rational& y) const {
        return data.F.apply(exp_nilpotent(GQ(Rational(0), y) * n));
    }
};

namespace detail {

/// Real-point basis of a conjugation-stable complex subspace: vectors fixed
/// by entrywise conjugation, found by a rational solve.
inline std::vector<Vec> real_points_basis(const Subspace& s) {
    size_t dimc = s.dim();
    if (dimc == 0) return {};
    size_t n = s.ambient_dim();
    // v = sum (a_j + i b_j) basis_j real unknowns a, b; conj(v) = v
    Mat sys(2 * n, 2 * dimc);
    for (size_t j = 0; j < dimc; ++j) {
        Vec bj = s.basis().row(j);
        for (size_t i = 0; i < n; ++i) {
            // imaginary part of v_i must vanish:
            // Im((a + i b)(re + i im)) = a*im + b*re
            sys(i, j) = GQ(bj[i].im);
            sys(i, dimc + j) = GQ(bj[i].re);
        }
        // rows n..2n-1 unused (real part is free); keep zero
    }
    std::vector<Vec> coeffs = kernel_basis(sys);
    std::vector<Vec> out;
    for (const auto& c : coeffs) {
        Vec v(n);
        for (size_t j = 0; j < dimc; ++j) {
            GQ coef(c[j].re, c[dimc + j].re);  // a_j + i b_j with rational a,b
            if (coef.is_zero()) continue;
            v = v + coef * s.basis().row(j);
        }
        if (!is_zero(v) && conj(v) == v) out.push_back(v);
    }
    // canonicalize and drop dependents
    Subspace sp = Subspace::span(n, out);
    std::vector<Vec> basis;
    Subspace acc = Subspace::zero(n);
    for (const auto& v : out) {
        if (!acc.contains(v)) {
            basis.push_back(v);
            acc = acc + Subspace::span(n, {v});
        }
        if (basis.size() == sp.dim()) break;
    }
    return basis;
}

}  // namespace detail

/// Splits the orbit: relative weight filtration, delta splitting of the
/// limit, and the sl2 data of the associated split orbit.
inline OrbitExpansion split_orbit(const MixedHodgeData& d) {
    OrbitExpansion ox;
    ox.data = d;
    ox.n = d.combined_nilpotent();

    AdmissibilityReport adm = check_admissible_orbit(d);
    if (!adm.admissible()) throw std::invalid_argument("split_orbit: input orbit is not admissible");
    HodgeShape shape = classify_shape(d);
    if (shape == HodgeShape::TypeII)
        ox.type = OrbitType::II;
    else if (shape == HodgeShape::TypeI || shape == HodgeShape::Pure)
        ox.type = OrbitType::I;
    else
        throw std::domain_error("split_orbit: unsupported Hodge-number shape");

    ox.rel_w = *relative_weight_filtration(ox.n, d.W);
    auto split = delta_splitting(d.F, ox.rel_w);
    ox.delta = split.delta;
    ox.f_hat = split.f_hat;
    ox.bg_hat = deligne_bigrading(ox.f_hat, ox.rel_w);
    if (!bigrading_split_over_r(ox.bg_hat)) throw std::logic_error("split_orbit: limit is not split over R");
    ox.gl_hat = gl_bigrading(ox.bg_hat);

    Grading rel_y = weight_grading(ox.bg_hat);
    ox.sl2 = make_sl2_data(ox.n, rel_y, d.W);
    if (ox.type == OrbitType::I && !ox.sl2.n_minus2.is_zero())
        throw std::logic_error("split_orbit: type I orbit with nonzero depth-2 part");

    ox.f_o = ox.f_hat.apply(exp_nilpotent(GQ::i() * ox.sl2.n0));
    ox.bg_o = deligne_bigrading(ox.f_o, d.W);
    ox.gl_o = gl_bigrading(ox.bg_o);
    ox.metric_o = mixed_hodge_metric(d, ox.bg_o);
    if (!ox.metric_o.positive_definite())
        throw std::logic_error("split_orbit: mixed Hodge metric at the base point is not positive");
    ox.flow = FlowOperator::at(ox.gl_o);
    return ox;
}

namespace detail {

/// Builds T_n from the bottom-weight value b (ad H weight -n, killed by
/// ad N0) of the highest-weight slot.
inline HomSl2 t_from_bottom(const Sl2Triple& t, const Mat& b, long long n) {
    Mat tn0 = b;
    Mat th = GQ(Rational(2, n)) * bracket(t.n0p, b);
    Mat tn0p = -GQ(Rational(1, n * (n - 1))) * bracket(t.n0p, bracket(t.n0p, b));
    // convert values on (n0, h, n0p) to values on (x+, z, x-)
    GQ half(Rational(1, 2)), i = GQ::i();
    HomSl2 out;
    out.xp = half * (th + i * (tn0 + tn0p));
    out.xm = half * (th - i * (tn0 + tn0p));
    out.z = i * (tn0 - tn0p);
    return out;
}

inline HomU s_from_bottom(const Sl2Triple& t, const Mat& b, long long n) {
    HomU out;
    out.f = b;
    out.e = GQ(Rational(1, n)) * bracket(t.n0p, b);
    return out;
}

/// Splits eta into the free parameters through the ad-Y and ad-H graded
/// components of its pieces.
inline FreeParameters parameters_from_eta(const OrbitExpansion& ox, const SeriesContext& ctx, const Mat& eta) {
    FreeParameters params;
    Mat eta0 = grading_component(ox.sl2.y, eta, 0);
    Mat eta1 = grading_component(ox.sl2.y, eta, -1);
    for (long long w : ctx.adh_weights()) {
        if (w >= 0) continue;
        long long nn = -w;
        Mat t_bot = ctx.adh_component(eta0, w);
        if (!t_bot.is_zero()) {
            if (nn < 2) throw std::domain_error("parameters_from_eta: depth-0 part at forbidden weight");
            params.t[nn] = t_from_bottom(ctx.triple(), t_bot, nn);
        }
        Mat s_bot = ctx.adh_component(eta1, w);
        if (!s_bot.is_zero()) params.s[nn] = s_from_bottom(ctx.triple(), s_bot, nn);
    }
    return params;
}

/// E(eta) = 1 + sum_{k>0} (1/k!) (-i)^k (ad N0)^k g_k for the series built
/// from eta's parameters.
inline Mat match_factor(const OrbitExpansion& ox, const SeriesContext& ctx, const Mat& eta, long long order) {
    FreeParameters params = parameters_from_eta(ox, ctx, eta);
    auto phi = phi_recursion(ctx, params, order);
    auto psi = psi_recursion(ctx, phi, params, order);
    auto frame = integrate_frame(ctx, phi, psi, ox.type);
    size_t n = ox.data.dim;
    Mat acc = Mat::identity(n);
    for (int k = 1; k <= frame.kmax; ++k) {
        Mat term = frame.g[k];
        Rational fact(1);
        for (int j = 1; j <= k; ++j) {
            term = bracket(ctx.triple().n0, term);
            fact *= Rational(j);
        }
        acc += i_power(-k) * GQ(Rational(1) / fact) * term;
    }
    return acc;
}

}  // namespace detail

/// Solves  e^{i delta} = e^zeta E(eta)  for zeta and eta depth by depth in
/// the ad-relY weight.  zeta lies in ker(ad N0) cap ker(ad N_{-2}) cap
/// Lambda_hat with real components in ad-Y weights 0 and -1 (the weight -2
/// part may be complex for type II); eta is real and carries the free
/// series parameters.
inline void match_parameters(OrbitExpansion& ox, const SeriesContext& ctx, long long order) {
    size_t n = ox.data.dim;
    size_t nn = n * n;

    // kernel space: Lambda_hat cap ker(ad N0) cap ker(ad N_{-2})
    Subspace lambda_hat = ox.gl_hat.lambda();
    Subspace kern = intersect(Subspace::span(nn, kernel_basis(ad_matrix(ox.sl2.n0))),
                              Subspace::span(nn, kernel_basis(ad_matrix(ox.sl2.n_minus2))));
    Subspace kspace = intersect(lambda_hat, kern);

    // split by ad-Y weight
    Mat ady = ad_matrix(ox.sl2.y.matrix);
    std::vector<long long> ady_eigs = detail::grading_ad_eigs(ox.sl2.y);
    auto y_component_space = [&](const Subspace& s, long long w) {
        Mat p = eigen_projection(ady, ady_eigs, w);
        std::vector<Vec> vs;
        for (const auto& b : s.basis_vectors()) {
            Vec img = p * b;
            if (!is_zero(img)) vs.push_back(img);
        }
        return Subspace::span(nn, vs);
    };

    // depth grading by ad-relY weight
    std::vector<long long> rel_eigs = detail::grading_ad_eigs(ox.sl2.rel_y);
    auto depth_component = [&](const Mat& x, long long d) {
        return ad_component(ox.sl2.rel_y.matrix, rel_eigs, -d, x);
    };

    // unknown bases per depth
    long long dmax = 0;
    for (long long a : ox.sl2.rel_y.eigenvalues())
        for (long long b : ox.sl2.rel_y.eigenvalues()) dmax = std::max(dmax, a - b);

    // eta: real vectors in ad-Y weights 0 and -1
    // zeta: real vectors in ad-Y weights 0 and -1, complex ones in weight -2
    std::vector<Vec> eta_basis, zeta_real_basis, zeta_cplx_basis;
    for (long long w : {0LL, -1LL}) {
        Subspace sw = y_component_space(kspace, w);
        for (const auto& v : detail::real_points_basis(sw)) {
            eta_basis.push_back(v);
            zeta_real_basis.push_back(v);
        }
    }
    {
        Subspace sw = y_component_space(kspace, -2);
        for (const auto& v : sw.basis_vectors()) zeta_cplx_basis.push_back(v);
    }

    Mat zeta = Mat::zero(n, n), eta = Mat::zero(n, n);
    Mat target = exp_nilpotent(GQ::i() * ox.delta);

    for (long long d = 2; d <= dmax; ++d) {
        Mat current = exp_nilpotent(zeta) * detail::match_factor(ox, ctx, eta, order);
        Mat defect = target - current;
        // sanity: shallower depths already matched
        for (long long dd = 0; dd < d; ++dd)
            if (!depth_component(defect, dd).is_zero())
                throw std::logic_error("match_parameters: residual at already-matched depth");
        Mat defect_d = depth_component(defect, d);

        // collect responses of all unknowns at this depth
        struct Unknown {
            enum Kind { EtaReal, ZetaReal, ZetaCplxRe, ZetaCplxIm } kind;
            Vec direction;  // flattened gl
        };
        std::vector<Unknown> unknowns;
        std::vector<Vec> responses;
        auto depth_part_of = [&](const Vec& v) { return flatten(depth_component(unflatten(v, n, n), d)); };
        Mat base_factor = detail::match_factor(ox, ctx, eta, order);
        for (const auto& b : eta_basis) {
            Vec bd = depth_part_of(b);
            if (is_zero(bd)) continue;
            Mat probe = eta + unflatten(bd, n, n);
            Mat resp = detail::match_factor(ox, ctx, probe, order) - base_factor;
            responses.push_back(flatten(depth_component(resp, d)));
            unknowns.push_back({Unknown::EtaReal, bd});
        }
        for (const auto& b : zeta_real_basis) {
            Vec bd = depth_part_of(b);
            if (is_zero(bd)) continue;
            responses.push_back(bd);
            unknowns.push_back({Unknown::ZetaReal, bd});
        }
        for (const auto& b : zeta_cplx_basis) {
            Vec bd = depth_part_of(b);
            if (is_zero(bd)) continue;
            responses.push_back(bd);
            unknowns.push_back({Unknown::ZetaCplxRe, bd});
            Vec ibd(bd.size());
            for (size_t j = 0; j < bd.size(); ++j) ibd[j] = GQ::i() * bd[j];
            responses.push_back(ibd);
            unknowns.push_back({Unknown::ZetaCplxIm, ibd});
        }
        if (unknowns.empty()) {
            if (!defect_d.is_zero())
                throw std::domain_error("match_parameters: no free parameters left at depth " + std::to_string(d));
            continue;
        }

        // real-linear system: real and imaginary coordinate rows
        Mat sys(2 * nn, unknowns.size());
        Vec rhs(2 * nn);
        Vec target_flat = flatten(defect_d);
        for (size_t i = 0; i < nn; ++i) {
            rhs[i] = GQ(target_flat[i].re);
            rhs[nn + i] = GQ(target_flat[i].im);
        }
        for (size_t u = 0; u < unknowns.size(); ++u)
            for (size_t i = 0; i < nn; ++i) {
                sys(i, u) = GQ(responses[u][i].re);
                sys(nn + i, u) = GQ(responses[u][i].im);
            }
        LinearSolution sol = solve_linear(sys, rhs);
        if (!sol.particular)
            throw std::domain_error("match_parameters: no solution at depth " + std::to_string(d));
        for (size_t u = 0; u < unknowns.size(); ++u) {
            GQ c = (*sol.particular)[u];
            if (c.is_zero()) continue;
            if (!c.is_real()) throw std::logic_error("match_parameters: non-real coefficient in real solve");
            Mat dir = unflatten(unknowns[u].direction, n, n);
            switch (unknowns[u].kind) {
                case Unknown::EtaReal: eta += GQ(c.re) * dir; break;
                case Unknown::ZetaReal: zeta += GQ(c.re) * dir; break;
                case Unknown::ZetaCplxRe: zeta += GQ(c.re) * dir; break;
                case Unknown::ZetaCplxIm: zeta += GQ(c.re) * dir; break;
            }
        }
    }

    // final exactness
    Mat achieved = exp_nilpotent(zeta) * detail::match_factor(ox, ctx, eta, order);
    if (achieved != target) throw std::logic_error("match_parameters: matching identity fails after the solve");

    ox.zeta = zeta;
    ox.eta = eta;
    ox.params = detail::parameters_from_eta(ox, ctx, eta);
}

/// The full pipeline.  The requested order fixes the reported truncation
/// window; the internal series run deep enough that the matching identity
/// and all exact checks are unaffected by it.
inline OrbitExpansion expand_orbit(const MixedHodgeData& d, long long order = 8) {
    OrbitExpansion ox = split_orbit(d);
    ox.order = order;

    long long dmax = 0;
    for (long long a : ox.sl2.rel_y.eigenvalues())
        for (long long b : ox.sl2.rel_y.eigenvalues()) dmax = std::max(dmax, a - b);
    long long wmax = 0;
    for (long long a : ox.sl2.rel_y.eigenvalues())
        for (long long b : ox.sl2.y.eigenvalues()) wmax = std::max(wmax, std::abs(a - b));
    long long series_order = std::max(order + wmax + 2, 2 * dmax + wmax + 2);
    ox.report_kmax = static_cast<int>(order / 2);

    SeriesContext ctx(ox.sl2.triple);
    match_parameters(ox, ctx, series_order);

    ox.phi = phi_recursion(ctx, ox.params, series_order);
    ox.psi = psi_recursion(ctx, ox.phi, ox.params, series_order);
    ox.beta = beta_assemble(ctx, ox.phi, ox.psi, ox.type, ox.sl2.n_minus2).truncate(2 + static_cast<int>(order));
    ox.frame = integrate_frame(ctx, ox.phi, ox.psi, ox.type);

    OrbitReport& rep = ox.report;
    size_t n = d.dim;

    // (c) matching identity, rechecked from the stored pieces
    Mat match = Mat::identity(n);
    for (int k = 1; k <= ox.frame.kmax; ++k) {
        Mat term = ox.frame.g[k];
        Rational fact(1);
        for (int j = 1; j <= k; ++j) {
            term = bracket(ox.sl2.n0, term);
            fact *= Rational(j);
        }
        match += i_power(-k) * GQ(Rational(1) / fact) * term;
    }
    rep.matching_identity = (exp_nilpotent(ox.zeta) * match == exp_nilpotent(GQ::i() * ox.delta));

    // (i) reconstruction of F
    DecreasingFiltration f_tilde = ox.f_hat.apply(exp_nilpotent(ox.zeta) * match);
    rep.reconstructs_f = (f_tilde == d.F);

    // the free parameters are morphisms of Hodge structure at the base
    // point: T_n has types (1,-1)/(0,0)/(-1,1) on (x+, z, x-) and S_n has
    // types (0,-1)/(-1,0) on (nu+, nu-)
    rep.parameters_hodge = true;
    {
        auto in_piece = [&](const Mat& v, int r, int s2) {
            return v.is_zero() || ox.gl_o.piece(r, s2).contains(flatten(v));
        };
        for (const auto& [nn_, t] : ox.params.t) {
            if (!in_piece(t.xp, 1, -1) || !in_piece(t.z, 0, 0) || !in_piece(t.xm, -1, 1))
                rep.parameters_hodge = false;
        }
        for (const auto& [nn_, sv] : ox.params.s) {
            if (!in_piece(sv.on_nu_plus(), 0, -1) || !in_piece(sv.on_nu_minus(), -1, 0))
                rep.parameters_hodge = false;
        }
    }

    // (b) kernel conditions
    rep.kernel_conditions = true;
    for (int k = 1; k <= ox.frame.kmax; ++k) {
        Mat gk = ox.frame.g[k], fk = ox.frame.f[k];
        for (int j = 0; j <= k; ++j) {
            gk = bracket(ox.sl2.n0, gk);
            fk = bracket(ox.sl2.n0, fk);
        }
        if (!gk.is_zero() || !fk.is_zero()) rep.kernel_conditions = false;
        if (!bracket(ox.sl2.n_minus2, ox.frame.g[k]).is_zero()) rep.kernel_conditions = false;
    }
    rep.zeta_in_kernel = bracket(ox.sl2.n0, ox.zeta).is_zero() &&
                         bracket(ox.sl2.n_minus2, ox.zeta).is_zero() &&
                         ox.gl_hat.lambda().contains(flatten(ox.zeta));

    // flow residuals
    rep.lax_residual_zero = lax_residual(ox.beta, ox.flow).is_zero();
    rep.nahm_residual_zero = nahm_residual(ctx, ox.phi, ox.beta.trunc()).all_zero();

    // Hodge component shape of beta at F_o
    rep.shape_ok = true;
    for (const auto& [m, c] : ox.beta.coeffs()) {
        for (const auto& [rs, comp] : ox.gl_o.decompose(c)) {
            auto [r, s] = rs;
            bool allowed = (r == 1 && s == -1) || (r == 0 && s == 0) || (r == -1 && s == 1) ||
                           (r == 0 && s < 0) || (r == -1 && s <= 1);
            if (ox.type == OrbitType::II) allowed = allowed || (r == -1 && s == -1);
            if (!allowed) rep.shape_ok = false;
        }
    }

    if (ox.type == OrbitType::II) {
        // [beta^{0,0}, beta^{-1,-1}] = 0 as series
        auto comp_series = [&](int r, int s) {
            HalfPowerSeries out(n, ox.beta.trunc());
            for (const auto& [m, c] : ox.beta.coeffs()) out.add_term(m, ox.gl_o.component(c, r, s));
            return out;
        };
        HalfPowerSeries b00 = comp_series(0, 0), bmm = comp_series(-1, -1);
        rep.type2_commutation = commutator(b00, bmm).is_zero();

        // extension hierarchy rows: with a = -2 h^{-1} h', the depth rows are
        //   d/dy a^{-1,1-k} = 1/2 [Z, a^{-1,1-k}] - [X-, a^{0,-k}] + tau_k
        //   d/dy a^{0,-k}   = -[X+, a^{-1,1-k}] - 1/2 [Z, a^{0,-k}]
        // with tau_1 = 0, tau_2 = [a^{0,-1}, a^{-1,0}].
        GQ twoi(Rational(0), Rational(2));
        HalfPowerSeries xp = comp_series(1, -1), xm_c = comp_series(-1, 1), zz = comp_series(0, 0);
        HalfPowerSeries xps = twoi * xp, zs = twoi * zz, xms = -GQ(1) * (twoi * xm_c);
        rep.type2_hierarchy = true;
        for (int k = 1; k <= 2; ++k) {
            HalfPowerSeries am = -GQ(1) * (twoi * comp_series(-1, 1 - k));
            HalfPowerSeries ap = twoi * comp_series(0, -k);
            HalfPowerSeries tau(n, ox.beta.trunc());
            if (k == 2) tau = commutator(twoi * comp_series(0, -1), -GQ(1) * (twoi * comp_series(-1, 0)));
            HalfPowerSeries r1 = am.derivative() - GQ(Rational(1, 2)) * commutator(zs, am) + commutator(xms, ap) - tau;
            HalfPowerSeries r2 = ap.derivative() + commutator(xps, am) + GQ(Rational(1, 2)) * commutator(zs, ap);
            int safe = ox.beta.trunc();
            r1.truncate(safe);
            r2.truncate(safe);
            if (!r1.is_zero() || !r2.is_zero()) rep.type2_hierarchy = false;
        }
    }

    // majorant constant for the extension coefficients (reported, finite
    // whenever any extension parameter is present)
    {
        auto fnorm = [](const Mat& m) {
            double acc = 0;
            for (size_t i = 0; i < m.rows(); ++i)
                for (size_t j = 0; j < m.cols(); ++j) acc += to_double(m(i, j).norm2());
            return std::sqrt(acc);
        };
        double smax = 0;
        for (const auto& [nn, sv] : ox.params.s)
            smax = std::max(smax, fnorm(sv.on_nu_plus()) + fnorm(sv.on_nu_minus()));
        if (smax > 0) {
            double dmin_report = 0;
            for (size_t m = 1; m < ox.psi.size(); ++m) {
                double nm = fnorm(ox.psi[m].on_nu_plus()) + fnorm(ox.psi[m].on_nu_minus());
                if (nm > 0) dmin_report = std::max(dmin_report, std::pow(nm, 1.0 / double(m)) / smax);
            }
            rep.notes.push_back("extension-coefficient majorant: |Psi_n| <= (D max|S|)^n with minimal D = " +
                                std::to_string(dmin_report));
        }
    }

    // claim (a) float residuals at sample heights
    DMat gram = DMat::from(ox.metric_o.gram);
    DecreasingFiltration f_canonical = ox.data.F.canonical();
    for (double y : {100.0, 1000.0, 10000.0}) {
        Rational yr(static_cast<long long>(y));
        double worst = 0;
        for (const auto& [p, s] : f_canonical.raw_steps()) {
            Subspace lhs = ox.lhs_flag(yr).step(p);
            Subspace rhs = ox.rhs_flag(yr).step(p);
            if (lhs.dim() == 0 || lhs.dim() == ox.data.dim) continue;
            if (lhs == rhs) continue;  // exact agreement
            worst = std::max(worst, projection_distance(dcolumns(lhs), dcolumns(rhs), gram));
        }
        rep.claim_a_residuals.push_back({y, worst});
    }
    return ox;
}

// ---------------------------------------------------------------------------
// Theorem-level verifications on an expansion.

struct NormEstimateEntry {
    long long h_weight = 0;
    bool exact_power_law = false;  // |v|^2 at e^{iyN}.F_hat equals y^k |v|^2 at F_o
    bool bounded_flat = false;     // for k <= 0 flat vectors
    double ratio_spread = 1.0;     // max/min of |v|^2_{F(iy)} / y^k over the samples
};

struct NormEstimateReport {
    std::vector<NormEstimateEntry> entries;
    bool split_exact = true;
    bool ratios_bounded = true;  // at the original (possibly nonsplit) orbit
    std::vector<std::string> notes;
};

/// Norm growth on the split orbit: for every ad-H eigenvector v in
/// ker N_{-2} of weight k, |v|^2 at e^{iyN}.F_hat is exactly y^k |v|^2 at
/// F_o, verified at each sample (exact arithmetic).
inline NormEstimateReport verify_norm_estimates(const OrbitExpansion& ox,
                                               const std::vector<Rational>& y_samples) {
    NormEstimateReport out;
    size_t n = ox.data.dim;
    // eigenvectors of H within ker(N_{-2})
    Mat h = ox.sl2.triple.h;
    std::vector<long long> eigs;
    for (long long a : ox.sl2.rel_y.eigenvalues())
        for (long long b : ox.sl2.y.eigenvalues()) eigs.push_back(a - b);
    std::sort(eigs.begin(), eigs.end());
    eigs.erase(std::unique(eigs.begin(), eigs.end()), eigs.end());
    HermitianForm metric_o = mixed_hodge_metric(ox.data, ox.bg_o);

    for (long long k : eigs) {
        Mat shifted = h;
        for (size_t j = 0; j < n; ++j) shifted(j, j) -= GQ(k);
        Subspace ek = Subspace::span(n, kernel_basis(shifted));
        Subspace kerm2 = Subspace::span(n, kernel_basis(ox.sl2.n_minus2));
        Subspace space = intersect(ek, kerm2);
        for (const auto& v : space.basis_vectors()) {
            NormEstimateEntry entry;
            entry.h_weight = k;
            entry.exact_power_law = true;
            Rational nv0 = metric_o.norm2(v);
            for (const Rational& y : y_samples) {
                Mat rot = exp_nilpotent(GQ(Rational(0), y) * ox.n);
                HermitianForm hy = mixed_hodge_metric(ox.data, ox.f_hat.apply(rot));
                Rational lhs = hy.norm2(v);
                Rational expect = nv0;
                if (k >= 0)
                    for (long long j = 0; j < k; ++j) expect *= y;
                else
                    for (long long j = 0; j < -k; ++j) expect /= y;
                if (lhs != expect) entry.exact_power_law = false;
            }
            entry.bounded_flat = (k <= 0) && is_zero(ox.n * v);
            // at the original orbit the law holds up to a bounded factor;
            // measure the spread of the exact ratios across the samples
            {
                double lo = 0, hi = 0;
                bool first = true;
                for (const Rational& y : y_samples) {
                    Mat rot = exp_nilpotent(GQ(Rational(0), y) * ox.n);
                    HermitianForm hy = mixed_hodge_metric(ox.data, ox.data.F.apply(rot));
                    Rational yk(1);
                    if (k >= 0)
                        for (long long j = 0; j < k; ++j) yk *= y;
                    else
                        for (long long j = 0; j < -k; ++j) yk /= y;
                    double ratio = to_double(hy.norm2(v) / yk);
                    if (first || ratio < lo) lo = ratio;
                    if (first || ratio > hi) hi = ratio;
                    first = false;
                }
                entry.ratio_spread = (lo > 0) ? hi / lo : 1.0;
                if (!(entry.ratio_spread < 1e3)) out.ratios_bounded = false;
            }
            out.entries.push_back(entry);
            if (!entry.exact_power_law) out.split_exact = false;
        }
    }
    return out;
}

struct LimitingGradingResult {
    Mat y_infinity;
    double float_discrepancy = 0;  // entrywise max |e^{-iyN}.Y(F(iy)) - Y_inf| at y = 1e4
};

/// Y_inf = e^{i delta}.Y, cross-checked in floating point against the
/// grading of the rotated fiber at large height.
inline LimitingGradingResult limiting_grading(const OrbitExpansion& ox) {
    LimitingGradingResult out;
    Mat rot = exp_nilpotent(GQ::i() * ox.delta);
    out.y_infinity = rot * ox.sl2.y.matrix * *inverse(rot);

    Rational y(10000);
    Mat eyn = exp_nilpotent(GQ(Rational(0), y) * ox.n);
    Mat eyn_inv = exp_nilpotent(GQ(Rational(0), -y) * ox.n);
    Grading y_at = grading_of(ox.data.F.apply(eyn), ox.data.W);
    Mat pulled = eyn_inv * y_at.matrix * eyn;
    Mat diff = pulled - out.y_infinity;
    double worst = 0;
    for (size_t i = 0; i < diff.rows(); ++i)
        for (size_t j = 0; j < diff.cols(); ++j)
            worst = std::max(worst, std::sqrt(to_double(diff(i, j).norm2())));
    out.float_discrepancy = worst;
    return out;
}

struct ShapeSample {
    double x = 0, y = 0;
    double residual = 0;
};

/// Verifies F(z) = e^{xN} g(y) e^{iy N_{-2}} y^{-H/2} . F_o at sampled
/// points in floating point; exact evaluation of both sides where the
/// series is finite makes the residual roundoff-only.
inline std::vector<ShapeSample> corollary43_shape(const OrbitExpansion& ox,
                                                  const std::vector<std::pair<double, double>>& samples) {
    std::vector<ShapeSample> out;
    size_t n = ox.data.dim;
    DMat gram = DMat::from(ox.metric_o.gram);

    // H eigen-projections for the y^{-H/2} factor
    std::vector<long long> h_eigs;
    for (long long a : ox.sl2.rel_y.eigenvalues())
        for (long long b : ox.sl2.y.eigenvalues()) h_eigs.push_back(a - b);
    std::sort(h_eigs.begin(), h_eigs.end());
    h_eigs.erase(std::unique(h_eigs.begin(), h_eigs.end()), h_eigs.end());

    for (auto [x, y] : samples) {
        ShapeSample s;
        s.x = x;
        s.y = y;
        // lhs: e^{(x+iy)N}.F
        DMat ezn = DMat::identity(n);
        {
            DMat nz = DMat::from(ox.n);
            CD z(x, y);
            DMat term = DMat::identity(n);
            double fact = 1;
            for (size_t k = 1; k <= n; ++k) {
                term = term * nz;
                fact *= double(k);
                DMat scaled(n, n);
                for (size_t idx = 0; idx < scaled.a.size(); ++idx)
                    scaled.a[idx] = term.a[idx] * std::pow(z, double(k)) / fact;
                for (size_t idx = 0; idx < ezn.a.size(); ++idx) ezn.a[idx] += scaled.a[idx];
            }
        }
        // rhs: e^{xN} g(y) e^{iyN_{-2}} y^{-H/2}.F_o
        DMat rhs_op = DMat::identity(n);
        {
            DMat xn = DMat::from(ox.n);
            DMat exn = DMat::identity(n);
            DMat term = DMat::identity(n);
            double fact = 1;
            for (size_t k = 1; k <= n; ++k) {
                term = term * xn;
                fact *= double(k);
                for (size_t idx = 0; idx < exn.a.size(); ++idx)
                    exn.a[idx] += term.a[idx] * std::pow(x, double(k)) / fact;
            }
            // g(y) truncated (with the constant factor)
            DMat gy = DMat::from(ox.g_at(Rational(static_cast<long long>(y))));
            DMat em2 = DMat::identity(n);
            {
                DMat nm2 = DMat::from(ox.sl2.n_minus2);
                DMat term2 = DMat::identity(n);
                double fact2 = 1;
                for (size_t k = 1; k <= n; ++k) {
                    term2 = term2 * nm2;
                    fact2 *= double(k);
                    for (size_t idx = 0; idx < em2.a.size(); ++idx)
                        em2.a[idx] += term2.a[idx] * std::pow(CD(0, y), double(k)) / fact2;
                }
            }
            DMat yh(n, n);
            for (long long w : h_eigs) {
                Mat p = eigen_projection(ox.sl2.triple.h, h_eigs, w);
                if (p.is_zero()) continue;
                DMat dp = DMat::from(p);
                double scale = std::pow(y, -double(w) / 2.0);
                for (size_t idx = 0; idx < yh.a.size(); ++idx) yh.a[idx] += dp.a[idx] * scale;
            }
            rhs_op = exn * gy * em2 * yh;
        }
        double worst = 0;
        DecreasingFiltration f_canonical = ox.data.F.canonical();
        for (const auto& [p, sub] : f_canonical.raw_steps()) {
            Subspace fo_p = ox.f_o.step(p);
            Subspace f_p = ox.data.F.step(p);
            if (f_p.dim() == 0 || f_p.dim() == n) continue;
            // columns
            DMat lcols(n, f_p.dim()), rcols(n, fo_p.dim());
            DMat lbase = dcolumns(f_p), rbase = dcolumns(fo_p);
            lcols = ezn * lbase;
            rcols = rhs_op * rbase;
            worst = std::max(worst, projection_distance(lcols, rcols, gram));
        }
        s.residual = worst;
        out.push_back(s);
    }
    return out;
}

}  // namespace lmhs
