#pragma once

// Series solution of the flow equations attached to a short nilpotent
// orbit: the graded part Phi with values in Hom(sl2, gl), the extension
// part Psi with values in Hom(U, gl) for U the twisted standard
// representation, their assembly into the gl-valued series beta, the flow
// operator L, and the integrated frame g(y) with its log-derivative
// coefficients B_m and the twisted coefficients C_l.
//
// Conventions: series are indexed so that order-n coefficients sit at
// y^{-1-n/2}; the defining recursions are
//   -8 Phi' = Q(Phi, Phi),    -2 Psi' = Q(Phi, Psi)
// with Q the Casimir pairing, solved order by order through exact
// eigenprojections of the one-sided and diagonal Casimir operators.

#include "lmhs/bigrading.hpp"
#include "lmhs/eigenprojection.hpp"
#include "lmhs/halfseries.hpp"
#include "lmhs/isotypical.hpp"
#include "lmhs/sl2.hpp"

#include <map>
#include <optional>
#include <vector>

namespace lmhs {

/// A Hom(sl2, gl) value, stored on the Hodge-homogeneous basis (x+, z, x-).
struct HomSl2 {
    Mat xp, z, xm;

    static HomSl2 zero(size_t n) { return {Mat::zero(n, n), Mat::zero(n, n), Mat::zero(n, n)}; }
    bool is_zero() const { return xp.is_zero() && z.is_zero() && xm.is_zero(); }

    HomSl2 operator+(const HomSl2& o) const { return {xp + o.xp, z + o.z, xm + o.xm}; }
    HomSl2 operator-(const HomSl2& o) const { return {xp - o.xp, z - o.z, xm - o.xm}; }
    friend HomSl2 operator*(const GQ& s, const HomSl2& a) { return {s * a.xp, s * a.z, s * a.xm}; }
    bool operator==(const HomSl2& o) const { return xp == o.xp && z == o.z && xm == o.xm; }

    /// Values on the real triple basis (3.15)-style.
    Mat on_n0() const { return GQ(Rational(1, 2)) / GQ::i() * (xp - xm + z); }
    Mat on_h() const { return xp + xm; }
    Mat on_n0p() const { return GQ(Rational(1, 2)) / GQ::i() * (xp - xm - z); }

    Vec flat() const {
        Vec v;
        for (const Mat* m : {&xp, &z, &xm}) {
            Vec f = flatten(*m);
            v.insert(v.end(), f.begin(), f.end());
        }
        return v;
    }
    static HomSl2 unflat(const Vec& v, size_t n) {
        size_t nn = n * n;
        return {unflatten(Vec(v.begin(), v.begin() + nn), n, n),
                unflatten(Vec(v.begin() + nn, v.begin() + 2 * nn), n, n),
                unflatten(Vec(v.begin() + 2 * nn, v.end()), n, n)};
    }
};

/// A Hom(U, gl) value on the basis (e, f) of U.
struct HomU {
    Mat e, f;

    static HomU zero(size_t n) { return {Mat::zero(n, n), Mat::zero(n, n)}; }
    bool is_zero() const { return e.is_zero() && f.is_zero(); }

    HomU operator+(const HomU& o) const { return {e + o.e, f + o.f}; }
    HomU operator-(const HomU& o) const { return {e - o.e, f - o.f}; }
    friend HomU operator*(const GQ& s, const HomU& a) { return {s * a.e, s * a.f}; }
    bool operator==(const HomU& o) const { return e == o.e && f == o.f; }

    Mat on_nu_plus() const { return e + GQ::i() * f; }
    Mat on_nu_minus() const { return e - GQ::i() * f; }

    Vec flat() const {
        Vec v = flatten(e);
        Vec g = flatten(f);
        v.insert(v.end(), g.begin(), g.end());
        return v;
    }
    static HomU unflat(const Vec& v, size_t n) {
        size_t nn = n * n;
        return {unflatten(Vec(v.begin(), v.begin() + nn), n, n),
                unflatten(Vec(v.begin() + nn, v.end()), n, n)};
    }
};

// ---------------------------------------------------------------------------
// Casimir pairing (7.6)-style:
//   Q(A, B)(u) = 2[A(x+), B(x-.u)] + 2[A(x-), B(x+.u)] + [A(z), B(z.u)].

/// Adjoint module: x.u = [x, u] on the (x+, z, x-) basis.
inline HomSl2 casimir_pairing(const HomSl2& a, const HomSl2& b) {
    // structure constants of the adjoint action on (x+, z, x-):
    //   x+. : (0, -2x+ <- z, z <- x-)   etc.
    auto act = [&](int which, const HomSl2& bb, int basis) -> Mat {
        // returns B(x_which . u_basis); which, basis in {0:x+, 1:z, 2:x-}
        // [x+, x+] = 0, [x+, z] = -2 x+, [x+, x-] = z
        // [z, x+] = 2 x+, [z, z] = 0,     [z, x-] = -2 x-
        // [x-, x+] = -z,  [x-, z] = 2 x-, [x-, x-] = 0
        GQ c_xp, c_z, c_xm;
        if (which == 0) {
            if (basis == 1) c_xp = GQ(-2);
            if (basis == 2) c_z = GQ(1);
        } else if (which == 1) {
            if (basis == 0) c_xp = GQ(2);
            if (basis == 2) c_xm = GQ(-2);
        } else {
            if (basis == 0) c_z = GQ(-1);
            if (basis == 1) c_xm = GQ(2);
        }
        return c_xp * bb.xp + c_z * bb.z + c_xm * bb.xm;
    };
    size_t n = a.xp.rows();
    HomSl2 out = HomSl2::zero(n);
    Mat* slots[3] = {&out.xp, &out.z, &out.xm};
    for (int u = 0; u < 3; ++u) {
        Mat val = GQ(2) * bracket(a.xp, act(2, b, u)) + GQ(2) * bracket(a.xm, act(0, b, u)) +
                  bracket(a.z, act(1, b, u));
        *slots[u] = val;
    }
    return out;
}

/// Standard twisted module U: the basis elements act by the 2x2 matrices of
/// the Hodge frame; x+.e = e/2 + if/2, x+.f = ie/2 - f/2, z.e = if,
/// z.f = -ie, x-.e = e/2 - if/2, x-.f = -ie/2 - f/2.
inline HomU casimir_pairing(const HomSl2& a, const HomU& b) {
    GQ half(Rational(1, 2));
    GQ ih = GQ::i() * half;
    auto bval = [&](const GQ& ce, const GQ& cf) { return ce * b.e + cf * b.f; };
    Mat xm_e = bval(half, -ih), xm_f = bval(-ih, -half);
    Mat xp_e = bval(half, ih), xp_f = bval(ih, -half);
    Mat z_e = bval(GQ(0), GQ::i()), z_f = bval(-GQ::i(), GQ(0));
    HomU out;
    out.e = GQ(2) * bracket(a.xp, xm_e) + GQ(2) * bracket(a.xm, xp_e) + bracket(a.z, z_e);
    out.f = GQ(2) * bracket(a.xp, xm_f) + GQ(2) * bracket(a.xm, xp_f) + bracket(a.z, z_f);
    return out;
}

// ---------------------------------------------------------------------------
// Recursion context: exact spectral projectors for the two Hom spaces.

struct FreeParameters {
    std::map<long long, HomSl2> t;  // n -> T_n, highest-weight slot of Phi_n
    std::map<long long, HomU> s;    // n -> S_n, highest-weight slot of Psi_n
};

class SeriesContext {
  public:
    SeriesContext(const Sl2Triple& triple) : triple_(triple), n_(triple.n0.rows()) {
        xz_ = XzBasis::from_triple(triple);
        phi0_ = HomSl2{xz_.xplus, xz_.z, xz_.xminus};
        if (triple.is_zero()) phi0_ = HomSl2::zero(n_);
        iso_ = isotypical(triple_);
        adh_ = ad_matrix(triple_.h);
        // occurring H spectrum by exact kernel ranks; ad H eigenvalues are
        // the differences
        std::vector<long long> h_spec;
        for (long long w = -static_cast<long long>(n_); w <= static_cast<long long>(n_); ++w) {
            Mat shifted = triple_.h;
            for (size_t j = 0; j < n_; ++j) shifted(j, j) -= GQ(w);
            if (!kernel_basis(shifted).empty()) h_spec.push_back(w);
        }
        for (long long a : h_spec)
            for (long long b : h_spec) adh_eigs_.push_back(a - b);
        std::sort(adh_eigs_.begin(), adh_eigs_.end());
        adh_eigs_.erase(std::unique(adh_eigs_.begin(), adh_eigs_.end()), adh_eigs_.end());
        build_sl2_side();
        build_u_side();
    }

    size_t dim() const { return n_; }
    const Sl2Triple& triple() const { return triple_; }
    const XzBasis& xz() const { return xz_; }
    const HomSl2& phi0() const { return phi0_; }
    const IsotypicalDecomposition& iso() const { return iso_; }

    /// [x]^{ad H}_w component.
    Mat adh_component(const Mat& x, long long w) const {
        auto it = adh_proj_.find(w);
        if (it == adh_proj_.end()) return Mat::zero(n_, n_);
        return unflatten(it->second * flatten(x), n_, n_);
    }
    const std::vector<long long>& adh_weights() const { return adh_weights_; }

    /// Projection of a Hom(sl2,.) value onto the (r, eps) isotypical slot.
    HomSl2 project_sl2(const HomSl2& a, long long r, int eps) const {
        auto it = sl2_proj_.find({r, eps});
        if (it == sl2_proj_.end()) return HomSl2::zero(n_);
        return HomSl2::unflat(it->second * a.flat(), n_);
    }

    /// Projection of a Hom(U,.) value onto the R-eigenspace of eigenvalue l.
    HomU project_u(const HomU& b, long long l) const {
        auto it = u_proj_.find(l);
        if (it == u_proj_.end()) return HomU::zero(n_);
        return HomU::unflat(it->second * b.flat(), n_);
    }

    const std::vector<std::pair<long long, int>>& sl2_slots() const { return sl2_slots_; }
    const std::vector<long long>& isotypic_rs() const { return rs_; }

    /// The operator R = Q(Phi_0, .) on Hom(U, gl) as an exact matrix.
    const Mat& r_matrix() const { return rmat_; }
    const std::vector<long long>& r_eigenvalues() const { return r_eigs_; }

  private:
    void build_sl2_side() {
        size_t d = 3 * n_ * n_;
        for (const auto& [r, s] : iso_.components) rs_.push_back(r);
        // one-sided and diagonal Casimir matrices
        auto lmat = [&](const Mat& x) {
            Mat adx = ad_matrix(x);
            Mat out(d, d);
            size_t nn = n_ * n_;
            for (int blk = 0; blk < 3; ++blk)
                for (size_t i = 0; i < nn; ++i)
                    for (size_t j = 0; j < nn; ++j) out(blk * nn + i, blk * nn + j) = adx(i, j);
            return out;
        };
        Mat lp = lmat(xz_.xplus), lz = lmat(xz_.z), lm = lmat(xz_.xminus);
        Mat lomega = casimir_matrix(lp, lz, lm);
        // diagonal: d(x) A = [phi0(x), A(.)] - A(x . .)
        auto rho = [&](int which) {
            // matrix of A -> A(x_which . -) on the (x+, z, x-) slots
            Mat out(d, d);
            size_t nn = n_ * n_;
            auto add_block = [&](int row_blk, int col_blk, const GQ& c) {
                if (c.is_zero()) return;
                for (size_t i = 0; i < nn; ++i) out(row_blk * nn + i, col_blk * nn + i) += c;
            };
            // (A o x.)(u_row) = A(x . u_row) = sum_b coeff_b(x . u_row) A(u_b):
            // row = result slot u, col = source slot b, entry = that coeff.
            if (which == 0) {
                add_block(1, 0, GQ(-2));  // x+.z = -2 x+
                add_block(2, 1, GQ(1));   // x+.x- = z
            } else if (which == 1) {
                add_block(0, 0, GQ(2));   // z.x+ = 2 x+
                add_block(2, 2, GQ(-2));  // z.x- = -2 x-
            } else {
                add_block(0, 1, GQ(-1));  // x-.x+ = -z
                add_block(1, 2, GQ(2));   // x-.z = 2 x-
            }
            return out;
        };
        Mat dp = lp - rho(0), dz = lz - rho(1), dm = lm - rho(2);
        Mat domega = casimir_matrix(dp, dz, dm);

        // spectra: the one-sided Casimir sees exactly the occurring
        // isotypic weights; the diagonal one sees r + 2 eps for those r
        std::vector<long long> lo_eigs, do_eigs;
        for (long long r : rs_) lo_eigs.push_back(r * (r + 2));
        for (long long r : rs_)
            for (int eps = -1; eps <= 1; ++eps)
                if (r + 2 * eps >= 0) do_eigs.push_back((r + 2 * eps) * (r + 2 * eps + 2));
        std::sort(do_eigs.begin(), do_eigs.end());
        do_eigs.erase(std::unique(do_eigs.begin(), do_eigs.end()), do_eigs.end());
        for (long long r : rs_) {
            for (int eps = -1; eps <= 1; ++eps) {
                if (r + 2 * eps < 0) continue;
                Mat p = eigen_projection(lomega, lo_eigs, r * (r + 2)) *
                        eigen_projection(domega, do_eigs, (r + 2 * eps) * (r + 2 * eps + 2));
                sl2_proj_[{r, eps}] = p;
                sl2_slots_.push_back({r, eps});
            }
        }
    }

    void build_u_side() {
        size_t d = 2 * n_ * n_;
        rmat_ = Mat(d, d);
        for (size_t col = 0; col < d; ++col) {
            Vec e(d);
            e[col] = GQ(1);
            HomU b = HomU::unflat(e, n_);
            Vec img = casimir_pairing(phi0_, b).flat();
            for (size_t i = 0; i < d; ++i) rmat_(i, col) = img[i];
        }
        for (long long r : rs_) {
            r_eigs_.push_back(r + 2);
            r_eigs_.push_back(-r);
        }
        std::sort(r_eigs_.begin(), r_eigs_.end());
        r_eigs_.erase(std::unique(r_eigs_.begin(), r_eigs_.end()), r_eigs_.end());
        for (long long l : r_eigs_) u_proj_[l] = eigen_projection(rmat_, r_eigs_, l);

        // ad H spectral projectors for component extraction
        std::vector<long long> eigs = adh_eigs_;
        for (long long w : eigs) {
            Mat p = eigen_projection(adh_, eigs, w);
            if (!p.is_zero()) {
                adh_proj_[w] = p;
                adh_weights_.push_back(w);
            }
        }
    }

    Sl2Triple triple_;
    size_t n_;
    XzBasis xz_;
    HomSl2 phi0_;
    IsotypicalDecomposition iso_;
    Mat adh_;
    std::vector<long long> adh_eigs_;
    std::vector<long long> adh_weights_;
    std::map<long long, Mat> adh_proj_;
    std::vector<long long> rs_;
    std::map<std::pair<long long, int>, Mat> sl2_proj_;
    std::vector<std::pair<long long, int>> sl2_slots_;
    Mat rmat_;
    std::vector<long long> r_eigs_;
    std::map<long long, Mat> u_proj_;
};

// ---------------------------------------------------------------------------
// The two recursions.

/// Coefficients Phi_0..Phi_{n_max} of the unique series with
/// (1 + n/2) Phi_n - 2 Qo(Phi_0, Phi_n) = sum_{0<k<n} Qo(Phi_k, Phi_{n-k}),
/// Phi_n^{n,-1} = T_n and Phi_n^{n,0} = Phi_n^{n,1} = 0.
inline std::vector<HomSl2> phi_recursion(const SeriesContext& ctx, const FreeParameters& params,
                                         long long n_max) {
    size_t n = ctx.dim();
    GQ eighth(Rational(1, 8));
    // residue identity Qo(Phi0, Phi0) = Phi0 certifies the embedding
    if (!(eighth * casimir_pairing(ctx.phi0(), ctx.phi0()) == ctx.phi0()))
        throw std::invalid_argument("phi_recursion: Phi_0 is not an sl2 embedding (residue identity fails)");

    std::vector<HomSl2> phi(n_max + 1, HomSl2::zero(n));
    phi[0] = ctx.phi0();
    if (ctx.phi0().is_zero()) {
        for (const auto& [nn, t] : params.t)
            if (!t.is_zero()) throw std::invalid_argument("phi_recursion: T parameters require Phi_0 != 0");
        return phi;
    }
    for (long long m = 1; m <= n_max; ++m) {
        HomSl2 rhs = HomSl2::zero(n);
        for (long long k = 1; k < m; ++k)
            rhs = rhs + eighth * casimir_pairing(phi[k], phi[m - k]);
        // compatibility: the free (m, -1) slot of the right side must vanish
        if (!ctx.project_sl2(rhs, m, -1).is_zero())
            throw std::domain_error("phi_recursion: compatibility condition fails at order " + std::to_string(m));
        HomSl2 sol = HomSl2::zero(n);
        for (const auto& [r, eps] : ctx.sl2_slots()) {
            if (r > m || ((r - m) % 2) != 0) continue;
            long long divisor = m + eps * eps + eps * (r + 1);
            if (r == m && eps == -1) continue;  // free slot
            if (divisor == 0) continue;
            HomSl2 comp = ctx.project_sl2(rhs, r, eps);
            sol = sol + GQ(Rational(2, divisor)) * comp;
        }
        auto it = params.t.find(m);
        if (it != params.t.end()) {
            if (!(ctx.project_sl2(it->second, m, -1) == it->second))
                throw std::invalid_argument("phi_recursion: T_" + std::to_string(m) +
                                            " is not in the highest-weight slot");
            sol = sol + it->second;
        }
        // (1 + m/2) Phi_m - 2 Qo(Phi_0, Phi_m) = RHS, checked exactly
        HomSl2 lhs = GQ(Rational(2 + m, 2)) * sol -
                     GQ(Rational(1, 4)) * casimir_pairing(ctx.phi0(), sol);
        if (!(lhs == rhs)) throw std::logic_error("phi_recursion: order-" + std::to_string(m) + " solve failed");
        phi[m] = sol;
    }
    if (!phi[1].is_zero()) throw std::logic_error("phi_recursion: Phi_1 != 0");
    return phi;
}

/// Coefficients Psi_0..Psi_{n_max} of the unique series with
/// (n+2) Psi_n = sum_j Q(Phi_j, Psi_{n-j}), Psi_{n,n}^- = S_n,
/// Psi_{n,n}^+ = 0.
inline std::vector<HomU> psi_recursion(const SeriesContext& ctx, const std::vector<HomSl2>& phi,
                                       const FreeParameters& params, long long n_max) {
    size_t n = ctx.dim();
    std::vector<HomU> psi(n_max + 1, HomU::zero(n));
    for (long long m = 1; m <= n_max; ++m) {
        HomU rhs = HomU::zero(n);
        for (long long j = 1; j < m; ++j) rhs = rhs + casimir_pairing(phi[j], psi[m - j]);
        // compatibility at the free slot (eigenvalue m + 2)
        if (!ctx.project_u(rhs, m + 2).is_zero())
            throw std::domain_error("psi_recursion: compatibility condition fails at order " + std::to_string(m));
        HomU sol = HomU::zero(n);
        for (long long r : ctx.isotypic_rs()) {
            if (r > m || ((r - m) % 2) != 0) continue;
            // "-" part: eigenvalue r + 2, solve (m - r) Psi = [rhs]
            if (r != m) {
                HomU cm = ctx.project_u(rhs, r + 2);
                if (!cm.is_zero()) sol = sol + GQ(Rational(1, m - r)) * cm;
            }
            // "+" part: eigenvalue -r, solve (m + r + 2) Psi = [rhs]
            HomU cp = ctx.project_u(rhs, -r);
            if (!cp.is_zero()) sol = sol + GQ(Rational(1, m + r + 2)) * cp;
        }
        auto it = params.s.find(m);
        if (it != params.s.end()) {
            if (!(ctx.project_u(it->second, m + 2) == it->second))
                throw std::invalid_argument("psi_recursion: S_" + std::to_string(m) +
                                            " is not in the highest-weight slot");
            sol = sol + it->second;
        }
        // (m+2) Psi_m - Q(Phi_0, Psi_m) = RHS, checked exactly
        HomU lhs = GQ(m + 2) * sol - casimir_pairing(ctx.phi0(), sol);
        if (!(lhs == rhs)) throw std::logic_error("psi_recursion: order-" + std::to_string(m) + " solve failed");
        psi[m] = sol;
    }
    if (!psi[0].is_zero()) throw std::logic_error("psi_recursion: Psi_0 != 0");
    return psi;
}

// ---------------------------------------------------------------------------
// Assembly.

enum class OrbitType { I, II };

/// Series for a chosen value map: coefficients value(Phi_n) at y^{-1-n/2}.
template <class Coeffs, class ValueFn>
HalfPowerSeries hom_series(const Coeffs& coeffs, ValueFn value, size_t n, int trunc) {
    HalfPowerSeries s(n, trunc);
    for (size_t m = 0; m < coeffs.size(); ++m) s.add_term(2 + static_cast<int>(m), value(coeffs[m]));
    return s;
}

/// beta = Phi(n0) + Psi(f)  (+ N_{-2} + the integrated (-1,-1) correction
/// for type II).
inline HalfPowerSeries beta_assemble(const SeriesContext& ctx, const std::vector<HomSl2>& phi,
                                     const std::vector<HomU>& psi, OrbitType type, const Mat& n_minus2) {
    size_t n = ctx.dim();
    int trunc = 2 + static_cast<int>(phi.size()) - 1;
    HalfPowerSeries beta = hom_series(phi, [](const HomSl2& a) { return a.on_n0(); }, n, trunc) +
                           hom_series(psi, [](const HomU& b) { return b.f; }, n, trunc);
    if (type == OrbitType::II) {
        beta = beta + HalfPowerSeries::monomial(n_minus2, 0, trunc);
        // beta^{-1,-1} correction: 2i Int [beta^{0,-1}, beta^{-1,0}] dy with
        // beta^{0,-1} = Psi(nu+)/(2i), beta^{-1,0} = -Psi(nu-)/(2i)
        GQ inv2i = GQ(1) / GQ(Rational(0), Rational(2));
        HalfPowerSeries b01 = inv2i * hom_series(psi, [](const HomU& b) { return b.on_nu_plus(); }, n, trunc);
        HalfPowerSeries b10 =
            -GQ(1) * inv2i * hom_series(psi, [](const HomU& b) { return b.on_nu_minus(); }, n, trunc);
        HalfPowerSeries corr = GQ(Rational(0), Rational(2)) * commutator(b01, b10).antiderivative();
        beta = beta + corr;
    } else if (!n_minus2.is_zero()) {
        throw std::invalid_argument("beta_assemble: type I with nonzero N_{-2}");
    }
    return beta;
}

/// The flow operator at the base point: +i on n_plus, 0 on n_zero, -i on
/// n_minus (+) lambda.
struct FlowOperator {
    Mat op;  // on flattened gl

    static FlowOperator at(const GlBigrading& gl) {
        size_t nn = gl.n * gl.n;
        Mat b(nn, nn);
        std::vector<GQ> eig(nn);
        size_t col = 0;
        for (const auto& [rs, s] : gl.pieces)
            for (size_t j = 0; j < s.dim(); ++j, ++col) {
                for (size_t i = 0; i < nn; ++i) b(i, col) = s.basis()(j, i);
                auto [r, ss] = rs;
                if (r >= 0 && ss < 0)
                    eig[col] = GQ::i();
                else if (r == 0 && ss == 0)
                    eig[col] = GQ(0);
                else if (r > 0 && ss >= 0)
                    eig[col] = GQ(0);  // outside the Lie algebra of the group; unused
                else
                    eig[col] = -GQ::i();
            }
        Mat diag(nn, nn);
        for (size_t j = 0; j < nn; ++j) diag(j, j) = eig[j];
        FlowOperator f;
        f.op = b * diag * *inverse(b);
        return f;
    }

    Mat apply(const Mat& x) const { return unflatten(op * flatten(x), x.rows(), x.cols()); }
    HalfPowerSeries apply(const HalfPowerSeries& s) const { return s.map_coefficients(op); }
};

/// Lax residual d beta/dy + [beta, L beta]; identically zero up to the
/// reliable truncation for every assembled flow.
inline HalfPowerSeries lax_residual(const HalfPowerSeries& beta, const FlowOperator& flow) {
    HalfPowerSeries d = beta.derivative();
    HalfPowerSeries br = commutator(beta, flow.apply(beta));
    return (d + br).truncate(std::min(d.trunc(), br.trunc()));
}

struct NahmResidual {
    HalfPowerSeries xp_eq, z_eq, xm_eq;
    bool all_zero() const { return xp_eq.is_zero() && z_eq.is_zero() && xm_eq.is_zero(); }
};

/// The triple system: -2 X+' = [Z, X+], 2 X-' = [Z, X-], -Z' = [X+, X-]
/// for X+ = 2i beta^{1,-1}, Z = 2i beta^{0,0}, X- = -2i beta^{-1,1}.
inline NahmResidual nahm_residual(const SeriesContext& ctx, const std::vector<HomSl2>& phi, int trunc) {
    size_t n = ctx.dim();
    HalfPowerSeries xp = hom_series(phi, [](const HomSl2& a) { return a.xp; }, n, trunc);
    HalfPowerSeries z = hom_series(phi, [](const HomSl2& a) { return a.z; }, n, trunc);
    HalfPowerSeries xm = hom_series(phi, [](const HomSl2& a) { return a.xm; }, n, trunc);
    NahmResidual r;
    auto clamp = [&](HalfPowerSeries s, const HalfPowerSeries& a, const HalfPowerSeries& b) {
        return s.truncate(std::min(a.trunc(), b.trunc()));
    };
    HalfPowerSeries e1 = GQ(-2) * xp.derivative() - commutator(z, xp);
    r.xp_eq = clamp(e1, xp.derivative(), commutator(z, xp));
    HalfPowerSeries e2 = GQ(2) * xm.derivative() - commutator(z, xm);
    r.z_eq = clamp(GQ(-1) * z.derivative() - commutator(xp, xm), z.derivative(), commutator(xp, xm));
    r.xm_eq = clamp(e2, xm.derivative(), commutator(z, xm));
    return r;
}

// ---------------------------------------------------------------------------
// Frame integration: g(y) with h(y) = g(y) y^{-H/2} (type I) or
// h(y) = g(y) e^{iy N_{-2}} y^{-H/2} (type II).

struct FrameSeries {
    std::map<int, Mat> b;              // m -> B_m, m >= 2: g^{-1} g' = sum B_m y^{-m}
    std::vector<Mat> g;                // g_0 = 1, g_1, ..., g_kmax
    std::vector<Mat> f;                // coefficients of g^{-1}
    int kmax = 0;

    /// g(y) evaluated exactly at rational y (finite polynomial in 1/y up to
    /// the truncation).
    Mat eval_g(const Rational& y) const {
        Mat acc = Mat::zero(g[0].rows(), g[0].cols());
        Rational p(1);
        for (int k = 0; k <= kmax; ++k) {
            acc += GQ(p) * g[k];
            p /= y;
        }
        return acc;
    }
};

/// Integrates g^{-1} dg/dy = Ad(y^{-H/2})( -1/2 (Phi(h) - H/y) - Psi(e) )
/// (- 2 Int [beta^{0,-1}, beta^{-1,0}] dy for type II).  The series must
/// come out in integer powers starting at y^{-2}; anything else signals
/// inconsistent inputs.
inline FrameSeries integrate_frame(const SeriesContext& ctx, const std::vector<HomSl2>& phi,
                                   const std::vector<HomU>& psi, OrbitType type) {
    size_t n = ctx.dim();
    int trunc = 2 + static_cast<int>(phi.size()) - 1;
    HalfPowerSeries inner(n, trunc);
    for (size_t m = 1; m < phi.size(); ++m)
        inner.add_term(2 + static_cast<int>(m), GQ(Rational(-1, 2)) * phi[m].on_h());
    for (size_t m = 1; m < psi.size(); ++m) inner.add_term(2 + static_cast<int>(m), -GQ(1) * psi[m].e);

    // Ad(y^{-H/2}): the ad-H weight-w component shifts by w half-powers
    HalfPowerSeries shifted(n, trunc);
    for (const auto& [m, c] : inner.coeffs())
        for (long long w : ctx.adh_weights()) {
            Mat comp = ctx.adh_component(c, w);
            if (!comp.is_zero()) shifted.add_term(m + static_cast<int>(w), comp);
        }
    // untracked tail terms shift down by at most the top ad-H weight
    long long wmax = ctx.adh_weights().empty() ? 0 : ctx.adh_weights().back();
    shifted.truncate(trunc - std::abs(static_cast<int>(wmax)));

    if (type == OrbitType::II) {
        GQ inv2i = GQ(1) / GQ(Rational(0), Rational(2));
        HalfPowerSeries b01 = inv2i * hom_series(psi, [](const HomU& b) { return b.on_nu_plus(); }, n, trunc);
        HalfPowerSeries b10 =
            -GQ(1) * inv2i * hom_series(psi, [](const HomU& b) { return b.on_nu_minus(); }, n, trunc);
        shifted = shifted - GQ(2) * commutator(b01, b10).antiderivative();
    }

    FrameSeries out;
    for (const auto& [m, c] : shifted.coeffs()) {
        if (m % 2 != 0)
            throw std::domain_error("integrate_frame: non-integer power y^{-" + std::to_string(m) + "/2} in g^{-1} g'");
        if (m == 2) throw std::domain_error("integrate_frame: nonzero y^{-1} term in g^{-1} g'");
        if (m < 2) throw std::domain_error("integrate_frame: nonnegative power in g^{-1} g'");
        out.b[m / 2] = c;
    }
    out.kmax = std::max(0, shifted.trunc() / 2 - 1);

    auto bm = [&](int m) {
        auto it = out.b.find(m);
        return it == out.b.end() ? Mat::zero(n, n) : it->second;
    };
    out.g.assign(out.kmax + 1, Mat::zero(n, n));
    out.f.assign(out.kmax + 1, Mat::zero(n, n));
    out.g[0] = Mat::identity(n);
    out.f[0] = Mat::identity(n);
    for (int k = 1; k <= out.kmax; ++k) {
        // -k g_k = B_{k+1} + sum_{j+m = k+1, j>=1, m>=2} g_j B_m
        Mat acc = bm(k + 1);
        for (int j = 1; j + 2 <= k + 1; ++j) acc += out.g[j] * bm(k + 1 - j);
        out.g[k] = GQ(Rational(-1, k)) * acc;
        // k f_k = B_{k+1} + sum_{m+j = k+1} B_m f_j
        Mat accf = bm(k + 1);
        for (int j = 1; j + 2 <= k + 1; ++j) accf += bm(k + 1 - j) * out.f[j];
        out.f[k] = GQ(Rational(1, k)) * accf;
    }
    // g . f = 1 through the computed window
    for (int k = 1; k <= out.kmax; ++k) {
        Mat conv = Mat::zero(n, n);
        for (int j = 0; j <= k; ++j) conv += out.g[j] * out.f[k - j];
        if (!conv.is_zero()) throw std::logic_error("integrate_frame: g * g^{-1} != 1 at order " + std::to_string(k));
    }
    return out;
}

/// C_{l+1} = ((-i)^l / l!) (ad N0)^l B_{l+1}; checks (ad N0)^k B_k = 0.
inline std::map<int, Mat> twisted_coefficients(const SeriesContext& ctx, const FrameSeries& frame) {
    std::map<int, Mat> c;
    const Mat& n0 = ctx.triple().n0;
    for (const auto& [m, bm] : frame.b) {
        Mat chk = bm;
        for (int j = 0; j < m; ++j) chk = bracket(n0, chk);
        if (!chk.is_zero())
            throw std::logic_error("twisted_coefficients: (ad N0)^k B_k != 0 at k = " + std::to_string(m));
    }
    for (int l = 1; l + 1 <= (frame.b.empty() ? 0 : frame.b.rbegin()->first); ++l) {
        auto it = frame.b.find(l + 1);
        Mat b = it == frame.b.end() ? Mat::zero(ctx.dim(), ctx.dim()) : it->second;
        Mat acc = b;
        Rational fact(1);
        for (int j = 1; j <= l; ++j) {
            acc = bracket(n0, acc);
            fact *= Rational(j);
        }
        GQ phase = i_power(-l);  // (-i)^l
        c[l + 1] = phase * GQ(Rational(1) / fact) * acc;
    }
    return c;
}

/// Coefficients of (1-x)^r (1+x)^s.
inline std::vector<Rational> binomial_difference_coeffs(int r, int s) {
    std::vector<Rational> poly = {Rational(1)};
    auto mul = [&](Rational c0, Rational c1) {
        std::vector<Rational> out(poly.size() + 1, Rational(0));
        for (size_t i = 0; i < poly.size(); ++i) {
            out[i] += poly[i] * c0;
            out[i + 1] += poly[i] * c1;
        }
        poly = std::move(out);
    };
    for (int j = 0; j < r; ++j) mul(Rational(1), Rational(-1));
    for (int j = 0; j < s; ++j) mul(Rational(1), Rational(1));
    return poly;
}

}  // namespace lmhs
