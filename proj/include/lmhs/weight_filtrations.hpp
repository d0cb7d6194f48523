#pragma once

// Monodromy weight filtrations of nilpotent endomorphisms, relative weight
// filtrations, and the monodromy cone.  Every returned filtration is
// re-verified against the defining axioms before it leaves this module;
// uniqueness of both filtrations makes that a complete correctness check.

#include "lmhs/eigenprojection.hpp"
#include "lmhs/filtration.hpp"

#include <optional>

namespace lmhs {

/// Projection/lift pair for V -> V/U with a canonical complement.
struct QuotientMap {
    Mat proj;  // (n-d) x n, kernel exactly U
    Mat lift;  // n x (n-d), section of proj

    static QuotientMap make(const Subspace& u) {
        size_t n = u.ambient_dim();
        std::vector<Vec> comp = Subspace::full(n).complement_in(u);
        size_t q = comp.size();
        Mat s(n, n);  // columns: complement vectors then U basis
        for (size_t j = 0; j < q; ++j)
            for (size_t i = 0; i < n; ++i) s(i, j) = comp[j][i];
        for (size_t j = 0; j < u.dim(); ++j)
            for (size_t i = 0; i < n; ++i) s(i, q + j) = u.basis()(j, i);
        Mat s_inv = *inverse(s);
        QuotientMap qm;
        qm.proj = Mat(q, n);
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < n; ++j) qm.proj(i, j) = s_inv(i, j);
        qm.lift = Mat(n, q);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < q; ++j) qm.lift(i, j) = s(i, j);
        return qm;
    }
};

/// Matrix of m restricted to the invariant subspace u, in the canonical
/// basis of u.  Throws if u is not m-invariant.
inline Mat restrict_to(const Mat& m, const Subspace& u) {
    size_t d = u.dim();
    Mat out(d, d);
    for (size_t j = 0; j < d; ++j) {
        Vec w = m * u.basis().row(j);
        auto c = u.coordinates(w);
        if (!c) throw std::invalid_argument("restrict_to: subspace not invariant");
        for (size_t i = 0; i < d; ++i) out(i, j) = (*c)[i];
    }
    return out;
}

/// The filtration induced by M on Gr^W_k = W_k/W_{k-1}, expressed in the
/// canonical quotient coordinates of qm (which must present W_k/W_{k-1}).
inline IncreasingFiltration induced_on_quotient(const IncreasingFiltration& m, const Subspace& wk,
                                                const QuotientMap& qm) {
    IncreasingFiltration out(qm.proj.rows());
    for (const auto& [l, s] : m.raw_steps()) out.set_step(l, intersect(s, wk).apply(qm.proj));
    return out.canonical();
}

// ---------------------------------------------------------------------------
// Monodromy weight filtration.

/// Checks the two defining axioms of the weight filtration of n centered at
/// c: n M_l <= M_{l-2} and n^l : Gr_{c+l} ~ Gr_{c-l}.
inline bool weight_filtration_axioms_hold(const Mat& n, const IncreasingFiltration& m, int c) {
    if (!m.well_formed()) return false;
    int lo = m.lowest_weight() - 2, hi = m.highest_weight() + 2;
    for (int l = lo; l <= hi; ++l)
        if (!m.step(l - 2).contains(m.step(l).apply(n))) return false;
    for (int l = 1; l <= hi - c; ++l) {
        Mat nl = pow(n, static_cast<unsigned>(l));
        if (!induced_bijective(nl, m.step(c + l), m.step(c + l - 1), m.step(c - l), m.step(c - l - 1)))
            return false;
    }
    return true;
}

/// The unique increasing filtration M with N M_l <= M_{l-2} and N^l
/// inducing isomorphisms Gr_{c+l} ~ Gr_{c-l}.  Built from the kernel/image
/// ladder M_l = sum_j ker N^{j+1} cap im N^{j-l} and post-verified.
inline IncreasingFiltration monodromy_weight_filtration(const Mat& n, int center) {
    if (!n.is_square()) throw std::invalid_argument("monodromy filtration of non-square matrix");
    if (!is_nilpotent(n)) throw std::domain_error("monodromy_weight_filtration: matrix is not nilpotent");
    size_t dim = n.rows();
    if (dim == 0) {
        IncreasingFiltration trivial(0);
        trivial.set_step(center, Subspace::full(0));
        return trivial;
    }

    // nilpotency index: smallest e with n^e = 0
    int e = 1;
    {
        Mat p = n;
        while (!p.is_zero()) {
            p = p * n;
            ++e;
        }
    }
    std::vector<Subspace> kernels(e + 1, Subspace::zero(dim));  // ker n^j
    std::vector<Subspace> images(e + 1, Subspace::full(dim));   // im n^j
    for (int j = 0; j <= e; ++j) {
        Mat pj = pow(n, static_cast<unsigned>(j));
        kernels[j] = Subspace::span(dim, kernel_basis(pj));
        images[j] = Subspace::full(dim).apply(pj);
    }

    IncreasingFiltration m(dim);
    for (int l = -e; l <= e - 1; ++l) {
        Subspace acc = Subspace::zero(dim);
        for (int j = std::max(0, l); j <= e - 1; ++j) {
            int ker_pow = std::min(j + 1, e);
            int im_pow = std::min(j - l, e);
            acc = acc + intersect(kernels[ker_pow], images[im_pow]);
        }
        m.set_step(l + center, acc);
    }
    m.set_step(e - 1 + center, Subspace::full(dim));
    m = m.canonical();

    if (!weight_filtration_axioms_hold(n, m, center))
        throw std::logic_error("monodromy_weight_filtration: constructed filtration fails its defining axioms");
    return m;
}

// ---------------------------------------------------------------------------
// Relative weight filtration.

/// Checks both axioms of relW(N, W): N-compatibility, and that the induced
/// filtration on each Gr^W_k is the monodromy weight filtration of the
/// induced endomorphism centered at k.
inline bool relative_filtration_axioms_hold(const Mat& n, const IncreasingFiltration& w,
                                            const IncreasingFiltration& m) {
    if (!m.well_formed()) return false;
    int lo = m.lowest_weight() - 2, hi = m.highest_weight() + 2;
    for (int l = lo; l <= hi; ++l)
        if (!m.step(l - 2).contains(m.step(l).apply(n))) return false;

    for (int k : w.jumps()) {
        Subspace wk = w.step(k), wk1 = w.step(k - 1);
        std::vector<Vec> comp = wk.complement_in(wk1);
        if (comp.empty()) continue;
        // explicit Gr_k model: coordinates w.r.t. the complement vectors
        size_t dim = w.ambient_dim();
        size_t g = comp.size();
        Mat lift(dim, g);
        for (size_t j = 0; j < g; ++j)
            for (size_t i = 0; i < dim; ++i) lift(i, j) = comp[j][i];
        // projection W_k -> Gr_k: solve v = lift*c + w', w' in W_{k-1}
        Mat sys(dim, g + wk1.dim());
        for (size_t i = 0; i < dim; ++i) {
            for (size_t j = 0; j < g; ++j) sys(i, j) = lift(i, j);
            for (size_t j = 0; j < wk1.dim(); ++j) sys(i, g + j) = wk1.basis()(j, i);
        }
        auto cls = [&](const Vec& v) -> Vec {
            LinearSolution s = solve_linear(sys, v);
            if (!s.particular) throw std::logic_error("class: vector not in W_k");
            return Vec(s.particular->begin(), s.particular->begin() + g);
        };
        Mat n_gr(g, g);
        for (size_t j = 0; j < g; ++j) {
            Vec c = cls(n * comp[j]);
            for (size_t i = 0; i < g; ++i) n_gr(i, j) = c[i];
        }
        IncreasingFiltration m_gr(g);
        for (const auto& [l, s] : m.raw_steps()) {
            Subspace inter = intersect(s, wk);
            std::vector<Vec> imgs;
            for (const auto& bv : inter.basis_vectors()) imgs.push_back(cls(bv));
            m_gr.set_step(l, Subspace::span(g, imgs));
        }
        m_gr = m_gr.canonical();
        IncreasingFiltration expect = monodromy_weight_filtration(n_gr, k);
        if (m_gr != expect) return false;
    }
    return true;
}

/// relW(N, W) when it exists.  Inductive over the weight ladder: split off
/// the bottom weight U = W_a, recurse on V/U, then glue by choosing a lift
/// of the quotient filtration compatible with N.  The lift is found by one
/// exact linear solve, so nonexistence is detected, never guessed; the
/// result is post-verified against both axioms.
inline std::optional<IncreasingFiltration> relative_weight_filtration(const Mat& n,
                                                                      const IncreasingFiltration& w) {
    size_t dim = w.ambient_dim();
    if (!w.well_formed()) throw std::invalid_argument("relative_weight_filtration: malformed W");
    if (!w.preserved_by(n)) throw std::invalid_argument("relative_weight_filtration: N does not preserve W");
    if (!is_nilpotent(n)) throw std::domain_error("relative_weight_filtration: N not nilpotent");

    std::vector<int> jumps = w.jumps();
    if (jumps.size() == 1) {
        return monodromy_weight_filtration(n, jumps.front());
    }

    int a = jumps.front();
    Subspace u = w.step(a);

    Mat n_u = restrict_to(n, u);
    IncreasingFiltration m_bottom_u = monodromy_weight_filtration(n_u, a);
    // expressed inside V
    auto embed_u = [&](const Subspace& s) {
        std::vector<Vec> vs;
        for (const auto& c : s.basis_vectors()) {
            Vec v(dim);
            for (size_t j = 0; j < u.dim(); ++j) v = v + c[j] * u.basis().row(j);
            vs.push_back(v);
        }
        return Subspace::span(dim, vs);
    };
    IncreasingFiltration m_prime(dim);
    for (const auto& [l, s] : m_bottom_u.raw_steps()) m_prime.set_step(l, embed_u(s));
    m_prime = m_prime.canonical();

    QuotientMap qm = QuotientMap::make(u);
    size_t q = qm.proj.rows();
    Mat n_bar = qm.proj * n * qm.lift;
    IncreasingFiltration w_bar(q);
    for (int k : jumps)
        if (k != a) w_bar.set_step(k, w.step(k).apply(qm.proj));
    w_bar = w_bar.canonical();

    auto m_bar_opt = relative_weight_filtration(n_bar, w_bar);
    if (!m_bar_opt) return std::nullopt;
    const IncreasingFiltration& m_bar = *m_bar_opt;

    // Choose graded complements of the quotient filtration and solve for a
    // correction u_map : V/U -> U making sigma'(v) = lift(v) + u_map(v)
    // compatible with N:  N sigma'(v) - sigma'(Nbar v) in M'_{l-2}.
    struct GradedVec {
        int level;
        Vec v;  // in quotient coordinates
    };
    std::vector<GradedVec> graded;
    {
        Subspace prev = Subspace::zero(q);
        for (int l : m_bar.jumps()) {
            Subspace cur = m_bar.step(l);
            for (const auto& cv : cur.complement_in(prev)) graded.push_back({l, cv});
            prev = cur;
        }
    }

    size_t du = u.dim();
    size_t unknowns = q * du;  // u_map as du x q matrix, column-major over basis of quotient coords
    std::vector<Vec> constraint_rows;
    Vec constraint_rhs_all;
    std::vector<GQ> rhs_list;

    // annihilator functionals of M'_{l} inside U-coordinates
    auto ann_of = [&](int l) {
        Subspace s = m_bottom_u.step(l);
        Mat rows(s.dim(), du);
        for (size_t i = 0; i < s.dim(); ++i) rows.set_row(i, s.basis().row(i));
        return kernel_basis(rows);  // functionals on U-coordinates
    };

    // U-coordinates of a vector known to lie in U
    auto u_coords = [&](const Vec& v) {
        auto c = u.coordinates(v);
        if (!c) throw std::logic_error("relative_weight_filtration: defect not in U");
        return *c;
    };

    for (const auto& gv : graded) {
        // defect D(v) = N lift(v) - lift(Nbar v), which lies in U
        Vec lifted = qm.lift * gv.v;
        Vec nbar_v = n_bar * gv.v;
        Vec defect = (n * lifted) - (qm.lift * nbar_v);
        Vec d_u = u_coords(defect);

        // unknown contribution: N|U . u_map(v) - u_map(Nbar v), in U-coords
        // row for functional phi: phi(d_u) + sum_entries = 0
        for (const auto& phi : ann_of(gv.level - 2)) {
            Vec row(unknowns);
            // + phi( N_u * u_map(v) ):  u_map(v)_alpha = sum_beta u[alpha,beta] v_beta
            for (size_t alpha = 0; alpha < du; ++alpha) {
                // coefficient of u[alpha,beta]
                GQ phi_nu;  // phi(N_u e_alpha)
                for (size_t r = 0; r < du; ++r) phi_nu += phi[r] * n_u(r, alpha);
                for (size_t beta = 0; beta < q; ++beta) row[alpha * q + beta] += phi_nu * gv.v[beta];
            }
            // - phi( u_map(Nbar v) )
            for (size_t alpha = 0; alpha < du; ++alpha)
                for (size_t beta = 0; beta < q; ++beta) row[alpha * q + beta] -= phi[alpha] * nbar_v[beta];
            constraint_rows.push_back(std::move(row));
            GQ rhs;
            for (size_t r = 0; r < du; ++r) rhs += phi[r] * d_u[r];
            rhs_list.push_back(-rhs);
        }
    }

    Mat sys(constraint_rows.size(), unknowns);
    Vec rhs(constraint_rows.size());
    for (size_t i = 0; i < constraint_rows.size(); ++i) {
        sys.set_row(i, constraint_rows[i]);
        rhs[i] = rhs_list[i];
    }
    LinearSolution sol = solve_linear(sys, rhs);
    if (!sol.particular) return std::nullopt;

    Mat u_map(du, q);
    for (size_t alpha = 0; alpha < du; ++alpha)
        for (size_t beta = 0; beta < q; ++beta) u_map(alpha, beta) = (*sol.particular)[alpha * q + beta];
    // full lift V/U -> V
    Mat u_basis_cols(dim, du);
    for (size_t j = 0; j < du; ++j)
        for (size_t i = 0; i < dim; ++i) u_basis_cols(i, j) = u.basis()(j, i);
    Mat sigma = qm.lift + u_basis_cols * u_map;

    // assemble M_l = M'_l + sigma(Mbar_l)
    IncreasingFiltration m(dim);
    std::vector<int> levels;
    for (const auto& [l, s] : m_prime.raw_steps()) levels.push_back(l);
    for (const auto& [l, s] : m_bar.raw_steps()) levels.push_back(l);
    for (int l : levels) {
        Subspace part = m_prime.step(l) + m_bar.step(l).apply(sigma);
        m.set_step(l, part);
    }
    m = m.canonical();

    if (!relative_filtration_axioms_hold(n, w, m)) return std::nullopt;
    return m;
}

// ---------------------------------------------------------------------------
// Monodromy cone.

/// Commuting nilpotent generators; positivity of coefficients is the
/// caller's obligation when sampling.
class MonodromyCone {
  public:
    explicit MonodromyCone(std::vector<Mat> generators) : gens_(std::move(generators)) {
        for (const auto& g : gens_) {
            if (!is_nilpotent(g)) throw std::invalid_argument("monodromy cone generator is not nilpotent");
        }
        for (size_t i = 0; i < gens_.size(); ++i)
            for (size_t j = i + 1; j < gens_.size(); ++j)
                if (!bracket(gens_[i], gens_[j]).is_zero())
                    throw std::invalid_argument("monodromy cone generators do not commute");
    }

    size_t size() const { return gens_.size(); }
    const std::vector<Mat>& generators() const { return gens_; }

    Mat element(const std::vector<Rational>& coeff) const {
        if (coeff.size() != gens_.size()) throw std::invalid_argument("cone coefficient count mismatch");
        for (const auto& c : coeff)
            if (c <= 0) throw std::invalid_argument("cone coefficients must be positive");
        Mat out = Mat::zero(gens_.front().rows(), gens_.front().cols());
        for (size_t j = 0; j < gens_.size(); ++j) out += GQ(coeff[j]) * gens_[j];
        return out;
    }

  private:
    std::vector<Mat> gens_;
};

/// True iff the (unshifted) monodromy weight filtration is the same for all
/// sampled positive combinations.
inline bool cone_filtration_constancy(const MonodromyCone& cone,
                                      const std::vector<std::vector<Rational>>& samples) {
    std::optional<IncreasingFiltration> ref;
    for (const auto& lam : samples) {
        IncreasingFiltration m = monodromy_weight_filtration(cone.element(lam), 0);
        if (!ref)
            ref = m;
        else if (*ref != m)
            return false;
    }
    return true;
}

}  // namespace lmhs
