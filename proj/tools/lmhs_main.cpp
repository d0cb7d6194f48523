// Command-line driver: file-based ingestion of variation data, command
// dispatch, and report/CSV emission.
//
// Exit codes: 0 success, 1 invalid input, 2 unsupported scope, 3 internal
// invariant failure.

#include <CLI11.hpp>
#include <json.hpp>

#include "lmhs/curvature.hpp"
#include "lmhs/heights.hpp"
#include "lmhs/orbit.hpp"
#include "lmhs/problem_file.hpp"

#include <fstream>
#include <iostream>

using namespace lmhs;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitInternal = 3;

std::string mat_to_text(const Mat& m) {
    std::ostringstream os;
    for (size_t i = 0; i < m.rows(); ++i) {
        os << "  [";
        for (size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << to_string(m(i, j));
        os << "]\n";
    }
    return os.str();
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json subspace_to_json(const Subspace& s) {
    json vecs = json::array();
    for (const auto& v : s.basis_vectors()) {
        json row = json::array();
        for (const auto& x : v) row.push_back(to_string(x));
        vecs.push_back(row);
    }
    return vecs;
}

std::vector<Rational> parse_exponents(const std::string& raw) {
    std::vector<Rational> out;
    std::string cur;
    for (char c : raw + ",") {
        if (c == ',') {
            if (!cur.empty()) {
                GQ z = parse_gq(cur);
                if (!z.is_real()) throw std::invalid_argument("exponents must be rational");
                out.push_back(z.re);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    return out;
}

HeightProblem height_problem_of(const ProblemFile& pf) {
    if (!pf.height_one || !pf.height_one_prime)
        throw std::invalid_argument("problem file has no [height] block");
    HeightProblem p(pf.data.W, MonodromyCone(pf.data.nilpotents), *pf.height_one, *pf.height_one_prime);
    // the two-parameter closed form applies to the rank-4 pair of
    // generators mixing the middle layer
    p.closed_form_tag = (pf.data.dim == 4 && pf.data.nilpotents.size() == 2);
    return p;
}

int cmd_validate(const std::string& path, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    ValidationReport vr = validate(pf.data);
    bool valid = vr.structurally_valid();

    AdmissibilityReport ar;
    bool has_n = !pf.data.nilpotents.empty();
    if (has_n && valid) {
        ar = check_admissible_orbit(pf.data);
        valid = valid && ar.admissible();
    } else if (!has_n) {
        valid = valid && vr.fiber_mhs;
    }
    if (pf.declared_type) {
        const char* found = to_string(vr.shape);
        if (*pf.declared_type != found) {
            vr.errors.push_back("declared type " + *pf.declared_type + " but the Hodge numbers say " + found);
            valid = false;
        }
    }

    if (as_json) {
        json j;
        j["valid"] = valid;
        j["shape"] = to_string(vr.shape);
        j["fiber_mhs"] = vr.fiber_mhs;
        j["structural"] = vr.structurally_valid();
        if (has_n) j["admissible"] = ar.admissible();
        j["errors"] = vr.errors;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << vr.to_text();
        if (has_n) std::cout << ar.to_text();
        std::cout << "verdict: " << (valid ? "valid" : "INVALID") << "\n";
    }
    return valid ? 0 : kExitInvalid;
}

int cmd_bigrade(const std::string& path, bool limiting, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    IncreasingFiltration w = pf.data.W;
    if (limiting) {
        auto rel = relative_weight_filtration(pf.data.combined_nilpotent(), pf.data.W);
        if (!rel) {
            std::cerr << "no relative weight filtration exists\n";
            return kExitInvalid;
        }
        w = *rel;
    }
    auto bg = try_deligne_bigrading(pf.data.F, w);
    if (!bg) {
        std::cerr << "the pair is not a mixed Hodge structure"
                  << (limiting ? "" : " (try --limiting for orbit data)") << "\n";
        return kExitInvalid;
    }
    if (as_json) {
        json j;
        for (const auto& [pq, s] : bg->pieces)
            j["I(" + std::to_string(pq.first) + "," + std::to_string(pq.second) + ")"] = subspace_to_json(s);
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& [pq, s] : bg->pieces)
            std::cout << "I^{" << pq.first << "," << pq.second << "} = " << s.to_string() << "\n";
        std::cout << "split over R: " << (bigrading_split_over_r(*bg) ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_split(const std::string& path, bool limiting, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    IncreasingFiltration w = pf.data.W;
    if (limiting) {
        auto rel = relative_weight_filtration(pf.data.combined_nilpotent(), pf.data.W);
        if (!rel) {
            std::cerr << "no relative weight filtration exists\n";
            return kExitInvalid;
        }
        w = *rel;
    }
    auto split = delta_splitting(pf.data.F, w);
    if (as_json) {
        json j;
        j["delta"] = mat_to_json(split.delta);
        for (const auto& [p, s] : split.f_hat.raw_steps())
            j["F_hat(" + std::to_string(p) + ")"] = subspace_to_json(s);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "delta =\n" << mat_to_text(split.delta);
        for (const auto& [p, s] : split.f_hat.raw_steps())
            std::cout << "F_hat^{" << p << "} = " << s.to_string() << "\n";
    }
    return 0;
}

int cmd_sl2(const std::string& path, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    OrbitExpansion ox = split_orbit(pf.data);
    if (as_json) {
        json j;
        j["rel_y"] = mat_to_json(ox.sl2.rel_y.matrix);
        j["y"] = mat_to_json(ox.sl2.y.matrix);
        j["n0"] = mat_to_json(ox.sl2.triple.n0);
        j["h"] = mat_to_json(ox.sl2.triple.h);
        j["n0_plus"] = mat_to_json(ox.sl2.triple.n0p);
        j["n_minus2"] = mat_to_json(ox.sl2.n_minus2);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "relY =\n" << mat_to_text(ox.sl2.rel_y.matrix);
        std::cout << "Y =\n" << mat_to_text(ox.sl2.y.matrix);
        std::cout << "N0 =\n" << mat_to_text(ox.sl2.triple.n0);
        std::cout << "H =\n" << mat_to_text(ox.sl2.triple.h);
        std::cout << "N0+ =\n" << mat_to_text(ox.sl2.triple.n0p);
        std::cout << "N_{-2} =\n" << mat_to_text(ox.sl2.n_minus2);
    }
    return 0;
}

int cmd_orbit(const std::string& path, long long order, const std::vector<double>& samples, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    OrbitExpansion ox = expand_orbit(pf.data, order);
    auto shape = corollary43_shape(ox, {{0.0, 100.0}, {2.0, 400.0}});
    if (as_json) {
        json j;
        j["type"] = ox.type == OrbitType::I ? "I" : "II";
        j["order"] = order;
        j["delta"] = mat_to_json(ox.delta);
        j["zeta"] = mat_to_json(ox.zeta);
        j["eta"] = mat_to_json(ox.eta);
        j["n0"] = mat_to_json(ox.sl2.triple.n0);
        j["h"] = mat_to_json(ox.sl2.triple.h);
        j["n0_plus"] = mat_to_json(ox.sl2.triple.n0p);
        j["n_minus2"] = mat_to_json(ox.sl2.n_minus2);
        json gk = json::array(), fk = json::array();
        for (int k = 1; k <= std::min(ox.report_kmax, ox.frame.kmax); ++k) {
            gk.push_back(mat_to_json(ox.frame.g[k]));
            fk.push_back(mat_to_json(ox.frame.f[k]));
        }
        j["g"] = gk;
        j["f"] = fk;
        json beta = json::object();
        for (const auto& [m, c] : ox.beta.coeffs()) beta["y^(-" + std::to_string(m) + "/2)"] = mat_to_json(c);
        j["beta"] = beta;
        j["checks"] = {{"matching_identity", ox.report.matching_identity},
                       {"reconstructs_f", ox.report.reconstructs_f},
                       {"kernel_conditions", ox.report.kernel_conditions},
                       {"lax_residual_zero", ox.report.lax_residual_zero},
                       {"nahm_residual_zero", ox.report.nahm_residual_zero},
                       {"shape_ok", ox.report.shape_ok}};
        json res = json::array();
        for (auto [y, r] : ox.report.claim_a_residuals) res.push_back({{"y", y}, {"residual", r}});
        j["claim_a_residuals"] = res;
        json shp = json::array();
        for (const auto& sres : shape)
            shp.push_back({{"x", sres.x}, {"y", sres.y}, {"residual", sres.residual}});
        j["shape_residuals"] = shp;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "orbit type " << (ox.type == OrbitType::I ? "I" : "II") << ", order " << order << "\n";
        std::cout << "delta =\n" << mat_to_text(ox.delta);
        std::cout << "zeta =\n" << mat_to_text(ox.zeta);
        std::cout << "sl2 triple (N0, H, N0+):\n"
                  << mat_to_text(ox.sl2.triple.n0) << mat_to_text(ox.sl2.triple.h)
                  << mat_to_text(ox.sl2.triple.n0p);
        bool g_trivial = true;
        for (int k = 1; k <= std::min(ox.report_kmax, ox.frame.kmax); ++k) {
            if (!ox.frame.g[k].is_zero()) g_trivial = false;
            std::cout << "g_" << k << " =\n" << mat_to_text(ox.frame.g[k]);
            std::cout << "f_" << k << " =\n" << mat_to_text(ox.frame.f[k]);
        }
        if (g_trivial && ox.zeta.is_zero()) std::cout << "g(y) = 1\n";
        std::cout << "beta coefficients:\n";
        for (const auto& [m, c] : ox.beta.coeffs())
            std::cout << " y^{-" << m << "/2}:\n" << mat_to_text(c);
        std::cout << "checks: matching=" << ox.report.matching_identity
                  << " reconstruct=" << ox.report.reconstructs_f
                  << " kernels=" << ox.report.kernel_conditions << " lax=" << ox.report.lax_residual_zero
                  << " nahm=" << ox.report.nahm_residual_zero << " shape=" << ox.report.shape_ok << "\n";
        for (auto [y, r] : ox.report.claim_a_residuals)
            std::cout << "residual of the orbit identity at y = " << y << ": " << r << "\n";
        for (const auto& sres : shape)
            std::cout << "residual of the full-orbit shape at (x, y) = (" << sres.x << ", " << sres.y
                      << "): " << sres.residual << "\n";
    }
    // extra user-chosen heights: exact flags compared in the base metric
    if (!samples.empty()) {
        DMat gram = DMat::from(ox.metric_o.gram);
        DecreasingFiltration fc = ox.data.F.canonical();
        for (double yd : samples) {
            Rational y(static_cast<long long>(yd));
            double worst = 0;
            bool exact = true;
            for (const auto& [pp, ss] : fc.raw_steps()) {
                Subspace lhs = ox.lhs_flag(y).step(pp);
                Subspace rhs = ox.rhs_flag(y).step(pp);
                if (lhs.dim() == 0 || lhs.dim() == ox.data.dim) continue;
                if (lhs == rhs) continue;
                exact = false;
                worst = std::max(worst, projection_distance(dcolumns(lhs), dcolumns(rhs), gram));
            }
            std::cout << "residual at y = " << yd << ": " << (exact ? 0.0 : worst)
                      << (exact ? " (exact agreement)" : "") << "\n";
        }
    }
    return ox.report.all_ok() ? 0 : kExitInternal;
}

int cmd_norms(const std::string& path, const std::vector<long long>& samples, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    OrbitExpansion ox = expand_orbit(pf.data, 6);
    std::vector<Rational> ys;
    for (long long y : samples) ys.push_back(Rational(y));
    if (ys.empty()) ys = {Rational(4), Rational(100)};
    auto rep = verify_norm_estimates(ox, ys);
    if (as_json) {
        json j;
        j["split_exact"] = rep.split_exact;
        json entries = json::array();
        for (const auto& e : rep.entries)
            entries.push_back({{"h_weight", e.h_weight},
                               {"exact_power_law", e.exact_power_law},
                               {"bounded_flat", e.bounded_flat}});
        j["entries"] = entries;
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& e : rep.entries)
            std::cout << "H-weight " << e.h_weight << ": |v|^2 ~ y^" << e.h_weight
                      << (e.exact_power_law ? " (exact)" : " (FAILED)")
                      << (e.bounded_flat ? ", flat and bounded" : "") << "\n";
        std::cout << "all power laws exact: " << (rep.split_exact ? "yes" : "no") << "\n";
    }
    return rep.split_exact ? 0 : kExitInternal;
}

int cmd_curvature(const std::string& path, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    OrbitExpansion ox = split_orbit(pf.data);
    CurvatureContext ctx = CurvatureContext::make(pf.data, ox.bg_o);
    Mat dir;
    std::string dir_name;
    if (ox.type == OrbitType::I) {
        dir = GQ(Rational(1, 4)) * (GQ::i() * ox.sl2.triple.h + ox.sl2.triple.n0 + ox.sl2.triple.n0p);
        dir_name = "(iH + N0 + N0+)/4";
    } else {
        dir = ox.n;
        dir_name = "N";
    }
    Rational r = ctx.sectional(dir);
    if (as_json) {
        json j;
        j["direction"] = dir_name;
        j["sectional"] = to_string(r);
        j["sign"] = r < 0 ? -1 : (r > 0 ? 1 : 0);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "holomorphic sectional curvature along " << dir_name << " = " << r << "\n";
    }
    return 0;
}

int cmd_height(const std::string& path, const std::string& exponents_raw,
               const std::vector<double>& curve_samples, const std::string& csv_out, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    HeightProblem p = height_problem_of(pf);
    std::vector<Rational> a = parse_exponents(exponents_raw);
    for (const auto& x : a)
        if (x <= 0) throw std::invalid_argument("exponents must be positive");
    Rational mu = mu_curve(p, a);
    JumpReport rep = jump_detect(p);

    // single-fiber height when the file describes an actual mixed Hodge
    // structure (norm convention: the mixed Hodge metric of gl(V) at F)
    std::optional<HeightValue> fiber;
    if (try_deligne_bigrading(pf.data.F, pf.data.W)) fiber = height_of_mhs(pf.data);

    if (as_json) {
        json j;
        j["mu"] = to_string(mu);
        j["jumps"] = rep.jumps;
        j["simultaneous_grading"] = rep.simultaneous_grading;
        j["linear_on_samples"] = rep.linear_on_samples;
        if (fiber) {
            j["fiber_height_norm2_delta"] = to_string(fiber->norm2_delta);
            j["fiber_height"] = fiber->height;
            j["fiber_height_norm_convention"] = "mixed Hodge metric of gl(V) at F";
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "mu = " << mu << "\n";
        std::cout << rep.to_text();
        if (fiber)
            std::cout << "fiber height: squared value 4 pi^2 * " << fiber->norm2_delta << " = ("
                      << fiber->height << ")^2  [norm in the mixed Hodge metric of gl(V) at F]\n";
    }

    if (!csv_out.empty()) {
        std::vector<double> ts = curve_samples;
        if (ts.empty()) ts = {1e-1, 1e-2, 1e-3, 1e-4};
        auto rows = asymptote_table(p, a, ts);
        std::ofstream out(csv_out);
        out << "abs_s,asymptote" << (rows.front().has_closed_form ? ",closed_form" : "") << "\n";
        for (const auto& r : rows) {
            out << r.s_abs << "," << r.asymptote;
            if (r.has_closed_form) out << "," << r.closed_form;
            out << "\n";
        }
        std::cout << "wrote " << rows.size() << " rows to " << csv_out << "\n";
    }
    return 0;
}

int cmd_grading_limit(const std::string& path, double tolerance, bool as_json) {
    ProblemFile pf = parse_problem_file(path);
    OrbitExpansion ox = expand_orbit(pf.data, 6);
    auto lim = limiting_grading(ox);
    bool converged = lim.float_discrepancy <= tolerance;
    if (as_json) {
        json j;
        j["y_infinity"] = mat_to_json(lim.y_infinity);
        j["float_discrepancy"] = lim.float_discrepancy;
        j["within_tolerance"] = converged;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "Y_infinity =\n" << mat_to_text(lim.y_infinity);
        std::cout << "float cross-check at y = 10^4: max entry discrepancy " << lim.float_discrepancy
                  << (converged ? " (within tolerance)" : " (first-order tail; see --tolerance)") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lmhs: exact asymptotics of degenerating mixed Hodge structures"};
    app.require_subcommand(1);

    std::string path, exponents = "1,1", csv_out;
    long long order = 8;
    std::vector<double> samples;
    std::vector<long long> int_samples;
    std::vector<double> curve_samples;
    bool as_json = false, limiting = false;
    double tolerance = 1e-6;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", path, "problem file")->required();
        sub->add_flag("--json", as_json, "emit JSON instead of text");
    };

    auto* v = app.add_subcommand("validate", "structural and admissibility checks");
    add_common(v);
    auto* bg = app.add_subcommand("bigrade", "print the canonical bigrading");
    add_common(bg);
    bg->add_flag("--limiting", limiting, "use the relative weight filtration");
    auto* sp = app.add_subcommand("split", "delta splitting of the (limiting) structure");
    add_common(sp);
    sp->add_flag("--limiting", limiting, "use the relative weight filtration");
    auto* s2 = app.add_subcommand("sl2", "gradings and the attached sl2 triple");
    add_common(s2);
    auto* ob = app.add_subcommand("orbit", "full orbit expansion with residual report");
    add_common(ob);
    ob->add_option("--order", order, "series truncation order (half-steps)");
    ob->add_option("--samples", samples, "height samples for residuals");
    auto* nm = app.add_subcommand("norms", "norm growth verification");
    add_common(nm);
    nm->add_option("--samples", int_samples, "integer height samples");
    auto* cv = app.add_subcommand("curvature", "holomorphic sectional curvature at the base point");
    add_common(cv);
    auto* ht = app.add_subcommand("height",
                                  "height slope, jump detection, CSV asymptotes; CSV columns: "
                                  "abs_s, asymptote (-mu log|s|), closed_form (two-parameter "
                                  "families only)");
    add_common(ht);
    ht->add_option("--exponents", exponents, "comma-separated positive exponents");
    ht->add_option("--curve-samples", curve_samples, "|s| samples in (0,1) for the CSV");
    ht->add_option("--csv", csv_out, "write the asymptote table to this file");
    auto* gl = app.add_subcommand("grading-limit", "limiting grading with float cross-check");
    add_common(gl);
    gl->add_option("--tolerance", tolerance, "float comparison tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (v->parsed()) return cmd_validate(path, as_json);
        if (bg->parsed()) return cmd_bigrade(path, limiting, as_json);
        if (sp->parsed()) return cmd_split(path, limiting, as_json);
        if (s2->parsed()) return cmd_sl2(path, as_json);
        if (ob->parsed()) return cmd_orbit(path, order, samples, as_json);
        if (nm->parsed()) return cmd_norms(path, int_samples, as_json);
        if (cv->parsed()) return cmd_curvature(path, as_json);
        if (ht->parsed()) return cmd_height(path, exponents, curve_samples, csv_out, as_json);
        if (gl->parsed()) return cmd_grading_limit(path, tolerance, as_json);
    } catch (const ProblemParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const std::logic_error& e) {
        std::cerr << "internal invariant failure: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}
