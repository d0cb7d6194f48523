#pragma once

// Human-editable problem files.  The format is line-based:
//
//   # comment
//   dim = 4
//   basis = e0 e f em2
//   type = II                    (optional: I, II)
//
//   [weights]
//   0: e0 e f em2                (weight k: spanning vectors of W_k)
//   -1: e f em2
//   -2: em2
//
//   [hodge]
//   0: e0 e                      (level p: spanning vectors of F^p)
//   -1: e0 e f em2
//
//   [polarization -1]            (matrix of Q_k on the canonical basis of Gr_k)
//   0 1
//   -1 0
//
//   [nilpotent N1]               (matrix rows)
//   0 0 0 0
//   ...
//
//   [height]                     (optional)
//   one: e0
//   one_prime: em2
//
// Vectors are either basis names or coordinate tuples like
// (1, 1/2+3/4*i, 0, 0); entries are Gaussian rational literals "a/b+c/d*i".
// Parse errors carry the line number and field.

#include "lmhs/mhs.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lmhs {

struct ProblemFile {
    MixedHodgeData data;
    std::optional<std::string> declared_type;
    std::vector<std::string> nilpotent_names;
    std::optional<Vec> height_one;
    std::optional<Vec> height_one_prime;
};

class ProblemParseError : public std::runtime_error {
  public:
    ProblemParseError(size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    size_t line() const { return line_; }

  private:
    size_t line_;
};

namespace detail {

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

inline ProblemFile parse_problem(std::istream& in) {
    ProblemFile pf;
    size_t dim = 0;
    std::vector<std::string> basis;
    std::map<int, std::vector<Vec>> weight_spans;
    std::map<int, std::vector<Vec>> hodge_spans;
    std::map<int, std::vector<Vec>> q_rows;
    std::vector<std::pair<std::string, std::vector<Vec>>> nilp_rows;
    std::optional<Vec> hone, honep;

    enum class Section { Top, Weights, Hodge, Polarization, Nilpotent, Height };
    Section section = Section::Top;
    int q_weight = 0;

    auto name_index = [&](const std::string& nm) -> std::optional<size_t> {
        for (size_t j = 0; j < basis.size(); ++j)
            if (basis[j] == nm) return j;
        return std::nullopt;
    };

    auto parse_vector_items = [&](const std::string& text, size_t lineno) {
        // items: names or ( ... ) tuples, whitespace/comma separated outside parens
        std::vector<Vec> out;
        size_t i = 0;
        while (i < text.size()) {
            if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',') {
                ++i;
                continue;
            }
            if (text[i] == '(' || text[i] == '[') {
                char close = (text[i] == '(') ? ')' : ']';
                size_t j = text.find(close, i);
                if (j == std::string::npos) throw ProblemParseError(lineno, "unterminated tuple");
                std::string inner = text.substr(i + 1, j - i - 1);
                Vec v;
                std::string cur;
                for (char c : inner + ",") {
                    if (c == ',') {
                        std::string t = detail::strip(cur);
                        if (!t.empty()) {
                            try {
                                v.push_back(parse_gq(t));
                            } catch (const std::exception& e) {
                                throw ProblemParseError(lineno, "bad entry '" + t + "': " + e.what());
                            }
                        }
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
                if (v.size() != dim) throw ProblemParseError(lineno, "tuple length != dim");
                out.push_back(std::move(v));
                i = j + 1;
            } else {
                size_t j = i;
                while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',') ++j;
                std::string nm = text.substr(i, j - i);
                auto idx = name_index(nm);
                if (!idx) throw ProblemParseError(lineno, "unknown basis name '" + nm + "'");
                out.push_back(unit_vector(dim, *idx));
                i = j;
            }
        }
        return out;
    };

    std::string raw;
    size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::strip(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ProblemParseError(lineno, "unterminated section header");
            std::string head = detail::strip(line.substr(1, line.size() - 2));
            auto toks = detail::split_ws(head);
            if (toks.empty()) throw ProblemParseError(lineno, "empty section header");
            if (toks[0] == "weights")
                section = Section::Weights;
            else if (toks[0] == "hodge")
                section = Section::Hodge;
            else if (toks[0] == "polarization") {
                if (toks.size() != 2) throw ProblemParseError(lineno, "polarization section needs a weight");
                section = Section::Polarization;
                try {
                    q_weight = std::stoi(toks[1]);
                } catch (...) {
                    throw ProblemParseError(lineno, "bad polarization weight '" + toks[1] + "'");
                }
                q_rows[q_weight];  // create
            } else if (toks[0] == "nilpotent") {
                section = Section::Nilpotent;
                nilp_rows.push_back({toks.size() > 1 ? toks[1] : "N" + std::to_string(nilp_rows.size() + 1), {}});
            } else if (toks[0] == "height")
                section = Section::Height;
            else
                throw ProblemParseError(lineno, "unknown section '" + toks[0] + "'");
            continue;
        }

        switch (section) {
            case Section::Top: {
                size_t eq = line.find('=');
                if (eq == std::string::npos) throw ProblemParseError(lineno, "expected key = value");
                std::string key = detail::strip(line.substr(0, eq));
                std::string val = detail::strip(line.substr(eq + 1));
                if (key == "dim") {
                    try {
                        dim = static_cast<size_t>(std::stoul(val));
                    } catch (...) {
                        throw ProblemParseError(lineno, "bad dim '" + val + "'");
                    }
                } else if (key == "basis") {
                    basis = detail::split_ws(val);
                    if (dim == 0) dim = basis.size();
                    if (basis.size() != dim) throw ProblemParseError(lineno, "basis size != dim");
                } else if (key == "type") {
                    if (val != "I" && val != "II") throw ProblemParseError(lineno, "type must be I or II");
                    pf.declared_type = val;
                } else {
                    throw ProblemParseError(lineno, "unknown key '" + key + "'");
                }
                break;
            }
            case Section::Weights:
            case Section::Hodge: {
                size_t colon = line.find(':');
                if (colon == std::string::npos) throw ProblemParseError(lineno, "expected '<level>: vectors'");
                int level;
                try {
                    level = std::stoi(detail::strip(line.substr(0, colon)));
                } catch (...) {
                    throw ProblemParseError(lineno, "bad level '" + line.substr(0, colon) + "'");
                }
                auto vecs = parse_vector_items(line.substr(colon + 1), lineno);
                if (section == Section::Weights)
                    weight_spans[level] = vecs;
                else
                    hodge_spans[level] = vecs;
                break;
            }
            case Section::Polarization: {
                Vec row;
                for (const auto& tok : detail::split_ws(line)) {
                    try {
                        row.push_back(parse_gq(tok));
                    } catch (const std::exception& e) {
                        throw ProblemParseError(lineno, "bad entry '" + tok + "': " + e.what());
                    }
                }
                q_rows[q_weight].push_back(row);
                break;
            }
            case Section::Nilpotent: {
                Vec row;
                for (const auto& tok : detail::split_ws(line)) {
                    try {
                        row.push_back(parse_gq(tok));
                    } catch (const std::exception& e) {
                        throw ProblemParseError(lineno, "bad entry '" + tok + "': " + e.what());
                    }
                }
                if (row.size() != dim) throw ProblemParseError(lineno, "matrix row length != dim");
                nilp_rows.back().second.push_back(row);
                break;
            }
            case Section::Height: {
                size_t colon = line.find(':');
                if (colon == std::string::npos) throw ProblemParseError(lineno, "expected 'one: vector'");
                std::string key = detail::strip(line.substr(0, colon));
                auto vecs = parse_vector_items(line.substr(colon + 1), lineno);
                if (vecs.size() != 1) throw ProblemParseError(lineno, "expected a single vector");
                if (key == "one")
                    hone = vecs.front();
                else if (key == "one_prime")
                    honep = vecs.front();
                else
                    throw ProblemParseError(lineno, "unknown height key '" + key + "'");
                break;
            }
        }
    }

    if (dim == 0) throw ProblemParseError(0, "missing dim");
    MixedHodgeData& d = pf.data;
    d.dim = dim;
    d.basis_names = basis;
    d.W = IncreasingFiltration(dim);
    for (const auto& [k, vs] : weight_spans) d.W.set_step(k, Subspace::span(dim, vs));
    d.F = DecreasingFiltration(dim);
    for (const auto& [p, vs] : hodge_spans) d.F.set_step(p, Subspace::span(dim, vs));
    if (!hodge_spans.empty()) {
        int top = hodge_spans.rbegin()->first;
        if (!d.F.step(top).is_zero()) d.F.set_step(top + 1, Subspace::zero(dim));
    }
    for (const auto& [k, rows] : q_rows) {
        Mat q(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size())
                throw ProblemParseError(0, "ragged polarization matrix at weight " + std::to_string(k));
            q.set_row(i, rows[i]);
        }
        d.Q.forms[k] = q;
    }
    for (const auto& [nm, rows] : nilp_rows) {
        if (rows.size() != dim) throw ProblemParseError(0, "nilpotent " + nm + " is not dim x dim");
        Mat m(dim, dim);
        for (size_t i = 0; i < dim; ++i) m.set_row(i, rows[i]);
        pf.nilpotent_names.push_back(nm);
        d.nilpotents.push_back(m);
    }
    pf.height_one = hone;
    pf.height_one_prime = honep;
    return pf;
}

inline ProblemFile parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_problem(in);
}

inline std::string format_vec(const Vec& v) {
    std::string s = "(";
    for (size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + to_string(v[j]);
    return s + ")";
}

/// Serializes back to the file format; parse(dump(x)) is structurally
/// identical to x.
inline std::string dump_problem(const ProblemFile& pf) {
    std::ostringstream os;
    const MixedHodgeData& d = pf.data;
    os << "dim = " << d.dim << "\n";
    if (!d.basis_names.empty()) {
        os << "basis =";
        for (const auto& b : d.basis_names) os << " " << b;
        os << "\n";
    }
    if (pf.declared_type) os << "type = " << *pf.declared_type << "\n";
    os << "\n[weights]\n";
    for (const auto& [k, s] : d.W.raw_steps()) {
        os << k << ":";
        for (const auto& v : s.basis_vectors()) os << " " << format_vec(v);
        os << "\n";
    }
    os << "\n[hodge]\n";
    for (const auto& [p, s] : d.F.raw_steps()) {
        if (s.is_zero()) continue;
        os << p << ":";
        for (const auto& v : s.basis_vectors()) os << " " << format_vec(v);
        os << "\n";
    }
    for (const auto& [k, q] : d.Q.forms) {
        os << "\n[polarization " << k << "]\n";
        for (size_t i = 0; i < q.rows(); ++i) {
            for (size_t j = 0; j < q.cols(); ++j) os << (j ? " " : "") << to_string(q(i, j));
            os << "\n";
        }
    }
    for (size_t t = 0; t < d.nilpotents.size(); ++t) {
        os << "\n[nilpotent " << (t < pf.nilpotent_names.size() ? pf.nilpotent_names[t] : "N") << "]\n";
        const Mat& m = d.nilpotents[t];
        for (size_t i = 0; i < m.rows(); ++i) {
            for (size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << to_string(m(i, j));
            os << "\n";
        }
    }
    if (pf.height_one && pf.height_one_prime) {
        os << "\n[height]\n";
        os << "one: " << format_vec(*pf.height_one) << "\n";
        os << "one_prime: " << format_vec(*pf.height_one_prime) << "\n";
    }
    return os.str();
}

}  // namespace lmhs
