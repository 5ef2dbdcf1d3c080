#pragma once
// Line-oriented model format (.ftm).
//
//   # comment
//   model <name>
//   suspicion <node> <state>
//   node <id> <state,state,...> <observable|latent> <intervenable|fixed> "<label>"
//   edge <id> <from> <to> [excluded]
//   cpt <child> : <p> <p> ...                          (root node)
//   cpt <child> | <parent> ... : <state,...>= <p> ...  (one row per line)
//
// The parser never stops at the first problem: every diagnostic carries a
// 1-based line and column. The serializer emits a canonical form (nodes in
// declaration order, edges in natural id order, parents in declaration order,
// rows in lexicographic parent-tuple order, shortest round-trip decimals).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/network.hpp"

namespace ftm {

struct Diagnostic {
    ErrorKind kind;
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;

    std::string str() const {
        return std::to_string(line) + ":" + std::to_string(column) + ": " + std::string(to_string(kind)) + ": " +
               message;
    }
};

struct ParseResult {
    NetworkSpec spec;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

namespace dsl {

inline std::string format_probability(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_probability(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

// Natural ordering: digit runs compare numerically, so E2 < E10.
inline bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        bool da = std::isdigit(static_cast<unsigned char>(a[i])), db = std::isdigit(static_cast<unsigned char>(b[j]));
        if (da && db) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            auto na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
            na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
            nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
            if (na.size() != nb.size()) return na.size() < nb.size();
            if (na != nb) return na < nb;
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
    return a < b;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Token {
    enum Type { Word, Quoted, Bar, Colon, Equals } type;
    std::string text;
    std::size_t column;
};

// Splits one line into tokens. Returns false (with `err_col`) on an
// unterminated string.
inline bool tokenize(std::string_view line, std::vector<Token>& out, std::size_t& err_col) {
    out.clear();
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') break;
        const std::size_t col = i + 1;
        if (c == '|' || c == ':' || c == '=') {
            out.push_back({c == '|' ? Token::Bar : c == ':' ? Token::Colon : Token::Equals, std::string(1, c), col});
            ++i;
            continue;
        }
        if (c == '"') {
            std::string text;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    text += line[i + 1];
                    i += 2;
                    continue;
                }
                if (line[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                text += line[i++];
            }
            if (!closed) {
                err_col = col;
                return false;
            }
            out.push_back({Token::Quoted, std::move(text), col});
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '|' &&
               line[j] != ':' && line[j] != '=' && line[j] != '"' && line[j] != '#')
            ++j;
        out.push_back({Token::Word, std::string(line.substr(i, j - i)), col});
        i = j;
    }
    return true;
}

struct RawRow {
    std::size_t line;
    std::size_t column;
    std::vector<std::string> tuple;  // empty for root rows
    std::vector<double> probs;
};

struct RawCpt {
    std::size_t line;  // first row
    std::vector<std::string> parents;
    std::vector<RawRow> rows;
};

class Parser {
public:
    // `known` supplies node definitions for fragments that carry only cpt lines.
    explicit Parser(const std::vector<NodeDef>* known = nullptr) : known_(known) {}

    ParseResult parse(std::string_view text, bool require_model = true) {
        std::size_t lineno = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto nl = text.find('\n', pos);
            auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++lineno;
            parse_line(line, lineno);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        if (require_model && !saw_model_) diag(ErrorKind::SyntaxError, 1, 1, "expected a 'model <name>' line");
        resolve(require_model);
        std::stable_sort(result_.diagnostics.begin(), result_.diagnostics.end(),
                         [](const Diagnostic& a, const Diagnostic& b) {
                             return std::tie(a.line, a.column) < std::tie(b.line, b.column);
                         });
        return std::move(result_);
    }

private:
    void diag(ErrorKind k, std::size_t line, std::size_t col, std::string msg) {
        result_.diagnostics.push_back({k, line, col, std::move(msg)});
    }

    bool expect_id(const Token& t, std::size_t line, const char* what) {
        if (t.type == Token::Word && valid_identifier(t.text)) return true;
        diag(ErrorKind::SyntaxError, line, t.column, std::string("expected ") + what + ", got '" + t.text + "'");
        return false;
    }

    void parse_line(std::string_view line, std::size_t ln) {
        std::vector<Token> toks;
        std::size_t err_col = 0;
        if (!tokenize(line, toks, err_col)) {
            diag(ErrorKind::SyntaxError, ln, err_col, "unterminated string");
            return;
        }
        if (toks.empty()) return;
        const auto& kw = toks[0];
        if (kw.type != Token::Word) {
            diag(ErrorKind::SyntaxError, ln, kw.column, "expected a keyword (model, suspicion, node, edge, cpt)");
            return;
        }
        if (kw.text == "model") return parse_model(toks, ln);
        if (kw.text == "suspicion") return parse_suspicion(toks, ln);
        if (kw.text == "node") return parse_node(toks, ln);
        if (kw.text == "edge") return parse_edge(toks, ln);
        if (kw.text == "cpt") return parse_cpt(toks, ln);
        diag(ErrorKind::SyntaxError, ln, kw.column, "unknown keyword '" + kw.text + "'");
    }

    void parse_model(const std::vector<Token>& t, std::size_t ln) {
        if (t.size() != 2) {
            diag(ErrorKind::SyntaxError, ln, t.size() > 2 ? t[2].column : t[0].column, "expected 'model <name>'");
            return;
        }
        if (!expect_id(t[1], ln, "a model name")) return;
        if (saw_model_) {
            diag(ErrorKind::DuplicateDefinition, ln, t[0].column, "model declared twice");
            return;
        }
        saw_model_ = true;
        result_.spec.name = t[1].text;
    }

    void parse_suspicion(const std::vector<Token>& t, std::size_t ln) {
        if (t.size() != 3) {
            diag(ErrorKind::SyntaxError, ln, t[0].column, "expected 'suspicion <node> <state>'");
            return;
        }
        if (!expect_id(t[1], ln, "a node id") || !expect_id(t[2], ln, "a state name")) return;
        if (result_.spec.suspicion) {
            diag(ErrorKind::DuplicateDefinition, ln, t[0].column, "suspicion target declared twice");
            return;
        }
        result_.spec.suspicion = SuspicionTarget{t[1].text, t[2].text};
        suspicion_line_ = ln;
        suspicion_col_ = t[1].column;
    }

    void parse_node(const std::vector<Token>& t, std::size_t ln) {
        if (t.size() != 6) {
            diag(ErrorKind::SyntaxError, ln, t.size() > 6 ? t[6].column : t.back().column,
                 "expected 'node <id> <states> <observable|latent> <intervenable|fixed> \"<label>\"'");
            return;
        }
        bool ok = expect_id(t[1], ln, "a node id");
        NodeDef nd;
        nd.id = t[1].text;
        if (t[2].type != Token::Word) {
            diag(ErrorKind::SyntaxError, ln, t[2].column, "expected a comma-separated state list");
            ok = false;
        } else {
            nd.states = split(t[2].text, ',');
            std::set<std::string> seen;
            for (const auto& s : nd.states) {
                if (!valid_identifier(s)) {
                    diag(ErrorKind::SyntaxError, ln, t[2].column, "bad state name '" + s + "'");
                    ok = false;
                } else if (!seen.insert(s).second) {
                    diag(ErrorKind::DuplicateDefinition, ln, t[2].column, "state '" + s + "' repeated");
                    ok = false;
                }
            }
            if (ok && nd.states.size() < 2) {
                diag(ErrorKind::SyntaxError, ln, t[2].column, "a node needs at least two states");
                ok = false;
            }
        }
        if (t[3].text == "observable")
            nd.visibility = Visibility::Observable;
        else if (t[3].text == "latent")
            nd.visibility = Visibility::Latent;
        else {
            diag(ErrorKind::SyntaxError, ln, t[3].column, "expected 'observable' or 'latent'");
            ok = false;
        }
        if (t[4].text == "intervenable")
            nd.intervenable = true;
        else if (t[4].text == "fixed")
            nd.intervenable = false;
        else {
            diag(ErrorKind::SyntaxError, ln, t[4].column, "expected 'intervenable' or 'fixed'");
            ok = false;
        }
        if (t[5].type != Token::Quoted) {
            diag(ErrorKind::SyntaxError, ln, t[5].column, "expected a quoted label");
            ok = false;
        }
        nd.label = t[5].text;
        if (!ok) {
            bad_nodes_.insert(nd.id);
            return;
        }
        if (node_line_.count(nd.id)) {
            diag(ErrorKind::DuplicateDefinition, ln, t[1].column,
                 "node " + nd.id + " already defined on line " + std::to_string(node_line_[nd.id]));
            return;
        }
        node_line_[nd.id] = ln;
        result_.spec.nodes.push_back(std::move(nd));
    }

    void parse_edge(const std::vector<Token>& t, std::size_t ln) {
        if (t.size() != 4 && t.size() != 5) {
            diag(ErrorKind::SyntaxError, ln, t.back().column, "expected 'edge <id> <from> <to> [excluded]'");
            return;
        }
        if (!expect_id(t[1], ln, "an edge id") || !expect_id(t[2], ln, "a node id") ||
            !expect_id(t[3], ln, "a node id"))
            return;
        Edge e{t[1].text, t[2].text, t[3].text, false};
        if (t.size() == 5) {
            if (t[4].text != "excluded") {
                diag(ErrorKind::SyntaxError, ln, t[4].column, "expected 'excluded' or end of line");
                return;
            }
            e.excluded = true;
        }
        if (edge_line_.count(e.id)) {
            diag(ErrorKind::DuplicateDefinition, ln, t[1].column,
                 "edge " + e.id + " already defined on line " + std::to_string(edge_line_[e.id]));
            return;
        }
        edge_line_[e.id] = ln;
        edge_cols_[e.id] = {t[2].column, t[3].column};
        result_.spec.edges.push_back(std::move(e));
    }

    void parse_cpt(const std::vector<Token>& t, std::size_t ln) {
        if (t.size() < 2 || !expect_id(t[1], ln, "a child node id")) {
            if (t.size() < 2) diag(ErrorKind::SyntaxError, ln, t[0].column, "expected 'cpt <child> ...'");
            return;
        }
        std::size_t i = 2;
        std::vector<std::string> parents;
        if (i < t.size() && t[i].type == Token::Bar) {
            ++i;
            while (i < t.size() && t[i].type == Token::Word) {
                if (!expect_id(t[i], ln, "a parent node id")) return;
                parents.push_back(t[i].text);
                ++i;
            }
            if (parents.empty()) {
                diag(ErrorKind::SyntaxError, ln, i < t.size() ? t[i].column : t.back().column,
                     "expected at least one parent after '|'");
                return;
            }
        }
        if (i >= t.size() || t[i].type != Token::Colon) {
            diag(ErrorKind::SyntaxError, ln, i < t.size() ? t[i].column : t.back().column + t.back().text.size(),
                 "expected ':'");
            return;
        }
        ++i;
        RawRow row{ln, t[0].column, {}, {}};
        if (!parents.empty()) {
            if (i + 1 >= t.size() || t[i].type != Token::Word || t[i + 1].type != Token::Equals) {
                diag(ErrorKind::SyntaxError, ln, i < t.size() ? t[i].column : t.back().column,
                     "expected '<state,...>=' before the row");
                return;
            }
            row.tuple = split(t[i].text, ',');
            row.column = t[i].column;
            i += 2;
        }
        bool ok = true;
        for (; i < t.size(); ++i) {
            auto p = t[i].type == Token::Word ? parse_probability(t[i].text) : std::nullopt;
            if (!p) {
                diag(ErrorKind::SyntaxError, ln, t[i].column, "expected a probability, got '" + t[i].text + "'");
                ok = false;
                continue;
            }
            if (!(*p >= 0.0 && *p <= 1.0)) {
                diag(ErrorKind::BadProbability, ln, t[i].column, "probability " + t[i].text + " outside [0,1]");
                ok = false;
            }
            row.probs.push_back(*p);
        }
        if (row.probs.empty() && ok) {
            diag(ErrorKind::SyntaxError, ln, t.back().column, "expected probabilities");
            return;
        }
        if (!ok) {
            bad_cpts_.insert(t[1].text);
            return;
        }
        auto [it, fresh] = cpts_.try_emplace(t[1].text, RawCpt{ln, parents, {}});
        if (!fresh && it->second.parents != parents) {
            diag(ErrorKind::SyntaxError, ln, t[2].column,
                 "parent list differs from the first row of " + t[1].text + " on line " +
                     std::to_string(it->second.line));
            bad_cpts_.insert(t[1].text);
            return;
        }
        if (fresh) cpt_order_.push_back(t[1].text);
        it->second.rows.push_back(std::move(row));
    }

    const NodeDef* lookup(const std::string& id) const {
        for (const auto& nd : result_.spec.nodes)
            if (nd.id == id) return &nd;
        if (known_)
            for (const auto& nd : *known_)
                if (nd.id == id) return &nd;
        return nullptr;
    }

    void resolve(bool require_cpts) {
        auto& spec = result_.spec;
        for (const auto& e : spec.edges) {
            auto [cf, ct] = edge_cols_[e.id];
            if (!lookup(e.from) && !bad_nodes_.count(e.from))
                diag(ErrorKind::UnknownNodeReference, edge_line_[e.id], cf, "edge " + e.id + " names unknown node '" + e.from + "'");
            if (!lookup(e.to) && !bad_nodes_.count(e.to))
                diag(ErrorKind::UnknownNodeReference, edge_line_[e.id], ct, "edge " + e.id + " names unknown node '" + e.to + "'");
        }
        if (spec.suspicion) {
            const auto* nd = lookup(spec.suspicion->node);
            if (!nd)
                diag(ErrorKind::UnknownNodeReference, suspicion_line_, suspicion_col_,
                     "suspicion names unknown node '" + spec.suspicion->node + "'");
            else if (!nd->state_index(spec.suspicion->state))
                diag(ErrorKind::SyntaxError, suspicion_line_, suspicion_col_,
                     "'" + spec.suspicion->state + "' is not a state of " + nd->id);
        }

        for (const auto& child : cpt_order_) {
            const RawCpt& raw = cpts_.at(child);
            const NodeDef* nd = lookup(child);
            if (!nd) {
                if (!bad_nodes_.count(child))
                    diag(ErrorKind::UnknownNodeReference, raw.line, 5, "table for unknown node '" + child + "'");
                continue;
            }
            std::vector<const NodeDef*> pdefs;
            bool ok = true;
            for (const auto& p : raw.parents) {
                const NodeDef* pd = lookup(p);
                if (!pd) {
                    if (!bad_nodes_.count(p))
                        diag(ErrorKind::UnknownNodeReference, raw.line, 1, "table of " + child + " names unknown parent '" + p + "'");
                    ok = false;
                }
                pdefs.push_back(pd);
            }
            if (!ok) continue;

            std::size_t expected = 1;
            for (auto* pd : pdefs) expected *= pd->states.size();
            Cpt cpt{child, raw.parents, std::vector<std::vector<double>>(expected)};
            std::vector<std::size_t> seen_line(expected, 0);
            for (const auto& row : raw.rows) {
                if (row.probs.size() != nd->states.size()) {
                    diag(ErrorKind::CptShapeMismatch, row.line, row.column,
                         "row has " + std::to_string(row.probs.size()) + " probabilities, " + child + " has " +
                             std::to_string(nd->states.size()) + " states");
                    ok = false;
                    continue;
                }
                double sum = std::accumulate(row.probs.begin(), row.probs.end(), 0.0);
                if (std::abs(sum - 1.0) > kRowTolerance) {
                    diag(ErrorKind::BadProbability, row.line, row.column,
                         "row of " + child + " sums to " + detail::fmt_double(sum));
                    ok = false;
                }
                std::size_t r = 0;
                if (row.tuple.size() != raw.parents.size()) {
                    diag(ErrorKind::SyntaxError, row.line, row.column,
                         "row names " + std::to_string(row.tuple.size()) + " parent states, expected " +
                             std::to_string(raw.parents.size()));
                    ok = false;
                    continue;
                }
                bool tuple_ok = true;
                for (std::size_t k = 0; k < row.tuple.size(); ++k) {
                    auto s = pdefs[k]->state_index(row.tuple[k]);
                    if (!s) {
                        diag(ErrorKind::SyntaxError, row.line, row.column,
                             "'" + row.tuple[k] + "' is not a state of " + raw.parents[k]);
                        tuple_ok = false;
                        break;
                    }
                    r = r * pdefs[k]->states.size() + *s;
                }
                if (!tuple_ok) {
                    ok = false;
                    continue;
                }
                if (seen_line[r]) {
                    diag(ErrorKind::DuplicateDefinition, row.line, row.column,
                         "row already given on line " + std::to_string(seen_line[r]));
                    ok = false;
                    continue;
                }
                seen_line[r] = row.line;
                cpt.rows[r] = row.probs;
            }
            std::size_t have = static_cast<std::size_t>(std::count_if(seen_line.begin(), seen_line.end(),
                                                                      [](std::size_t l) { return l != 0; }));
            if (ok && have != expected) {
                diag(ErrorKind::CptShapeMismatch, raw.line, 1,
                     "table of " + child + " has " + std::to_string(raw.rows.size()) + " rows, expected " +
                         std::to_string(expected));
                ok = false;
            }
            if (ok) spec.cpts.push_back(std::move(cpt));
        }
        if (require_cpts)
            for (const auto& nd : spec.nodes)
                if (!cpts_.count(nd.id) && !bad_cpts_.count(nd.id))
                    diag(ErrorKind::MissingCpt, node_line_[nd.id], 6, "node " + nd.id + " has no table");
    }

    const std::vector<NodeDef>* known_;
    ParseResult result_;
    bool saw_model_ = false;
    std::size_t suspicion_line_ = 0, suspicion_col_ = 0;
    std::map<std::string, std::size_t> node_line_, edge_line_;
    std::map<std::string, std::pair<std::size_t, std::size_t>> edge_cols_;
    std::set<std::string> bad_nodes_, bad_cpts_;
    std::map<std::string, RawCpt> cpts_;
    std::vector<std::string> cpt_order_;
};

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace dsl

inline ParseResult parse_model(std::string_view text) { return dsl::Parser().parse(text); }

// Parses `cpt` lines for nodes already defined in `net` (e.g. a
// replacement-table file). Exactly one table must be present.
inline Cpt parse_cpt_fragment(std::string_view text, const Network& net) {
    auto res = dsl::Parser(&net.nodes()).parse(text, false);
    if (!res.ok()) {
        std::vector<Finding> fs;
        for (const auto& d : res.diagnostics) fs.push_back({d.kind, std::to_string(d.line), d.str()});
        throw ModelError(std::move(fs));
    }
    if (res.spec.cpts.size() != 1 || !res.spec.nodes.empty() || !res.spec.edges.empty())
        fail(ErrorKind::SyntaxError, "expected the rows of exactly one table");
    return res.spec.cpts.front();
}

// Parent order follows node declaration; rows are permuted to match.
inline Cpt canonical_table(const Cpt& c, const std::vector<NodeDef>& nodes) {
    std::unordered_map<std::string, std::size_t> decl;
    for (std::size_t i = 0; i < nodes.size(); ++i) decl[nodes[i].id] = i;
    auto card = [&](const std::string& id) { return nodes[decl.at(id)].states.size(); };

    std::vector<std::size_t> perm(c.parents.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return decl.at(c.parents[a]) < decl.at(c.parents[b]);
    });
    Cpt out{c.child, {}, std::vector<std::vector<double>>(c.rows.size())};
    for (auto k : perm) out.parents.push_back(c.parents[k]);

    std::vector<std::size_t> cards;
    for (const auto& p : c.parents) cards.push_back(card(p));
    std::vector<std::size_t> idx(c.parents.size(), 0);
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
        // idx is the old-order tuple of row r
        std::size_t nr = 0;
        for (auto k : perm) nr = nr * cards[k] + idx[k];
        out.rows[nr] = c.rows[r];
        for (std::size_t k = cards.size(); k-- > 0;) {
            if (++idx[k] < cards[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

// Canonical ordering of a valid spec's edges and tables.
inline NetworkSpec canonicalize(const NetworkSpec& spec) {
    NetworkSpec out;
    out.name = spec.name;
    out.nodes = spec.nodes;
    out.suspicion = spec.suspicion;
    out.edges = spec.edges;
    std::stable_sort(out.edges.begin(), out.edges.end(),
                     [](const Edge& a, const Edge& b) { return dsl::natural_less(a.id, b.id); });
    for (const auto& nd : spec.nodes)
        for (const auto& c : spec.cpts)
            if (c.child == nd.id) out.cpts.push_back(canonical_table(c, spec.nodes));
    return out;
}

inline bool same_structure(const NetworkSpec& a, const NetworkSpec& b) {
    auto ca = canonicalize(a), cb = canonicalize(b);
    return ca.name == cb.name && ca.nodes == cb.nodes && ca.edges == cb.edges && ca.cpts == cb.cpts &&
           ca.suspicion == cb.suspicion;
}

inline std::string serialize_model(const NetworkSpec& input) {
    const auto spec = canonicalize(input);
    std::ostringstream out;
    out << "model " << spec.name << "\n";
    if (spec.suspicion) out << "suspicion " << spec.suspicion->node << " " << spec.suspicion->state << "\n";
    if (!spec.nodes.empty()) out << "\n";
    for (const auto& nd : spec.nodes) {
        out << "node " << nd.id << " " << detail::join(nd.states, ",") << " "
            << (nd.visibility == Visibility::Observable ? "observable" : "latent") << " "
            << (nd.intervenable ? "intervenable" : "fixed") << " " << dsl::quote(nd.label) << "\n";
    }
    if (!spec.edges.empty()) out << "\n";
    for (const auto& e : spec.edges) {
        out << "edge " << e.id << " " << e.from << " " << e.to;
        if (e.excluded) out << " excluded";
        out << "\n";
    }
    std::unordered_map<std::string, const NodeDef*> by_id;
    for (const auto& nd : spec.nodes) by_id[nd.id] = &nd;
    for (const auto& c : spec.cpts) {
        out << "\n";
        std::vector<std::size_t> cards, idx(c.parents.size(), 0);
        for (const auto& p : c.parents) cards.push_back(by_id.at(p)->states.size());
        for (const auto& row : c.rows) {
            out << "cpt " << c.child;
            if (!c.parents.empty()) {
                out << " |";
                for (const auto& p : c.parents) out << " " << p;
                out << " : ";
                for (std::size_t k = 0; k < idx.size(); ++k)
                    out << (k ? "," : "") << by_id.at(c.parents[k])->states[idx[k]];
                out << "=";
            } else {
                out << " :";
            }
            for (double p : row) out << " " << dsl::format_probability(p);
            out << "\n";
            for (std::size_t k = cards.size(); k-- > 0;) {
                if (++idx[k] < cards[k]) break;
                idx[k] = 0;
            }
        }
    }
    return out.str();
}

inline std::string serialize_model(const Network& net) { return serialize_model(net.to_spec()); }

}  // namespace ftm
