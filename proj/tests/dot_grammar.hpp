#pragma once

// Recursive-descent checker for the Graphviz DOT language (graph, node,
// edge and attribute statements, subgraphs, all four ID forms, comments).
// Returns an empty string for well-formed input, else the first problem.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sdnsec::test {

class DotChecker {
public:
    explicit DotChecker(std::string_view text) : s_(text) {}

    std::string check() {
        try {
            graph();
            skip();
            if (pos_ != s_.size()) fail("trailing input");
        } catch (const std::string& e) {
            return e;
        }
        return {};
    }

    bool directed() const { return directed_; }
    std::size_t node_statements() const { return nodes_; }
    std::size_t edge_statements() const { return edges_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    bool directed_ = false;
    std::size_t nodes_ = 0;
    std::size_t edges_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw "offset " + std::to_string(pos_) + ": " + what;
    }

    void skip() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (s_.substr(pos_, 2) == "//" ||
                       (c == '#' && (pos_ == 0 || s_[pos_ - 1] == '\n'))) {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (s_.substr(pos_, 2) == "/*") {
                const auto end = s_.find("*/", pos_ + 2);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 2;
            } else {
                break;
            }
        }
    }

    bool peek(std::string_view tok) {
        skip();
        return s_.substr(pos_, tok.size()) == tok;
    }

    bool accept(std::string_view tok) {
        if (!peek(tok)) return false;
        pos_ += tok.size();
        return true;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
               static_cast<unsigned char>(c) >= 0x80;
    }

    // Keywords are case-insensitive and must not run into an identifier.
    bool keyword(std::string_view kw) {
        skip();
        if (s_.size() - pos_ < kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(s_[pos_ + i])) != kw[i]) return false;
        }
        const auto after = pos_ + kw.size();
        if (after < s_.size() &&
            (ident_start(s_[after]) || std::isdigit(static_cast<unsigned char>(s_[after])))) {
            return false;
        }
        pos_ = after;
        return true;
    }

    bool at_id() {
        skip();
        if (pos_ >= s_.size()) return false;
        const char c = s_[pos_];
        return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
               c == '.' || c == '"' || c == '<';
    }

    void id() {
        skip();
        if (pos_ >= s_.size()) fail("expected ID");
        const char c = s_[pos_];
        if (ident_start(c)) {
            while (pos_ < s_.size() && (ident_start(s_[pos_]) ||
                                        std::isdigit(static_cast<unsigned char>(s_[pos_])))) {
                ++pos_;
            }
        } else if (c == '"') {
            ++pos_;
            while (true) {
                if (pos_ >= s_.size()) fail("unterminated string");
                if (s_[pos_] == '\\') {
                    pos_ += 2;
                    continue;
                }
                if (s_[pos_++] == '"') break;
            }
            // "a" + "b" concatenation
            if (accept("+")) id();
        } else if (c == '<') {
            int depth = 0;
            do {
                if (pos_ >= s_.size()) fail("unterminated HTML string");
                if (s_[pos_] == '<') ++depth;
                if (s_[pos_] == '>') --depth;
                ++pos_;
            } while (depth > 0);
        } else if (c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
            if (c == '-') ++pos_;
            bool digits = false, dot = false;
            while (pos_ < s_.size()) {
                const char d = s_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    digits = true;
                } else if (d == '.' && !dot) {
                    dot = true;
                } else {
                    break;
                }
                ++pos_;
            }
            if (!digits) fail("malformed numeral");
        } else {
            fail("expected ID");
        }
    }

    void graph() {
        keyword("strict");
        if (keyword("digraph")) {
            directed_ = true;
        } else if (!keyword("graph")) {
            fail("expected 'graph' or 'digraph'");
        }
        if (!peek("{")) id();
        expect("{");
        stmt_list();
        expect("}");
    }

    void stmt_list() {
        while (!peek("}")) {
            if (pos_ >= s_.size()) fail("unexpected end of input");
            stmt();
            accept(";");
        }
    }

    void a_list() {
        while (at_id()) {
            id();
            expect("=");
            id();
            if (!accept(";")) accept(",");
        }
    }

    void attr_list() {
        while (accept("[")) {
            a_list();
            expect("]");
        }
    }

    void node_id() {
        id();
        if (accept(":")) {
            id();
            if (accept(":")) id();
        }
    }

    bool edge_op() {
        if (peek("->")) {
            if (!directed_) fail("'->' in an undirected graph");
            pos_ += 2;
            return true;
        }
        if (peek("--")) {
            if (directed_) fail("'--' in a directed graph");
            pos_ += 2;
            return true;
        }
        return false;
    }

    void stmt() {
        if (keyword("graph") || keyword("node") || keyword("edge")) {
            if (!peek("[")) fail("expected attribute list");
            attr_list();
            return;
        }
        const bool sub = peek("{") || keyword("subgraph");
        if (sub) {
            // keyword() consumed "subgraph"; an ID may follow before the body.
            if (!peek("{")) id();
            expect("{");
            stmt_list();
            expect("}");
        } else {
            node_id();
            if (accept("=")) {
                id();
                return;
            }
        }
        bool edge = false;
        while (edge_op()) {
            edge = true;
            if (peek("{") || keyword("subgraph")) {
                if (!peek("{")) id();
                expect("{");
                stmt_list();
                expect("}");
            } else {
                node_id();
            }
        }
        attr_list();
        if (edge) {
            ++edges_;
        } else if (!sub) {
            ++nodes_;
        }
    }
};

inline std::string check_dot(std::string_view text) { return DotChecker(text).check(); }

}  // namespace sdnsec::test
