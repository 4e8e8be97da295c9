#include "sdnsec/blocks.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace sdnsec {

namespace {

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.' || c == ':' || c == '@';
}

std::string position_prefix(std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
}

}  // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(position_prefix(line, column) + what), line_(line), column_(column) {}

const Entry* Block::find(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

std::vector<const Entry*> Block::find_all(std::string_view key) const {
    std::vector<const Entry*> out;
    for (const auto& e : entries) {
        if (e.key == key) out.push_back(&e);
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_identifier(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_ident_char);
}

std::vector<Block> parse_blocks(std::string_view text) {
    std::vector<Block> blocks;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        const auto body = trim(raw);
        if (body.empty() || body.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        const std::size_t indent = raw.find_first_not_of(" \t");
        const bool indented = indent > 0;
        const auto eq = body.find('=');

        if (!indented && eq == std::string_view::npos) {
            // Header: "<keyword> <name>"
            const auto space = body.find_first_of(" \t");
            if (space == std::string_view::npos) {
                throw SyntaxError(line_no, 1, "block header needs a keyword and a name");
            }
            Block b;
            b.keyword = std::string(body.substr(0, space));
            const auto name = trim(body.substr(space));
            if (!is_identifier(b.keyword)) {
                throw SyntaxError(line_no, 1, "invalid keyword '" + b.keyword + "'");
            }
            if (!is_identifier(name)) {
                throw SyntaxError(line_no, space + 2, "invalid name '" + std::string(name) + "'");
            }
            b.name = std::string(name);
            b.line = line_no;
            blocks.push_back(std::move(b));
        } else {
            if (eq == std::string_view::npos) {
                throw SyntaxError(line_no, indent + 1, "expected 'key = value'");
            }
            if (blocks.empty()) {
                throw SyntaxError(line_no, indent + 1, "entry outside of any block");
            }
            const auto key = trim(body.substr(0, eq));
            if (!is_identifier(key)) {
                throw SyntaxError(line_no, indent + 1, "invalid key '" + std::string(key) + "'");
            }
            const auto after = body.substr(eq + 1);
            const auto value = trim(after);
            const auto lead = after.find_first_not_of(" \t");
            const std::size_t value_col =
                indent + eq + 2 + (lead == std::string_view::npos ? after.size() : lead);
            blocks.back().entries.push_back(
                Entry{std::string(key), std::string(value), line_no, value_col});
        }
        if (end == text.size()) break;
    }
    return blocks;
}

void require_keys(const Block& block, std::span<const std::string_view> allowed) {
    for (const auto& e : block.entries) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](std::string_view a) {
            if (!a.empty() && a.back() == '*') {
                const auto prefix = a.substr(0, a.size() - 1);
                return e.key.size() > prefix.size() && e.key.starts_with(prefix);
            }
            return e.key == a;
        });
        if (!ok) {
            throw SyntaxError(e.line, 1,
                              "unknown key '" + e.key + "' in " + block.keyword + " '" +
                                  block.name + "'");
        }
    }
}

void require_unique_keys(const Block& block) {
    std::set<std::string_view> seen;
    for (const auto& e : block.entries) {
        if (!seen.insert(e.key).second) {
            throw SyntaxError(e.line, 1, "duplicate key '" + e.key + "'");
        }
    }
}

const Entry& require_entry(const Block& block, std::string_view key) {
    if (const auto* e = block.find(key)) return *e;
    throw SyntaxError(block.line, 1,
                      block.keyword + " '" + block.name + "' is missing '" + std::string(key) +
                          "'");
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string_view::npos) comma = value.size();
        const auto item = trim(value.substr(pos, comma - pos));
        if (!item.empty()) out.emplace_back(item);
        pos = comma + 1;
    }
    return out;
}

bool parse_bool(const Entry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw SyntaxError(e.line, e.column, "expected true or false, got '" + e.value + "'");
}

double parse_double(const Entry& e) {
    double out = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        throw SyntaxError(e.line, e.column, "expected a number, got '" + e.value + "'");
    }
    return out;
}

long long parse_integer(const Entry& e) {
    long long out = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        throw SyntaxError(e.line, e.column, "expected an integer, got '" + e.value + "'");
    }
    return out;
}

}  // namespace sdnsec
