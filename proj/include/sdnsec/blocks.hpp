#pragma once

// Line-oriented block format shared by every sdnsec input file (models,
// rules, catalogs, grouping tables, scenarios):
//
//   # comment
//   <keyword> <name>
//     <key> = <value>
//
// A block runs until the next header line. Values are the raw remainder of
// the line after the first '=', trimmed; they may contain any character.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdnsec {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;  // of the value
};

struct Block {
    std::string keyword;
    std::string name;
    std::size_t line = 0;
    std::vector<Entry> entries;

    // First entry with the given key, or nullptr.
    const Entry* find(std::string_view key) const;
    std::vector<const Entry*> find_all(std::string_view key) const;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

std::vector<Block> parse_blocks(std::string_view text);

// Raises SyntaxError on the first entry whose key is not in `allowed`.
// A trailing '*' in an allowed key matches any suffix ("attr.*").
void require_keys(const Block& block, std::span<const std::string_view> allowed);

// Raises SyntaxError when a key appears more than once.
void require_unique_keys(const Block& block);

const Entry& require_entry(const Block& block, std::string_view key);

bool is_identifier(std::string_view s);
std::vector<std::string> split_list(std::string_view value);
std::string_view trim(std::string_view s);

bool parse_bool(const Entry& e);
double parse_double(const Entry& e);
long long parse_integer(const Entry& e);

}  // namespace sdnsec
