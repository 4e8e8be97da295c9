#include <doctest.h>

#include <array>

#include "sdnsec/blocks.hpp"

using namespace sdnsec;

TEST_CASE("blocks: headers, entries and comments") {
    const auto blocks = parse_blocks(
        "# leading comment\n"
        "component onos\n"
        "  kind = Controller\n"
        "  # inside a block\n"
        "\n"
        "  attr.note = a = b, c\n"
        "flow f1\n"
        "\tsrc=onos\n");
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].keyword == "component");
    CHECK(blocks[0].name == "onos");
    CHECK(blocks[0].line == 2);
    REQUIRE(blocks[0].entries.size() == 2);
    CHECK(blocks[0].entries[1].key == "attr.note");
    CHECK(blocks[0].entries[1].value == "a = b, c");
    CHECK(blocks[0].entries[1].line == 6);
    CHECK(blocks[0].entries[1].column == 15);
    CHECK(blocks[1].find("src")->value == "onos");
    CHECK(blocks[1].find("dst") == nullptr);
}

TEST_CASE("blocks: empty input and comment-only input") {
    CHECK(parse_blocks("").empty());
    CHECK(parse_blocks("# nothing\n\n   \n").empty());
}

TEST_CASE("blocks: syntax errors carry positions") {
    const auto position = [](std::string_view text) {
        try {
            parse_blocks(text);
        } catch (const SyntaxError& e) {
            return std::pair{e.line(), e.column()};
        }
        return std::pair<std::size_t, std::size_t>{0, 0};
    };
    CHECK(position("component\n") == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(position("  kind = Host\n") == std::pair<std::size_t, std::size_t>{1, 3});
    CHECK(position("component a\n  kind Host\n") == std::pair<std::size_t, std::size_t>{2, 3});
    CHECK(position("component a b\n") == std::pair<std::size_t, std::size_t>{1, 11});
    CHECK(position("component a\n  bad key = 1\n") == std::pair<std::size_t, std::size_t>{2, 3});
}

TEST_CASE("blocks: key checks") {
    const auto blocks = parse_blocks("x a\n  k = 1\n  attr.os = linux\n  k = 2\n");
    static constexpr std::array<std::string_view, 2> allowed{"k", "attr.*"};
    CHECK_NOTHROW(require_keys(blocks[0], allowed));
    static constexpr std::array<std::string_view, 1> only_k{"k"};
    CHECK_THROWS_AS(require_keys(blocks[0], only_k), SyntaxError);
    CHECK_THROWS_AS(require_unique_keys(blocks[0]), SyntaxError);
    CHECK(require_entry(blocks[0], "k").value == "1");
    CHECK_THROWS_AS(require_entry(blocks[0], "missing"), SyntaxError);
    CHECK(blocks[0].find_all("k").size() == 2);
}

TEST_CASE("blocks: value helpers") {
    CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_list("").empty());
    CHECK(is_identifier("telnet@onos"));
    CHECK_FALSE(is_identifier("two words"));
    CHECK_FALSE(is_identifier(""));
    Entry e{"k", "true", 1, 5};
    CHECK(parse_bool(e));
    e.value = "yes";
    CHECK_THROWS_AS(parse_bool(e), SyntaxError);
    e.value = "2.5";
    CHECK(parse_double(e) == doctest::Approx(2.5));
    CHECK_THROWS_AS(parse_integer(e), SyntaxError);
    e.value = "4000000";
    CHECK(parse_integer(e) == 4000000);
}
