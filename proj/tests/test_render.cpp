#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "support.hpp"
#include "taxo/analysis.hpp"
#include "taxo/render.hpp"

using namespace taxo;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++count;
    return count;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// Minimal XML shape check: tags nest properly, one root element, raw
// '<' never appears in text content, '&' only starts a known entity.
void require_well_formed_xml(const std::string& doc) {
    std::vector<std::string> stack;
    std::size_t roots = 0;
    std::size_t i = 0;
    while (i < doc.size()) {
        const char c = doc[i];
        if (c == '<') {
            const auto end = doc.find('>', i);
            REQUIRE_MESSAGE(end != std::string::npos, "unterminated tag at byte ", i);
            std::string tag = doc.substr(i + 1, end - i - 1);
            REQUIRE_FALSE_MESSAGE(tag.empty(), "empty tag at byte ", i);
            if (tag.front() == '?') {
                REQUIRE(tag.back() == '?');
            } else if (tag.front() == '/') {
                REQUIRE_MESSAGE(!stack.empty(), "closing tag with empty stack: ", tag);
                REQUIRE(stack.back() == tag.substr(1));
                stack.pop_back();
                if (stack.empty()) ++roots;
            } else if (tag.back() == '/') {
                // self-closing; nothing to track
            } else {
                stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
            }
            i = end + 1;
        } else if (c == '>') {
            FAIL("stray '>' at byte ", i);
        } else if (c == '&') {
            static const char* entities[] = {"&amp;", "&lt;", "&gt;", "&quot;", "&apos;"};
            bool ok = false;
            for (const char* e : entities) ok = ok || doc.compare(i, std::string(e).size(), e) == 0;
            REQUIRE_MESSAGE(ok, "bare '&' at byte ", i);
            ++i;
        } else {
            ++i;
        }
    }
    REQUIRE(stack.empty());
    REQUIRE(roots == 1);
}

std::vector<RenderOverlay> cash_bitcoin_overlays() {
    return {
        RenderOverlay{*fixture_classification("cash"), "", ""},
        RenderOverlay{*fixture_classification("bitcoin"), "", ""},
    };
}

}  // namespace

TEST_CASE("golden renderings are reproduced byte for byte") {
    const auto& t = builtin_taxonomy();
    SUBCASE("bare text grid") {
        CHECK(render_text(t, {}) == support::read_file(support::source_path("tests/golden/box_bare.txt")));
    }
    SUBCASE("cash/bitcoin text grid") {
        CHECK(render_text(t, cash_bitcoin_overlays()) ==
              support::read_file(support::source_path("tests/golden/box_cash_bitcoin.txt")));
    }
    SUBCASE("bare svg") {
        CHECK(render_svg(t, {}) == support::read_file(support::source_path("tests/golden/box_bare.svg")));
    }
    SUBCASE("cash/bitcoin svg") {
        CHECK(render_svg(t, cash_bitcoin_overlays()) ==
              support::read_file(support::source_path("tests/golden/box_cash_bitcoin.svg")));
    }
}

TEST_CASE("text grid structure") {
    const auto& t = builtin_taxonomy();
    const std::string bare = render_text(t, {});
    const std::string overlaid = render_text(t, cash_bitcoin_overlays());

    SUBCASE("header, one row per attribute, no legend without overlays") {
        const auto lines = lines_of(bare);
        REQUIRE(lines.size() == 16);  // header + blank + 14 rows
        CHECK(lines[0] == "Asset Taxonomy 1.0");
        CHECK(lines[1].empty());
        for (std::size_t i = 2; i < lines.size(); ++i) {
            CHECK(lines[i].starts_with(t.attributes[i - 2].name));
            CHECK(lines[i].ends_with("|"));
        }
        CHECK(count_occurrences(bare, "[") == 0);
        CHECK(bare.ends_with("|\n"));
    }
    SUBCASE("cell separators match the characteristic count") {
        // 43 cells plus one closing bar per row.
        CHECK(count_occurrences(bare, "|") == t.characteristic_count() + t.attributes.size());
    }
    SUBCASE("markers count the overlay cells") {
        // 4 cells shared, 9 only-cash, 9 only-bitcoin; legend repeats [1] and [2].
        CHECK(count_occurrences(overlaid, "[12]") == 4);
        CHECK(count_occurrences(overlaid, "[1] ") == 10);
        CHECK(count_occurrences(overlaid, "[2] ") == 10);
    }
    SUBCASE("legend names both assets") {
        const auto lines = lines_of(overlaid);
        REQUIRE(lines.size() == 19);
        CHECK(lines[16].empty());
        CHECK(lines[17] == "[1] Cash");
        CHECK(lines[18] == "[2] Bitcoin");
    }
    SUBCASE("legend labels can be overridden") {
        auto overlays = cash_bitcoin_overlays();
        overlays[0].label = "Left hand side";
        const auto lines = lines_of(render_text(t, overlays));
        CHECK(lines[17] == "[1] Left hand side");
        CHECK(lines[18] == "[2] Bitcoin");
    }
    SUBCASE("rows agree with the diff partition") {
        const DiffReport report = diff(t, *fixture_classification("cash"),
                                       *fixture_classification("bitcoin"));
        const auto lines = lines_of(overlaid);
        const auto row_for = [&](const std::string& attribute_id) -> const std::string& {
            return lines[2 + *t.attribute_index(attribute_id)];
        };
        // Both single-select here, so a shared attribute means one cell
        // marked by both sides and a differing one two distinct cells.
        for (const auto& id : report.shared)
            CHECK_MESSAGE(row_for(id).find("[12]") != std::string::npos, row_for(id));
        for (const auto& id : report.differing) {
            CHECK_MESSAGE(row_for(id).find("[1] ") != std::string::npos, row_for(id));
            CHECK_MESSAGE(row_for(id).find("[2] ") != std::string::npos, row_for(id));
            CHECK_MESSAGE(row_for(id).find("[12]") == std::string::npos, row_for(id));
        }
        for (const auto& id : report.undetermined)
            CHECK_MESSAGE(row_for(id).find("[12]") == std::string::npos, row_for(id));
    }
    SUBCASE("single overlay uses only the first marker") {
        const std::string one = render_text(t, {RenderOverlay{*fixture_classification("ether"), "", ""}});
        CHECK(count_occurrences(one, "[1] ") == 14);  // 13 cells + legend
        CHECK(count_occurrences(one, "[2] ") == 0);
        CHECK(count_occurrences(one, "[12]") == 0);
    }
}

TEST_CASE("svg structure") {
    const auto& t = builtin_taxonomy();
    const std::string bare = render_svg(t, {});
    const std::string overlaid = render_svg(t, cash_bitcoin_overlays());

    SUBCASE("exactly one rect per characteristic cell") {
        CHECK(count_occurrences(bare, "<rect ") == 43);
        CHECK(count_occurrences(overlaid, "<rect ") == 43);
    }
    SUBCASE("documents are well-formed") {
        require_well_formed_xml(bare);
        require_well_formed_xml(overlaid);
    }
    SUBCASE("fills mark the overlay cells") {
        CHECK(count_occurrences(overlaid, "fill=\"#6abf69\"") == 9 + 1 + 1);  // cells + pattern + legend
        CHECK(count_occurrences(overlaid, "fill=\"#ef8a3c\"") == 9 + 1);      // cells + legend circle
        CHECK(count_occurrences(overlaid, "fill=\"url(#overlap)\"") == 4);
        CHECK(count_occurrences(overlaid, "<circle ") == 2);
        CHECK(count_occurrences(bare, "<circle ") == 0);
        CHECK(count_occurrences(bare, "fill=\"none\"") == 43);
        CHECK(count_occurrences(bare, "stroke=\"#555555\"") == 43);
    }
    SUBCASE("custom fills propagate to cells, pattern and legend") {
        auto overlays = cash_bitcoin_overlays();
        overlays[0].fill = "#123456";
        overlays[1].fill = "#abcdef";
        const std::string svg = render_svg(t, overlays);
        CHECK(count_occurrences(svg, "fill=\"#123456\"") == 11);
        CHECK(count_occurrences(svg, "fill=\"#6abf69\"") == 0);
        CHECK(count_occurrences(svg, "stroke=\"#abcdef\"") == 1);  // pattern stripes
    }
    SUBCASE("labels are escaped") {
        Taxonomy odd = support::toy_taxonomy(1, 2);
        odd.attributes[0].name = "Risk & <reward>";
        const std::string svg = render_svg(odd, {});
        CHECK(svg.find("Risk &amp; &lt;reward&gt;") != std::string::npos);
        CHECK(svg.find("<reward>") == std::string::npos);
        require_well_formed_xml(svg);
    }
    SUBCASE("the grid is geometry-stable") {
        CHECK(bare.find("width=\"1392\"") != std::string::npos);   // 2*16 + 250 + 6*186 - 6
        CHECK(bare.find("height=\"502\"") != std::string::npos);   // 2*16 + 14*34 - 6
        CHECK(overlaid.find("height=\"560\"") != std::string::npos);  // + 14 + 2*22
    }
}

TEST_CASE("render dispatch and input checks") {
    const auto& t = builtin_taxonomy();
    SUBCASE("RenderSpec dispatch matches the direct calls") {
        RenderSpec spec{t, cash_bitcoin_overlays(), RenderFormat::text};
        CHECK(render(spec) == render_text(t, spec.overlays));
        spec.format = RenderFormat::svg;
        CHECK(render(spec) == render_svg(t, spec.overlays));
    }
    SUBCASE("rendering is deterministic") {
        CHECK(render_svg(t, cash_bitcoin_overlays()) == render_svg(t, cash_bitcoin_overlays()));
        CHECK(render_text(t, {}) == render_text(t, {}));
    }
    SUBCASE("more than two overlays are refused") {
        std::vector<RenderOverlay> three(3, RenderOverlay{*fixture_classification("cash"), "", ""});
        CHECK_THROWS_AS(render_text(t, three), Error);
        CHECK_THROWS_AS(render_svg(t, three), Error);
    }
    SUBCASE("invalid overlays are refused") {
        auto broken = *fixture_classification("cash");
        broken.selections["technology"] = Selection{{"quantum"}, std::nullopt};
        CHECK_THROWS_AS(render_text(t, {RenderOverlay{broken, "", ""}}), ValidationFailure);
        CHECK_THROWS_AS(render_svg(t, {RenderOverlay{broken, "", ""}}), ValidationFailure);
    }
}
