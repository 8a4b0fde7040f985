#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <tuple>

#include <unistd.h>

#include "json.hpp"
#include "support.hpp"
#include "taxo/registry.hpp"

using namespace taxo;
namespace fs = std::filesystem;

namespace {

// A unique scratch directory, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("taxo_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RegistryStore open_rw(const fs::path& dir) {
    return RegistryStore::open(dir, builtin_taxonomy());
}

}  // namespace

TEST_CASE("check characters") {
    SUBCASE("reference values") {
        CHECK(asset_id_check_char("AAAAAAAA") == '8');  // 8 x 10 = 80; 80 mod 36 = 8
        CHECK(asset_id_check_char("00000000") == '0');
        CHECK(verify_asset_id("AAAAAAAA8"));
        CHECK(verify_asset_id("000000000"));
        CHECK_FALSE(verify_asset_id("AAAAAAAA7"));
    }
    SUBCASE("shape errors") {
        CHECK_THROWS_AS(asset_id_check_char("AAaa"), Error);
        CHECK_THROWS_AS(asset_id_check_char("aaaaaaaa"), Error);  // lowercase is not canonical
        CHECK_FALSE(verify_asset_id(""));
        CHECK_FALSE(verify_asset_id("AAAAAAAA"));    // too short
        CHECK_FALSE(verify_asset_id("AAAAAAAA88"));  // too long
        CHECK_FALSE(verify_asset_id("aaaaaaaa8"));
        CHECK_FALSE(verify_asset_id("AAAA?AAA8"));
    }
    SUBCASE("minted ids always verify") {
        std::mt19937_64 rng(99);
        for (int i = 0; i < 1000; ++i) {
            const AssetId id = mint_asset_id(rng);
            REQUIRE(id.text.size() == kAssetIdLength);
            REQUIRE(verify_asset_id(id.text));
        }
    }
    SUBCASE("every single-character flip is caught (exhaustive)") {
        const std::string alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
        std::mt19937_64 rng(7);
        for (int sample = 0; sample < 25; ++sample) {
            const AssetId id = mint_asset_id(rng);
            for (std::size_t pos = 0; pos < id.text.size(); ++pos) {
                for (char replacement : alphabet) {
                    if (replacement == id.text[pos]) continue;
                    std::string flipped = id.text;
                    flipped[pos] = replacement;
                    REQUIRE_FALSE(verify_asset_id(flipped));
                }
            }
        }
    }
}

TEST_CASE("store round trips") {
    TempDir dir("roundtrip");
    auto store = open_rw(dir.path);
    const auto& cash = *fixture_classification("cash");

    SUBCASE("add then get returns the stored value with its id") {
        const AssetId id = store.add(cash);
        CHECK(verify_asset_id(id.text));
        CHECK(store.contains(id.text));
        CHECK(store.size() == 1);

        const auto got = store.get(id.text);
        CHECK(got.asset_id == id.text);
        auto expected = cash;
        expected.asset_id = id.text;
        CHECK(got == expected);
    }
    SUBCASE("update replaces, remove erases") {
        const AssetId id = store.add(cash);
        auto changed = cash;
        changed.asset_name = "Cash (updated)";
        store.update(id.text, changed);
        CHECK(store.get(id.text).asset_name == "Cash (updated)");

        store.remove(id.text);
        CHECK_FALSE(store.contains(id.text));
        CHECK(store.size() == 0);
        CHECK_THROWS_AS(store.get(id.text), NotFoundError);
    }
    SUBCASE("unknown ids raise not-found") {
        CHECK_THROWS_AS(store.get("AAAAAAAA8"), NotFoundError);
        CHECK_THROWS_AS(store.update("AAAAAAAA8", cash), NotFoundError);
        CHECK_THROWS_AS(store.remove("AAAAAAAA8"), NotFoundError);
    }
    SUBCASE("invalid classifications never reach the journal") {
        auto broken = cash;
        broken.selections["technology"] = Selection{{"quantum"}, std::nullopt};
        CHECK_THROWS_AS(store.add(broken), ValidationFailure);
        CHECK(store.size() == 0);
        std::ifstream journal(dir.path / "journal.jsonl");
        CHECK(journal.peek() == std::ifstream::traits_type::eof());
    }
    SUBCASE("entries are ordered by creation time, then id") {
        std::vector<std::string> ids;
        for (const auto& c : fixture_classifications()) ids.push_back(store.add(c).text);
        const auto listed = store.entries();
        REQUIRE(listed.size() == ids.size());
        for (std::size_t i = 1; i < listed.size(); ++i) {
            const auto& prev = listed[i - 1];
            const auto& next = listed[i];
            CHECK(std::tie(prev.created_at, prev.id.text) <=
                  std::tie(next.created_at, next.id.text));
        }
        CHECK(listed[0].created_at <= listed[0].updated_at);
    }
}

TEST_CASE("persistence across handles") {
    TempDir dir("persist");
    std::string cash_id, kitties_id;
    {
        auto store = open_rw(dir.path);
        cash_id = store.add(*fixture_classification("cash")).text;
        kitties_id = store.add(*fixture_classification("cryptokitties")).text;
        auto renamed = *fixture_classification("cash");
        renamed.asset_name = "Cash v2";
        store.update(cash_id, renamed);
    }
    {
        auto store = open_rw(dir.path);
        REQUIRE(store.size() == 2);
        CHECK(store.get(cash_id).asset_name == "Cash v2");
        CHECK(store.get(kitties_id).asset_name == "CryptoKitties");
        store.remove(kitties_id);
    }
    {
        auto store = RegistryStore::open(dir.path, builtin_taxonomy(),
                                         RegistryStore::OpenMode::read_only);
        CHECK(store.size() == 1);
        CHECK_FALSE(store.contains(kitties_id));
    }
}

TEST_CASE("the journal is the source of truth") {
    TempDir dir("journal");
    std::string id;
    {
        auto store = open_rw(dir.path);
        id = store.add(*fixture_classification("ether")).text;
    }
    SUBCASE("journal lines are compact single-line records") {
        std::ifstream journal(dir.path / "journal.jsonl");
        std::string line, extra;
        REQUIRE(std::getline(journal, line));
        CHECK_FALSE(std::getline(journal, extra));  // exactly one record so far

        const auto record = nlohmann::json::parse(line);
        CHECK(record.at("op") == "add");
        CHECK(record.at("id") == id);
        CHECK(record.at("doc").at("asset_name") == "Ether");
        CHECK(record.dump() == line);  // compact form, sorted keys
        // ISO-8601 UTC with millisecond precision, e.g. 2026-08-18T09:15:02.417Z
        const std::string ts = record.at("ts");
        REQUIRE(ts.size() == 24);
        CHECK(ts[4] == '-');
        CHECK(ts[10] == 'T');
        CHECK(ts[19] == '.');
        CHECK(ts.back() == 'Z');
    }
    SUBCASE("a deleted index is rebuilt from the journal") {
        fs::remove(dir.path / "index.json");
        auto store = open_rw(dir.path);
        CHECK(store.size() == 1);
        CHECK(store.get(id).asset_name == "Ether");
        CHECK(fs::exists(dir.path / "index.json"));  // rewritten on open
    }
    SUBCASE("a stale or corrupt index is ignored") {
        std::ofstream(dir.path / "index.json", std::ios::trunc) << "not json";
        auto store = open_rw(dir.path);
        CHECK(store.size() == 1);
    }
    SUBCASE("journal corruption is reported with its line number") {
        std::ofstream(dir.path / "journal.jsonl", std::ios::app) << "{broken\n";
        CHECK_THROWS_WITH_AS(open_rw(dir.path), doctest::Contains("journal.jsonl:2"), StoreError);
    }
    SUBCASE("journal replay rejects semantic nonsense with line numbers") {
        std::ofstream(dir.path / "journal.jsonl", std::ios::app)
            << R"({"op":"remove","id":"AAAAAAAA8","ts":"2026-01-01T00:00:00.000Z"})"
            << "\n";
        CHECK_THROWS_WITH_AS(open_rw(dir.path), doctest::Contains("journal.jsonl:2"), StoreError);
    }
}

TEST_CASE("queries") {
    TempDir dir("query");
    auto store = open_rw(dir.path);
    std::map<std::string, std::string> name_to_id;
    for (const auto& c : fixture_classifications()) name_to_id[c.asset_name] = store.add(c).text;

    SUBCASE("single predicate narrows to the non-fungible asset") {
        const auto hits = store.query({{"fungibility", "non_fungible"}});
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].first == name_to_id["CryptoKitties"]);
        CHECK(hits[0].second == "CryptoKitties");
    }
    SUBCASE("regulated assets, ordered like entries()") {
        const auto hits = store.query({{"legal_status", "regulated"}});
        REQUIRE(hits.size() == 3);
        std::set<std::string> names;
        for (const auto& hit : hits) names.insert(hit.second);
        CHECK(names == std::set<std::string>{"Cash", "Crowdlitoken", "Traditional share"});
        // Query order must be the entries() order (created-at, then id),
        // restricted to the matching subset.
        std::vector<std::pair<std::string, std::string>> expected;
        for (const auto& entry : store.entries()) {
            const auto it = entry.classification.selections.find("legal_status");
            if (it != entry.classification.selections.end() &&
                it->second.characteristic_ids.contains("regulated"))
                expected.emplace_back(entry.id.text, entry.classification.asset_name);
        }
        CHECK(hits == expected);
    }
    SUBCASE("empty predicate list matches everything") {
        CHECK(store.query({}).size() == 6);
    }
    SUBCASE("conjunction only narrows (monotone)") {
        const auto broad = store.query({{"technology", "dlt"}});
        const auto narrow = store.query({{"technology", "dlt"}, {"fungibility", "fungible"}});
        CHECK(broad.size() == 4);
        CHECK(narrow.size() == 3);  // cryptokitties drops out
        for (const auto& hit : narrow)
            CHECK(std::find(broad.begin(), broad.end(), hit) != broad.end());
    }
    SUBCASE("matching is contains-based for multi-selects") {
        const auto hits = store.query({{"technology", "physical"}});
        REQUIRE(hits.size() == 2);  // cash and the (physical+digital) share
        std::set<std::string> names;
        for (const auto& hit : hits) names.insert(hit.second);
        CHECK(names == std::set<std::string>{"Cash", "Traditional share"});
    }
    SUBCASE("unset attributes never match") {
        const auto hits = store.query({{"claim_structure", "no_claim"}});
        CHECK(hits.size() == 3);  // bitcoin, ether, cryptokitties — not cash (unset)
    }
    SUBCASE("predicates must resolve against the taxonomy") {
        CHECK_THROWS_AS(store.query({{"color", "red"}}), NotFoundError);
        CHECK_THROWS_AS(store.query({{"technology", "quantum"}}), NotFoundError);
    }
}

TEST_CASE("writer lock") {
    TempDir dir("lock");
    SUBCASE("a second writer times out while the first holds the lock") {
        auto first = open_rw(dir.path);
        CHECK_THROWS_AS(RegistryStore::open(dir.path, builtin_taxonomy(),
                                            RegistryStore::OpenMode::read_write,
                                            std::chrono::milliseconds(100)),
                        LockTimeoutError);
    }
    SUBCASE("readers are never blocked") {
        auto writer = open_rw(dir.path);
        writer.add(*fixture_classification("cash"));
        auto reader = RegistryStore::open(dir.path, builtin_taxonomy(),
                                          RegistryStore::OpenMode::read_only);
        CHECK(reader.size() == 1);
    }
    SUBCASE("the lock releases with the handle") {
        { auto first = open_rw(dir.path); }
        CHECK_NOTHROW(open_rw(dir.path));
    }
}

TEST_CASE("mode and path errors") {
    SUBCASE("read-only handles refuse writes") {
        TempDir dir("readonly");
        { open_rw(dir.path); }  // create the store
        auto store = RegistryStore::open(dir.path, builtin_taxonomy(),
                                         RegistryStore::OpenMode::read_only);
        CHECK_THROWS_AS(store.add(*fixture_classification("cash")), StoreError);
        CHECK_THROWS_AS(store.remove("AAAAAAAA8"), StoreError);
    }
    SUBCASE("read-only open of a missing directory fails") {
        CHECK_THROWS_AS(RegistryStore::open("/nonexistent/taxo-store", builtin_taxonomy(),
                                            RegistryStore::OpenMode::read_only),
                        StoreError);
    }
    SUBCASE("read-write open creates the directory") {
        TempDir dir("create");
        auto store = open_rw(dir.path / "nested" / "store");
        CHECK(fs::is_directory(dir.path / "nested" / "store"));
        CHECK(store.size() == 0);
    }
}
