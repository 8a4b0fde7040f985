#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "taxo/classification.hpp"
#include "taxo/taxonomy.hpp"

namespace taxo {

/// Nine-character asset identifier: 8 base-36 characters plus one check
/// character, the base-36 digit of the sum of the 8 character values
/// mod 36. Uppercase canonical form.
struct AssetId {
    std::string text;

    friend bool operator==(const AssetId&, const AssetId&) = default;
    friend auto operator<=>(const AssetId&, const AssetId&) = default;
};

inline constexpr std::size_t kAssetIdBodyLength = 8;
inline constexpr std::size_t kAssetIdLength = 9;

/// Check character for an 8-character base-36 body. Throws Error if the
/// body is not exactly 8 base-36 characters.
char asset_id_check_char(const std::string& body);

/// True iff `text` is a well-formed id whose check character verifies.
bool verify_asset_id(const std::string& text);

/// Draws a random well-formed id from `rng`.
AssetId mint_asset_id(std::mt19937_64& rng);

struct RegistryEntry {
    AssetId id;
    AssetClassification classification;
    std::string created_at;  ///< ISO-8601 UTC, e.g. "2026-08-18T09:15:02.417Z"
    std::string updated_at;
};

/// One conjunction term: the attribute must be set and its selection must
/// contain the characteristic.
struct QueryPredicate {
    std::string attribute_id;
    std::string characteristic_id;
};

/// File-backed store of classified assets. Layout: <dir>/journal.jsonl
/// (append-only source of truth), <dir>/index.json (rebuildable snapshot),
/// <dir>/.lock (advisory writer lock). Single writer per directory,
/// enforced via flock on .lock held for the handle's lifetime; readers
/// take no lock and see the journal as of open(). Handles are not
/// shareable across threads — open one per thread.
class RegistryStore {
public:
    enum class OpenMode { read_only, read_write };

    /// Opens (creating, in read_write mode) a store directory. Every
    /// stored document must classify against `taxonomy`. Throws
    /// LockTimeoutError when another writer holds the lock, StoreError on
    /// a malformed journal (message carries the line number).
    static RegistryStore open(const std::filesystem::path& dir, const Taxonomy& taxonomy,
                              OpenMode mode = OpenMode::read_write,
                              std::chrono::milliseconds lock_timeout = std::chrono::milliseconds(5000));

    RegistryStore(RegistryStore&&) noexcept;
    RegistryStore& operator=(RegistryStore&&) noexcept;
    RegistryStore(const RegistryStore&) = delete;
    RegistryStore& operator=(const RegistryStore&) = delete;
    ~RegistryStore();

    /// Validates (partial mode), mints a fresh id, appends to the journal
    /// and rewrites the index. The entry is durable once this returns.
    AssetId add(const AssetClassification& c);

    /// The stored classification, with asset_id filled in.
    AssetClassification get(const std::string& id) const;

    void update(const std::string& id, const AssetClassification& c);
    void remove(const std::string& id);

    bool contains(const std::string& id) const;
    std::size_t size() const;

    /// All entries ordered by created-at, then id.
    std::vector<RegistryEntry> entries() const;

    /// (id, asset_name) of every entry matching all predicates, ordered by
    /// created-at then id. An empty predicate list matches everything.
    /// Throws NotFoundError when a predicate id does not resolve against
    /// the taxonomy.
    std::vector<std::pair<std::string, std::string>> query(
        const std::vector<QueryPredicate>& predicates) const;

    const std::filesystem::path& directory() const;

private:
    RegistryStore();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace taxo
