#include "taxo/registry.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "json_strict.hpp"
#include "taxo/codec.hpp"

namespace taxo {

// ---------------------------------------------------------------------------
// Asset identifiers

namespace {

constexpr char kBase36[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

int base36_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
    return -1;
}

}  // namespace

char asset_id_check_char(const std::string& body) {
    if (body.size() != kAssetIdBodyLength)
        throw Error("asset id body must be " + std::to_string(kAssetIdBodyLength) +
                    " characters, got " + std::to_string(body.size()));
    int sum = 0;
    for (char c : body) {
        const int v = base36_value(c);
        if (v < 0) throw Error(std::string("'") + c + "' is not a base-36 character");
        sum += v;
    }
    return kBase36[sum % 36];
}

bool verify_asset_id(const std::string& text) {
    if (text.size() != kAssetIdLength) return false;
    for (char c : text)
        if (base36_value(c) < 0) return false;
    return asset_id_check_char(text.substr(0, kAssetIdBodyLength)) == text.back();
}

AssetId mint_asset_id(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> digit(0, 35);
    std::string body;
    body.reserve(kAssetIdLength);
    for (std::size_t i = 0; i < kAssetIdBodyLength; ++i) body.push_back(kBase36[digit(rng)]);
    body.push_back(asset_id_check_char(body));
    return AssetId{std::move(body)};
}

// ---------------------------------------------------------------------------
// Store plumbing

namespace {

namespace fs = std::filesystem;
using detail::json;

std::string now_utc_iso8601() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
    const std::time_t secs = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms.count()));
    return buf;
}

// Count of journal appends in this process, for the crash-injection hook.
std::atomic<std::uint64_t> g_append_count{0};

// Test hook: when TAXO_CRASH_AFTER_JOURNAL_APPEND=k is set, the process
// dies (exit 86) right after its k-th durable journal append, before the
// index rewrite — simulating a crash in the recoverable window.
void maybe_crash_after_append() {
    static const char* setting = std::getenv("TAXO_CRASH_AFTER_JOURNAL_APPEND");
    if (!setting) return;
    const std::uint64_t k = std::strtoull(setting, nullptr, 10);
    if (k != 0 && g_append_count.fetch_add(1) + 1 == k) std::_Exit(86);
}

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            close_fd();
            fd_ = other.fd_;
            other.fd_ = -1;
        }
        return *this;
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { close_fd(); }

    int get() const { return fd_; }
    bool valid() const { return fd_ >= 0; }

private:
    void close_fd() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    int fd_ = -1;
};

json classification_to_json(const Taxonomy& t, const AssetClassification& c) {
    return detail::parse_document(serialize_classification(t, c));
}

AssetClassification classification_from_json(const json& doc) {
    return parse_classification(doc.dump());
}

}  // namespace

struct RegistryStore::Impl {
    fs::path dir;
    const Taxonomy* taxonomy = nullptr;
    OpenMode mode = OpenMode::read_write;
    Fd lock_fd;
    Fd journal_fd;
    std::map<std::string, RegistryEntry> entries;  // id text -> entry
    std::mt19937_64 rng{std::random_device{}()};

    fs::path journal_path() const { return dir / "journal.jsonl"; }
    fs::path index_path() const { return dir / "index.json"; }

    void require_writable() const {
        if (mode != OpenMode::read_write)
            throw StoreError("store at " + dir.string() + " is opened read-only");
    }

    const RegistryEntry& find(const std::string& id) const {
        auto it = entries.find(id);
        if (it == entries.end())
            throw NotFoundError("no entry \"" + id + "\" in store " + dir.string());
        return it->second;
    }

    void acquire_lock(std::chrono::milliseconds timeout) {
        Fd fd(::open((dir / ".lock").c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644));
        if (!fd.valid()) throw StoreError("cannot open lock file in " + dir.string());
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (::flock(fd.get(), LOCK_EX | LOCK_NB) != 0) {
            if (std::chrono::steady_clock::now() >= deadline)
                throw LockTimeoutError("another writer holds the lock on " + dir.string());
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        lock_fd = std::move(fd);
    }

    void replay_journal() {
        std::ifstream in(journal_path());
        if (!in.is_open()) return;  // fresh store
        std::string line;
        for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
            if (line.empty()) continue;
            try {
                apply_journal_line(line);
            } catch (const Error& e) {
                throw StoreError("journal.jsonl:" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    void apply_journal_line(const std::string& line) {
        const json rec = detail::parse_document(line);
        detail::require_object(rec, "record");
        detail::check_keys(rec, "record", {"op", "id", "ts"}, {"doc"});
        const std::string op = detail::get_string(rec, "op", "record");
        const std::string id = detail::get_string(rec, "id", "record");
        const std::string ts = detail::get_string(rec, "ts", "record");
        if (!verify_asset_id(id)) throw StoreError("invalid asset id \"" + id + "\"");

        if (op == "add" || op == "update") {
            if (!rec.contains("doc")) throw StoreError("\"" + op + "\" record without doc");
            AssetClassification c = classification_from_json(rec.at("doc"));
            require_valid(*taxonomy, c, ValidationMode::partial);
            c.asset_id = id;
            if (op == "add") {
                auto [it, fresh] = entries.emplace(id, RegistryEntry{AssetId{id}, c, ts, ts});
                if (!fresh) throw StoreError("duplicate add of \"" + id + "\"");
                (void)it;
            } else {
                auto it = entries.find(id);
                if (it == entries.end()) throw StoreError("update of unknown \"" + id + "\"");
                it->second.classification = std::move(c);
                it->second.updated_at = ts;
            }
        } else if (op == "remove") {
            if (entries.erase(id) == 0) throw StoreError("remove of unknown \"" + id + "\"");
        } else {
            throw StoreError("unknown op \"" + op + "\"");
        }
    }

    void open_journal_for_append() {
        Fd fd(::open(journal_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
        if (!fd.valid()) throw StoreError("cannot open journal in " + dir.string());
        journal_fd = std::move(fd);
    }

    void append_record(const std::string& op, const std::string& id, const std::string& ts,
                       const json* doc) {
        json rec;
        rec["op"] = op;
        rec["id"] = id;
        rec["ts"] = ts;
        if (doc) rec["doc"] = *doc;
        const std::string line = rec.dump() + "\n";
        ssize_t written = ::write(journal_fd.get(), line.data(), line.size());
        if (written != static_cast<ssize_t>(line.size()) || ::fsync(journal_fd.get()) != 0)
            throw StoreError("journal append failed in " + dir.string());
        maybe_crash_after_append();
    }

    // Rebuildable snapshot; the journal stays the source of truth.
    void rewrite_index() {
        json snapshot;
        snapshot["count"] = entries.size();
        json listing = json::object();
        for (const auto& [id, entry] : entries) {
            json item;
            item["asset_name"] = entry.classification.asset_name;
            item["created_at"] = entry.created_at;
            item["updated_at"] = entry.updated_at;
            listing[id] = std::move(item);
        }
        snapshot["entries"] = std::move(listing);

        const fs::path tmp = index_path().string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << detail::canonical_dump(snapshot);
            if (!out) throw StoreError("cannot write index in " + dir.string());
        }
        std::error_code ec;
        fs::rename(tmp, index_path(), ec);
        if (ec) throw StoreError("cannot replace index in " + dir.string() + ": " + ec.message());
    }

    std::vector<const RegistryEntry*> ordered() const {
        std::vector<const RegistryEntry*> out;
        out.reserve(entries.size());
        for (const auto& [_, entry] : entries) out.push_back(&entry);
        std::sort(out.begin(), out.end(), [](const RegistryEntry* a, const RegistryEntry* b) {
            return std::tie(a->created_at, a->id.text) < std::tie(b->created_at, b->id.text);
        });
        return out;
    }
};

RegistryStore::RegistryStore() : impl_(std::make_unique<Impl>()) {}
RegistryStore::RegistryStore(RegistryStore&&) noexcept = default;
RegistryStore& RegistryStore::operator=(RegistryStore&&) noexcept = default;
RegistryStore::~RegistryStore() = default;

RegistryStore RegistryStore::open(const std::filesystem::path& dir, const Taxonomy& taxonomy,
                                  OpenMode mode, std::chrono::milliseconds lock_timeout) {
    RegistryStore store;
    Impl& impl = *store.impl_;
    impl.dir = dir;
    impl.taxonomy = &taxonomy;
    impl.mode = mode;

    if (mode == OpenMode::read_write) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw StoreError("cannot create store directory " + dir.string());
        impl.acquire_lock(lock_timeout);
    } else if (!std::filesystem::is_directory(dir)) {
        throw StoreError("no store directory at " + dir.string());
    }

    impl.replay_journal();
    if (mode == OpenMode::read_write) {
        impl.open_journal_for_append();
        impl.rewrite_index();  // repairs an interrupted earlier write
    }
    return store;
}

AssetId RegistryStore::add(const AssetClassification& c) {
    Impl& impl = *impl_;
    impl.require_writable();
    require_valid(*impl.taxonomy, c, ValidationMode::partial);

    AssetId id = mint_asset_id(impl.rng);
    while (impl.entries.contains(id.text)) id = mint_asset_id(impl.rng);

    const std::string ts = now_utc_iso8601();
    const json doc = classification_to_json(*impl.taxonomy, c);
    impl.append_record("add", id.text, ts, &doc);

    RegistryEntry entry{id, c, ts, ts};
    entry.classification.asset_id = id.text;
    impl.entries.emplace(id.text, std::move(entry));
    impl.rewrite_index();
    return id;
}

AssetClassification RegistryStore::get(const std::string& id) const {
    return impl_->find(id).classification;
}

void RegistryStore::update(const std::string& id, const AssetClassification& c) {
    Impl& impl = *impl_;
    impl.require_writable();
    impl.find(id);  // not-found check first
    require_valid(*impl.taxonomy, c, ValidationMode::partial);

    const std::string ts = now_utc_iso8601();
    const json doc = classification_to_json(*impl.taxonomy, c);
    impl.append_record("update", id, ts, &doc);

    auto& entry = impl.entries.at(id);
    entry.classification = c;
    entry.classification.asset_id = id;
    entry.updated_at = ts;
    impl.rewrite_index();
}

void RegistryStore::remove(const std::string& id) {
    Impl& impl = *impl_;
    impl.require_writable();
    impl.find(id);

    impl.append_record("remove", id, now_utc_iso8601(), nullptr);
    impl.entries.erase(id);
    impl.rewrite_index();
}

bool RegistryStore::contains(const std::string& id) const {
    return impl_->entries.contains(id);
}

std::size_t RegistryStore::size() const { return impl_->entries.size(); }

std::vector<RegistryEntry> RegistryStore::entries() const {
    std::vector<RegistryEntry> out;
    for (const RegistryEntry* entry : impl_->ordered()) out.push_back(*entry);
    return out;
}

std::vector<std::pair<std::string, std::string>> RegistryStore::query(
    const std::vector<QueryPredicate>& predicates) const {
    const Impl& impl = *impl_;
    for (const auto& p : predicates) {
        const auto* attr = impl.taxonomy->find_attribute(p.attribute_id);
        if (!attr) throw NotFoundError("unknown attribute \"" + p.attribute_id + "\"");
        if (!attr->find_characteristic(p.characteristic_id))
            throw NotFoundError("unknown characteristic \"" + p.characteristic_id +
                                "\" for attribute \"" + p.attribute_id + "\"");
    }

    std::vector<std::pair<std::string, std::string>> out;
    for (const RegistryEntry* entry : impl.ordered()) {
        const bool matches = std::all_of(
            predicates.begin(), predicates.end(), [entry](const QueryPredicate& p) {
                auto sel = entry->classification.selections.find(p.attribute_id);
                return sel != entry->classification.selections.end() &&
                       sel->second.characteristic_ids.contains(p.characteristic_id);
            });
        if (matches) out.emplace_back(entry->id.text, entry->classification.asset_name);
    }
    return out;
}

const std::filesystem::path& RegistryStore::directory() const { return impl_->dir; }

}  // namespace taxo
