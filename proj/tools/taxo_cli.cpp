// taxo — command-line front end for the taxonomy library.
//
// Exit codes: 0 success; 1 semantic failures (validation errors, bad
// compact codes, unknown ids); 2 usage mistakes, unreadable or malformed
// files, lock timeouts and store faults. Payload goes to stdout,
// diagnostics to stderr; --json switches every payload to a single JSON
// document.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "taxo/analysis.hpp"
#include "taxo/classification.hpp"
#include "taxo/codec.hpp"
#include "taxo/registry.hpp"
#include "taxo/render.hpp"
#include "taxo/taxonomy.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Global {
    bool json_output = false;
    bool color = false;
    std::string taxonomy_path;
    std::optional<taxo::Taxonomy> custom_taxonomy;
    int exit_code = 0;

    const taxo::Taxonomy& taxonomy();
    bool colorize() const { return color && ::isatty(STDOUT_FILENO); }
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw taxo::Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw taxo::Error("cannot write " + path.string());
}

const taxo::Taxonomy& Global::taxonomy() {
    if (taxonomy_path.empty()) return taxo::builtin_taxonomy();
    if (!custom_taxonomy) custom_taxonomy = taxo::parse_taxonomy(read_file(taxonomy_path));
    return *custom_taxonomy;
}

taxo::AssetClassification load_classification(const fs::path& path) {
    return taxo::parse_classification(read_file(path));
}

void emit(const std::string& payload) { std::cout << payload; }

void emit_json(const json& doc) { std::cout << doc.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// validate

void run_validate(Global& g, const std::string& file, bool strict) {
    const auto mode = strict ? taxo::ValidationMode::strict : taxo::ValidationMode::partial;
    const auto c = load_classification(file);
    const auto report = taxo::validate_classification(g.taxonomy(), c, mode);
    g.exit_code = report.is_valid() ? 0 : 1;

    if (g.json_output) {
        json doc;
        doc["asset_name"] = c.asset_name;
        doc["mode"] = strict ? "strict" : "partial";
        doc["valid"] = report.is_valid();
        json errors = json::array();
        for (const auto& e : report.errors)
            errors.push_back({{"code", e.code}, {"attribute", e.attribute_id}, {"message", e.message}});
        doc["errors"] = std::move(errors);
        json lints = json::array();
        for (const auto& f : report.lint_findings)
            lints.push_back({{"rule", f.rule_id},
                             {"attributes", f.attributes_involved},
                             {"message", f.message}});
        doc["lints"] = std::move(lints);
        emit_json(doc);
        return;
    }

    const char* red = g.colorize() ? "\033[31m" : "";
    const char* yellow = g.colorize() ? "\033[33m" : "";
    const char* reset = g.colorize() ? "\033[0m" : "";
    std::ostringstream os;
    os << "asset: " << c.asset_name << "\n";
    os << "mode: " << (strict ? "strict" : "partial") << "\n";
    os << (report.errors.empty() ? "" : red) << "errors: " << report.errors.size()
       << (report.errors.empty() ? "" : reset) << "\n";
    for (const auto& e : report.errors) {
        os << "  [" << e.code << "]";
        if (!e.attribute_id.empty()) os << " " << e.attribute_id << ":";
        os << " " << e.message << "\n";
    }
    os << (report.lint_findings.empty() ? "" : yellow) << "lints: " << report.lint_findings.size()
       << (report.lint_findings.empty() ? "" : reset) << "\n";
    for (const auto& f : report.lint_findings) {
        os << "  [" << f.rule_id << "]";
        const char* sep = " ";
        for (const auto& a : f.attributes_involved) {
            os << sep << a;
            sep = "+";
        }
        os << ": " << f.message << "\n";
    }
    emit(os.str());
}

// ---------------------------------------------------------------------------
// encode / decode

void run_encode(Global& g, const std::string& file) {
    const auto code = taxo::encode(g.taxonomy(), load_classification(file));
    if (g.json_output)
        emit_json(json{{"code", code.text}});
    else
        emit(code.text + "\n");
}

void run_decode(Global& g, const std::string& code) {
    const auto c = taxo::decode(g.taxonomy(), code);
    emit(taxo::serialize_classification(g.taxonomy(), c));
}

// ---------------------------------------------------------------------------
// diff

void run_diff(Global& g, const std::string& left_file, const std::string& right_file,
              const std::string& basis_name) {
    const auto& t = g.taxonomy();
    const auto left = load_classification(left_file);
    const auto right = load_classification(right_file);
    const auto basis = basis_name == "all" ? taxo::SimilarityBasis::all_attributes
                                           : taxo::SimilarityBasis::determined_only;
    const auto report = taxo::diff(t, left, right);
    const auto score = taxo::similarity(t, left, right, basis);

    if (g.json_output) {
        emit(taxo::format_diff_json(t, report, score));
        return;
    }
    std::ostringstream os;
    os << "left: " << left.asset_name << "\n";
    os << "right: " << right.asset_name << "\n";
    os << taxo::format_diff_text(t, report, score);
    emit(os.str());
}

// ---------------------------------------------------------------------------
// render

void run_render(Global& g, const std::vector<std::string>& overlay_files,
                const std::string& format_name, const std::string& out_path) {
    taxo::RenderSpec spec;
    spec.taxonomy = g.taxonomy();
    spec.format = format_name == "svg" ? taxo::RenderFormat::svg : taxo::RenderFormat::text;
    for (std::size_t i = 0; i < overlay_files.size(); ++i) {
        taxo::RenderOverlay overlay;
        overlay.classification = load_classification(overlay_files[i]);
        overlay.fill = taxo::kDefaultOverlayFills[i];
        spec.overlays.push_back(std::move(overlay));
    }
    const std::string content = taxo::render(spec);

    if (!out_path.empty()) {
        write_file(out_path, content);
        if (g.json_output)
            emit_json(json{{"out", out_path}, {"bytes", content.size()}});
        else
            std::cerr << "wrote " << out_path << " (" << content.size() << " bytes)\n";
        return;
    }
    if (g.json_output)
        emit_json(json{{"format", format_name}, {"content", content}});
    else
        emit(content);
}

// ---------------------------------------------------------------------------
// coverage

void run_coverage(Global& g, bool counts, const std::string& framework_id,
                  const std::string& file) {
    const auto& matrix = taxo::builtin_coverage_matrix();
    if (counts == !framework_id.empty())
        throw taxo::Error("coverage: pass exactly one of --counts or --framework <id> <file>");

    if (counts) {
        const auto tally = taxo::coverage_counts(matrix);
        if (g.json_output) {
            emit_json(json{{"per_framework", tally.per_framework},
                           {"per_attribute", tally.per_attribute}});
            return;
        }
        std::ostringstream os;
        os << "per framework:\n";
        for (const auto& f : matrix.frameworks)
            os << "  " << f.id << ": " << tally.per_framework.at(f.id) << "  (" << f.citation_label
               << ")\n";
        os << "per attribute:\n";
        for (const auto& attr : g.taxonomy().attributes) {
            const auto it = tally.per_attribute.find(attr.id);
            os << "  " << attr.id << ": " << (it == tally.per_attribute.end() ? 0 : it->second)
               << "\n";
        }
        emit(os.str());
        return;
    }

    if (file.empty()) throw taxo::Error("coverage --framework needs a classification file");
    const auto c = load_classification(file);
    taxo::require_valid(g.taxonomy(), c, taxo::ValidationMode::partial);
    const auto split = taxo::framework_coverage(matrix, framework_id, c);
    if (g.json_output) {
        emit_json(json{{"framework", framework_id},
                       {"covered", split.covered},
                       {"dropped", split.dropped}});
        return;
    }
    auto join = [&g](const std::set<std::string>& ids) {
        std::string out;
        for (const auto& attr : g.taxonomy().attributes) {
            if (!ids.contains(attr.id)) continue;
            if (!out.empty()) out += ", ";
            out += attr.id;
        }
        return out.empty() ? std::string("(none)") : out;
    };
    std::ostringstream os;
    const auto* fw = matrix.find_framework(framework_id);
    os << "framework: " << fw->id << " (" << fw->citation_label << ")\n";
    os << "asset: " << c.asset_name << "\n";
    os << "covered (" << split.covered.size() << "): " << join(split.covered) << "\n";
    os << "dropped (" << split.dropped.size() << "): " << join(split.dropped) << "\n";
    emit(os.str());
}

// ---------------------------------------------------------------------------
// registry

taxo::RegistryStore open_store(Global& g, const std::string& dir,
                               taxo::RegistryStore::OpenMode mode) {
    if (dir.empty())
        throw taxo::Error("no store directory: pass --store <dir> or set TAXO_STORE");
    return taxo::RegistryStore::open(dir, g.taxonomy(), mode);
}

void run_registry_add(Global& g, const std::string& dir, const std::string& file) {
    auto store = open_store(g, dir, taxo::RegistryStore::OpenMode::read_write);
    const auto id = store.add(load_classification(file));
    if (g.json_output)
        emit_json(json{{"id", id.text}});
    else
        emit(id.text + "\n");
}

void run_registry_get(Global& g, const std::string& dir, const std::string& id) {
    auto store = open_store(g, dir, taxo::RegistryStore::OpenMode::read_only);
    emit(taxo::serialize_classification(g.taxonomy(), store.get(id)));
}

void run_registry_update(Global& g, const std::string& dir, const std::string& id,
                         const std::string& file) {
    auto store = open_store(g, dir, taxo::RegistryStore::OpenMode::read_write);
    store.update(id, load_classification(file));
    if (g.json_output)
        emit_json(json{{"id", id}, {"op", "update"}});
    else
        emit("updated " + id + "\n");
}

void run_registry_remove(Global& g, const std::string& dir, const std::string& id) {
    auto store = open_store(g, dir, taxo::RegistryStore::OpenMode::read_write);
    store.remove(id);
    if (g.json_output)
        emit_json(json{{"id", id}, {"op", "remove"}});
    else
        emit("removed " + id + "\n");
}

void run_registry_query(Global& g, const std::string& dir,
                        const std::vector<std::string>& where) {
    std::vector<taxo::QueryPredicate> predicates;
    for (const auto& term : where) {
        const auto eq = term.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == term.size())
            throw taxo::Error("--where expects attribute=characteristic, got \"" + term + "\"");
        predicates.push_back({term.substr(0, eq), term.substr(eq + 1)});
    }
    auto store = open_store(g, dir, taxo::RegistryStore::OpenMode::read_only);
    const auto hits = store.query(predicates);
    if (g.json_output) {
        json arr = json::array();
        for (const auto& [id, name] : hits) arr.push_back({{"id", id}, {"asset_name", name}});
        emit_json(arr);
        return;
    }
    std::ostringstream os;
    for (const auto& [id, name] : hits) os << id << "  " << name << "\n";
    emit(os.str());
}

// ---------------------------------------------------------------------------
// fixtures

void run_fixtures_export(Global& g, const std::string& dir) {
    const auto& t = taxo::builtin_taxonomy();  // the corpus is built-in-only
    fs::create_directories(dir);
    std::vector<std::string> written;
    const auto& names = taxo::fixture_names();
    const auto& corpus = taxo::fixture_classifications();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const fs::path path = fs::path(dir) / (names[i] + ".json");
        write_file(path, taxo::serialize_classification(t, corpus[i]));
        written.push_back(path.string());
    }
    if (g.json_output) {
        emit_json(json{{"written", written}});
    } else {
        std::ostringstream os;
        for (const auto& path : written) os << path << "\n";
        emit(os.str());
    }
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    Global g;
    CLI::App app{"Morphological-box taxonomy toolkit: classify, encode, compare, register"};
    app.require_subcommand(1);
    app.add_flag("--json", g.json_output, "emit JSON payloads on stdout");
    app.add_flag("--color", g.color, "colorize human output (TTY only)");
    app.add_option("--taxonomy", g.taxonomy_path, "taxonomy document replacing the built-in");

    auto add_sub = [&app](const std::string& name, const std::string& desc) {
        auto* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        return sub;
    };

    // validate
    std::string validate_file;
    bool validate_strict = false;
    auto* validate = add_sub("validate", "check a classification document");
    validate->add_option("file", validate_file, "classification document")->required();
    validate->add_flag("--strict", validate_strict, "require every attribute to be set");
    validate->callback([&] { run_validate(g, validate_file, validate_strict); });

    // encode / decode
    std::string encode_file;
    auto* encode = add_sub("encode", "print a classification's compact code");
    encode->add_option("file", encode_file, "classification document")->required();
    encode->callback([&] { run_encode(g, encode_file); });

    std::string decode_code;
    auto* decode = add_sub("decode", "expand a compact code into a document");
    decode->add_option("code", decode_code, "compact code")->required();
    decode->callback([&] { run_decode(g, decode_code); });

    // diff
    std::string diff_left, diff_right, diff_basis = "determined";
    auto* diff = add_sub("diff", "compare two classification documents");
    diff->add_option("left", diff_left, "first document")->required();
    diff->add_option("right", diff_right, "second document")->required();
    diff->add_option("--similarity", diff_basis, "score basis")
        ->check(CLI::IsMember({"determined", "all"}));
    diff->callback([&] { run_diff(g, diff_left, diff_right, diff_basis); });

    // render
    std::vector<std::string> render_overlays;
    std::string render_format = "text", render_out;
    auto* render = add_sub("render", "draw the morphological box");
    render->add_option("overlays", render_overlays, "0-2 classification documents")
        ->expected(0, 2);
    render->add_option("--format", render_format, "output format")
        ->check(CLI::IsMember({"text", "svg"}));
    render->add_option("--out", render_out, "write to a file instead of stdout");
    render->callback([&] { run_render(g, render_overlays, render_format, render_out); });

    // coverage
    bool coverage_counts = false;
    std::string coverage_framework, coverage_file;
    auto* coverage = add_sub("coverage", "framework coverage of the attribute set");
    coverage->add_flag("--counts", coverage_counts, "print the full coverage tally");
    coverage->add_option("--framework", coverage_framework, "framework id");
    coverage->add_option("file", coverage_file, "classification document");
    coverage->callback([&] { run_coverage(g, coverage_counts, coverage_framework, coverage_file); });

    // registry
    std::string store_dir;
    auto* registry = add_sub("registry", "file-backed store of classified assets");
    registry->require_subcommand(1);
    registry->add_option("--store", store_dir, "store directory")->envname("TAXO_STORE");

    std::string reg_add_file;
    auto* reg_add = registry->add_subcommand("add", "register a classification");
    reg_add->fallthrough();
    reg_add->add_option("file", reg_add_file, "classification document")->required();
    reg_add->callback([&] { run_registry_add(g, store_dir, reg_add_file); });

    std::string reg_get_id;
    auto* reg_get = registry->add_subcommand("get", "print a stored classification");
    reg_get->fallthrough();
    reg_get->add_option("id", reg_get_id, "asset id")->required();
    reg_get->callback([&] { run_registry_get(g, store_dir, reg_get_id); });

    std::string reg_update_id, reg_update_file;
    auto* reg_update = registry->add_subcommand("update", "replace a stored classification");
    reg_update->fallthrough();
    reg_update->add_option("id", reg_update_id, "asset id")->required();
    reg_update->add_option("file", reg_update_file, "classification document")->required();
    reg_update->callback([&] { run_registry_update(g, store_dir, reg_update_id, reg_update_file); });

    std::string reg_remove_id;
    auto* reg_remove = registry->add_subcommand("remove", "drop a stored classification");
    reg_remove->fallthrough();
    reg_remove->add_option("id", reg_remove_id, "asset id")->required();
    reg_remove->callback([&] { run_registry_remove(g, store_dir, reg_remove_id); });

    std::vector<std::string> reg_where;
    auto* reg_query = registry->add_subcommand("query", "list entries matching predicates");
    reg_query->fallthrough();
    reg_query->add_option("--where", reg_where, "attribute=characteristic (repeatable)");
    reg_query->callback([&] { run_registry_query(g, store_dir, reg_where); });

    // fixtures
    std::string fixtures_dir;
    auto* fixtures = add_sub("fixtures", "the reference asset corpus");
    fixtures->require_subcommand(1);
    auto* fixtures_export = fixtures->add_subcommand("export", "write the corpus documents");
    fixtures_export->fallthrough();
    fixtures_export->add_option("dir", fixtures_dir, "target directory")->required();
    fixtures_export->callback([&] { run_fixtures_export(g, fixtures_dir); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return g.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const taxo::ValidationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const taxo::CodecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const taxo::NotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
