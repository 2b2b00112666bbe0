#include "mathgen/catalog.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mathgen/hash.hpp"

namespace mathgen {

namespace {

constexpr std::size_t kExpectedTotal = 200;
constexpr std::size_t kExpectedPerCategory = 20;
constexpr std::size_t kExpectedCategories = 10;

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

const Direction& Catalog::by_id(int id) const {
    if (id >= 1 && static_cast<std::size_t>(id) <= directions.size()) {
        const Direction& d = directions[static_cast<std::size_t>(id) - 1];
        if (d.id == id) return d;
    }
    for (const Direction& d : directions) {
        if (d.id == id) return d;
    }
    throw UnknownDirection("unknown direction id " + std::to_string(id));
}

std::vector<std::string> Catalog::categories() const {
    std::vector<std::string> out;
    for (const Direction& d : directions) {
        if (out.empty() || out.back() != d.category) {
            bool seen = false;
            for (const std::string& c : out) {
                if (c == d.category) {
                    seen = true;
                    break;
                }
            }
            if (!seen) out.push_back(d.category);
        }
    }
    return out;
}

std::string canonical_catalog_serialization(const Catalog& catalog) {
    std::string out;
    for (const Direction& d : catalog.directions) {
        out += std::to_string(d.id);
        out += '\t';
        out += d.category;
        out += '\t';
        out += d.title;
        out += '\n';
    }
    return out;
}

Catalog load_catalog(std::istream& source) {
    Catalog catalog;
    std::set<int> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos ||
            line.find('\t', t2 + 1) != std::string::npos) {
            throw MalformedCatalog("line " + std::to_string(line_no) +
                                   ": expected id<TAB>category<TAB>title");
        }

        Direction d;
        const std::string id_field = trim(line.substr(0, t1));
        auto [ptr, ec] = std::from_chars(id_field.data(), id_field.data() + id_field.size(), d.id);
        if (ec != std::errc{} || ptr != id_field.data() + id_field.size() || d.id < 1) {
            throw MalformedCatalog("line " + std::to_string(line_no) + ": bad id '" + id_field + "'");
        }
        d.category = trim(line.substr(t1 + 1, t2 - t1 - 1));
        d.title = trim(line.substr(t2 + 1));
        if (d.category.empty() || d.title.empty()) {
            throw MalformedCatalog("line " + std::to_string(line_no) + ": empty category or title");
        }

        if (!seen_ids.insert(d.id).second) {
            throw DuplicateId("duplicate direction id " + std::to_string(d.id));
        }
        catalog.directions.push_back(std::move(d));
    }

    if (catalog.directions.size() != kExpectedTotal) {
        throw CountMismatch("expected " + std::to_string(kExpectedTotal) + " directions, found " +
                            std::to_string(catalog.directions.size()));
    }
    for (std::size_t i = 0; i < catalog.directions.size(); ++i) {
        if (catalog.directions[i].id != static_cast<int>(i) + 1) {
            throw MalformedCatalog("ids must be contiguous 1.." + std::to_string(kExpectedTotal) +
                                   " in order; found " + std::to_string(catalog.directions[i].id) +
                                   " at position " + std::to_string(i + 1));
        }
    }

    std::map<std::string, std::size_t> per_category;
    for (const Direction& d : catalog.directions) ++per_category[d.category];
    if (per_category.size() != kExpectedCategories) {
        throw CountMismatch("expected " + std::to_string(kExpectedCategories) +
                            " categories, found " + std::to_string(per_category.size()));
    }
    for (const auto& [category, count] : per_category) {
        if (count != kExpectedPerCategory) {
            throw CountMismatch("category '" + category + "' has " + std::to_string(count) +
                                " directions, expected " + std::to_string(kExpectedPerCategory));
        }
    }

    catalog.checksum = content_hash(canonical_catalog_serialization(catalog));
    return catalog;
}

Catalog load_catalog_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedCatalog("cannot open catalog file: " + path.string());
    return load_catalog(in);
}

std::filesystem::path default_catalog_path() {
#ifdef MATHGEN_DEFAULT_CATALOG
    return std::filesystem::path(MATHGEN_DEFAULT_CATALOG);
#else
    return std::filesystem::path("data") / "directions.tsv";
#endif
}

}  // namespace mathgen
