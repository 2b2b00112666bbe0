#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mathgen {

struct Direction {
    int id = 0;
    std::string category;
    std::string title;
};

// The research-direction catalog: 200 directions, 20 per category, ids
// contiguous 1..200 in file order. Immutable after load.
struct Catalog {
    std::vector<Direction> directions;
    std::string checksum;  // content hash of the canonical serialization

    const Direction& by_id(int id) const;      // throws UnknownDirection
    std::vector<std::string> categories() const;  // in first-seen order
};

class CatalogError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class MalformedCatalog : public CatalogError {
    using CatalogError::CatalogError;
};
class CountMismatch : public CatalogError {
    using CatalogError::CatalogError;
};
class DuplicateId : public CatalogError {
    using CatalogError::CatalogError;
};
class UnknownDirection : public CatalogError {
    using CatalogError::CatalogError;
};

// Catalog file format: one direction per line, "id<TAB>category<TAB>title",
// UTF-8, ids ascending.
Catalog load_catalog(std::istream& source);
Catalog load_catalog_file(const std::filesystem::path& path);

std::string canonical_catalog_serialization(const Catalog& catalog);

// The catalog file shipped with the repository.
std::filesystem::path default_catalog_path();

}  // namespace mathgen
