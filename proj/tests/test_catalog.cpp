#include <doctest.h>

#include <sstream>

#include "mathgen/catalog.hpp"
#include "test_support.hpp"

using namespace mathgen;

namespace {

Catalog shipped() { return load_catalog_file(testsupport::source_path("data/directions.tsv")); }

}  // namespace

TEST_SUITE("catalog") {

TEST_CASE("shipped catalog satisfies all invariants") {
    const Catalog catalog = shipped();
    CHECK(catalog.directions.size() == 200);

    const auto categories = catalog.categories();
    REQUIRE(categories.size() == 10);
    for (const std::string& category : categories) {
        std::size_t count = 0;
        for (const Direction& d : catalog.directions) {
            if (d.category == category) ++count;
        }
        CHECK(count == 20);
    }
    for (std::size_t i = 0; i < catalog.directions.size(); ++i) {
        CHECK(catalog.directions[i].id == static_cast<int>(i) + 1);
        CHECK_FALSE(catalog.directions[i].title.empty());
    }
}

TEST_CASE("spot checks against the source list") {
    const Catalog catalog = shipped();
    CHECK(catalog.by_id(1).title ==
          "Existence and multiplicity of embedded minimal hyperspheres in $S^{n+1}$ with "
          "prescribed symmetries");
    CHECK(catalog.by_id(22).title ==
          "Harmonic maps from nonpositive curvature manifolds to positive curvature targets");
    CHECK(catalog.by_id(22).category == "Harmonic Maps and Their Generalizations");
    CHECK(catalog.by_id(41).title ==
          "Topological classification of manifolds with nonnegative sectional curvature and "
          "torus actions");
    CHECK(catalog.by_id(200).title ==
          "Infinite-dimensional Riemannian geometry and shape analysis applications");
}

TEST_CASE("category 4 holds ids 61..80") {
    const Catalog catalog = shipped();
    for (int id = 61; id <= 80; ++id) {
        CHECK(catalog.by_id(id).category == "Positive Sectional Curvature and Sphere Theorems");
    }
    CHECK(catalog.by_id(60).category != "Positive Sectional Curvature and Sphere Theorems");
    CHECK(catalog.by_id(81).category != "Positive Sectional Curvature and Sphere Theorems");
}

TEST_CASE("loading is deterministic") {
    const Catalog a = shipped();
    const Catalog b = shipped();
    CHECK(a.checksum == b.checksum);
    CHECK(canonical_catalog_serialization(a) == canonical_catalog_serialization(b));
}

TEST_CASE("a removed direction trips the count invariant") {
    std::string text = testsupport::read_file(testsupport::source_path("data/directions.tsv"));
    const std::size_t cut = text.rfind("200\t");
    text.erase(cut);
    std::istringstream in(text);
    CHECK_THROWS_AS(load_catalog(in), CountMismatch);
}

TEST_CASE("duplicate and malformed lines are rejected") {
    std::string text = testsupport::read_file(testsupport::source_path("data/directions.tsv"));

    SUBCASE("duplicated id") {
        std::istringstream in(text + "7\tHarmonic Maps and Their Generalizations\tAgain\n");
        CHECK_THROWS_AS(load_catalog(in), DuplicateId);
    }
    SUBCASE("missing field") {
        std::istringstream in(std::string("1\tonly-two-fields\n") + text);
        CHECK_THROWS_AS(load_catalog(in), MalformedCatalog);
    }
    SUBCASE("non-numeric id") {
        std::istringstream in(std::string("x\tCat\tTitle\n") + text);
        CHECK_THROWS_AS(load_catalog(in), MalformedCatalog);
    }
}

TEST_CASE("unknown direction ids") {
    const Catalog catalog = shipped();
    CHECK_THROWS_AS(catalog.by_id(0), UnknownDirection);
    CHECK_THROWS_AS(catalog.by_id(201), UnknownDirection);
    CHECK_THROWS_AS(catalog.by_id(-3), UnknownDirection);
}

TEST_CASE("missing file reports MalformedCatalog") {
    CHECK_THROWS_AS(load_catalog_file("/nonexistent/nowhere.tsv"), MalformedCatalog);
}

}
