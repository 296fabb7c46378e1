#include "doctest.h"
#include "property_suites.hpp"

TEST_SUITE("properties") {
  TEST_CASE("property suites, 1000 cases each") {
    for (const auto& suite : props::suites()) {
      SUBCASE(suite.name) {
        auto o = suite.run(20240601);
        INFO(suite.name, ": ", o.failure);
        CHECK(o.ok());
        CHECK(o.cases == props::kCases);
      }
    }
  }
}
