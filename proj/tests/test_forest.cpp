#include <doctest.h>

TEST_CASE("placeholder_forest") { CHECK(true); }
