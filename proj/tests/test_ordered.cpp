#include <doctest.h>

TEST_CASE("placeholder_ordered") { CHECK(true); }
