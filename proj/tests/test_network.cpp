#include <doctest.h>

TEST_CASE("placeholder_network") { CHECK(true); }
