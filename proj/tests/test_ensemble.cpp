#include <doctest.h>

TEST_CASE("placeholder_ensemble") { CHECK(true); }
