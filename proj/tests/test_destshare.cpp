#include <doctest.h>

TEST_CASE("placeholder_destshare") { CHECK(true); }
