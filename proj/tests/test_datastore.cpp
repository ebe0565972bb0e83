#include <doctest.h>

TEST_CASE("placeholder_datastore") { CHECK(true); }
