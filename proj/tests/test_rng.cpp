#include "tspec/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using tspec::Rng;
using tspec::derive_seed;

TEST_CASE("derived seeds depend on base, purpose and index")
{
    CHECK(derive_seed(1, "split") == derive_seed(1, "split"));
    CHECK(derive_seed(1, "split") != derive_seed(2, "split"));
    CHECK(derive_seed(1, "split") != derive_seed(1, "fill"));
    CHECK(derive_seed(1, "tree", 0) != derive_seed(1, "tree", 1));
    CHECK(derive_seed(1, "tree", 0) != derive_seed(1, "tree"));
}

TEST_CASE("same seed gives the same stream")
{
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next() == b.next());
}

TEST_CASE("uniform stays in [0, 1) and below stays in range")
{
    Rng rng(7);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const auto k = rng.below(5);
        REQUIRE(k < 5);
        ++hits[k];
    }
    for (int h : hits)
        CHECK(h == doctest::Approx(2000).epsilon(0.1));
}

TEST_CASE("normal draws have roughly unit moments")
{
    Rng rng(3);
    const int n = 50000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("shuffle permutes")
{
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    Rng rng(9);
    auto w = v;
    rng.shuffle(w.begin(), w.end());
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}
