#include "tspec/error.hpp"
#include "tspec/rng.hpp"
#include "tspec/spectrum.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace tspec;

namespace {

// Independent oracle: sum over positions and components written out directly.
double sspe_oracle(const std::vector<std::uint8_t>& labels, int d)
{
    double total = 0.0;
    for (std::size_t pos = 0; pos < labels.size(); ++pos) {
        for (int j = 0; j < d; ++j) {
            const int i = j / 2;
            const double angle = static_cast<double>(pos) / std::pow(10000.0, 2.0 * i / d);
            const double pe = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
            total += labels[pos] * pe;
        }
    }
    return total;
}

}  // namespace

TEST_CASE("encoding dimension must be even and positive")
{
    CHECK_THROWS_AS(EncodingConfig(3), ConfigError);
    CHECK_THROWS_AS(EncodingConfig(0), ConfigError);
    CHECK_NOTHROW(EncodingConfig(236));
}

TEST_CASE("positional encoding values")
{
    const auto pe0 = positional_encoding(0, EncodingConfig(8));
    for (std::size_t j = 0; j < pe0.size(); ++j)
        CHECK(pe0[j] == (j % 2 == 0 ? 0.0 : 1.0));

    const auto pe1 = positional_encoding(1, EncodingConfig(2));
    CHECK(pe1[0] == doctest::Approx(0.841471).epsilon(1e-6));
    CHECK(pe1[1] == doctest::Approx(0.540302).epsilon(1e-6));

    for (int d : {2, 16, 256}) {
        const auto pe = positional_encoding(17, EncodingConfig(d));
        for (int i = 0; i < d / 2; ++i)
            CHECK(std::abs(pe[2 * i] * pe[2 * i] + pe[2 * i + 1] * pe[2 * i + 1] - 1.0) < 1e-12);
    }
}

TEST_CASE("coap counts attack packets")
{
    const std::vector<std::uint8_t> a{1, 0, 1, 1};
    CHECK(coap(a).value == 3.0);
    CHECK(coap(std::vector<std::uint8_t>(7, 0)).value == 0.0);
    CHECK(coap(std::vector<std::uint8_t>(7, 1)).value == 7.0);
}

TEST_CASE("sspe examples")
{
    const EncodingConfig d2(2);
    CHECK(sspe(std::vector<std::uint8_t>(5, 0), d2).value == 0.0);
    CHECK(sspe(std::vector<std::uint8_t>{1}, d2).value == doctest::Approx(1.0));
    const auto v = sspe(std::vector<std::uint8_t>{0, 1}, d2);
    CHECK(v.value == doctest::Approx(1.381773).epsilon(1e-6));
    CHECK(v.method == LabelMethod::Sspe);
    CHECK(v.d_model == 2);
}

TEST_CASE("sspe agrees with the brute-force oracle and the table")
{
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 10 + rng.below(51);
        const int d = 2 * static_cast<int>(1 + rng.below(128));
        std::vector<std::uint8_t> labels(len);
        for (auto& b : labels)
            b = rng.uniform() < 0.4 ? 1 : 0;
        const EncodingConfig cfg(d);
        const double want = sspe_oracle(labels, d);
        CHECK(std::abs(sspe(labels, cfg).value - want) < 1e-9);
        CHECK(std::abs(SspeTable(len, cfg)(labels) - want) < 1e-9);
    }
}

TEST_CASE("sspe is position sensitive where coap is not")
{
    const EncodingConfig cfg(8);
    const std::vector<std::uint8_t> early{1, 1, 0, 0, 0, 0};
    const std::vector<std::uint8_t> late{0, 0, 0, 0, 1, 1};
    CHECK(coap(early).value == coap(late).value);
    CHECK(sspe(early, cfg).value != doctest::Approx(sspe(late, cfg).value));
}

TEST_CASE("rank-default threshold")
{
    const std::vector<double> x{0, 0, 0, 5, 7};
    const auto t = compute_threshold(x, 2, ThresholdMode::RankDefault);
    CHECK(t.tau == 5.0);
    CHECK(binarize(x, t) == std::vector<std::uint8_t>{0, 0, 0, 1, 1});

    const auto none = compute_threshold(x, 0, ThresholdMode::RankDefault);
    CHECK(binarize(x, none) == std::vector<std::uint8_t>(5, 0));
    const auto all = compute_threshold(x, 5, ThresholdMode::RankDefault);
    CHECK(all.tau == 0.0);
    CHECK(binarize(x, all) == std::vector<std::uint8_t>(5, 1));

    CHECK_THROWS_AS(compute_threshold(x, 6, ThresholdMode::RankDefault), ConfigError);
    CHECK_THROWS_AS(compute_threshold(std::vector<double>{}, 0, ThresholdMode::RankDefault), DataError);
}

TEST_CASE("percentile threshold mode takes the n1-th smallest value")
{
    std::vector<double> x(100);
    std::iota(x.begin(), x.end(), 0.0);
    const auto t = compute_threshold(x, 20, ThresholdMode::AsPaper);
    CHECK(t.tau == 19.0);
    const auto b = binarize(x, t);
    CHECK(std::accumulate(b.begin(), b.end(), 0) == 81);
}

TEST_CASE("binarize edge cases")
{
    const std::vector<double> x{0, 5, 7};
    CHECK(binarize(x, ThresholdSpec{5.0}) == std::vector<std::uint8_t>{0, 1, 1});
    CHECK(binarize(x, ThresholdSpec{8.0}) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(binarize(x, ThresholdSpec{-1.0}) == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("normality score")
{
    // Symmetric three-point set with kurtosis 3: mass 1/6, 2/3, 1/6 at -sqrt3, 0, +sqrt3
    // shifted away from zero so no value is dropped.
    std::vector<double> bell;
    for (int i = 0; i < 100; ++i) bell.push_back(10.0 - std::sqrt(3.0));
    for (int i = 0; i < 400; ++i) bell.push_back(10.0);
    for (int i = 0; i < 100; ++i) bell.push_back(10.0 + std::sqrt(3.0));
    CHECK(score_label_distribution(bell) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(score_label_distribution(std::vector<double>(50, 2.0)), DataError);
    std::vector<double> two(50, 0.0);
    two.resize(100, 1.0);
    CHECK_THROWS_AS(score_label_distribution(two), DataError);
    CHECK_THROWS_AS(score_label_distribution(std::vector<double>{1, 2, 3}), DataError);
}

TEST_CASE("grid scoring ranks valid candidates first")
{
    Rng rng(5);
    std::vector<std::uint8_t> labels(600);
    for (auto& b : labels)
        b = rng.uniform() < 0.3 ? 1 : 0;
    const std::vector<std::size_t> windows{10, 20};
    const std::vector<int> dims{2, 8, 64};
    const auto g = score_encoding_grid(labels, windows, dims);
    REQUIRE(g.size() == 6);
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (g[i].valid)
            CHECK((g[i - 1].valid && g[i - 1].score <= g[i].score));
    }
}

TEST_CASE("method and mode names")
{
    CHECK(parse_label_method("sspe") == LabelMethod::Sspe);
    CHECK(to_string(LabelMethod::Coap) == "coap");
    CHECK(parse_threshold_mode("as-paper") == ThresholdMode::AsPaper);
    CHECK_THROWS_AS(parse_label_method("fourier"), ConfigError);
    CHECK_THROWS_AS(parse_threshold_mode("median"), ConfigError);
}
