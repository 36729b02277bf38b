#include <doctest.h>

#include <cmath>

#include "critrep/powerlaw.hpp"
#include "support/oracles.hpp"

using namespace critrep;

TEST_CASE("power_sum: direct and Euler-Maclaurin branches agree with brute force") {
    for (double a : {0.0, 0.5, 1.0, 2.0, 3.5})
        for (auto [lo, hi] : {std::pair<std::uint64_t, std::uint64_t>{1, 10}, {1, 1000}, {7, 5000}, {100, 100000}}) {
            long double want = 0;
            for (std::uint64_t k = lo; k <= hi; ++k) want += std::pow(static_cast<long double>(k), -a);
            CHECK(power_sum(lo, hi, a) == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
        }
    CHECK(power_sum(5, 5, 2.0) == doctest::Approx(1.0 / 25));
}

TEST_CASE("fit: Zipf draws with exponent 2 recover beta = 1") {
    const auto s = oracle::zipf_sizes(2.0, 100000, 1);
    const PowerLawFit f = fit_power_law(s);
    CHECK(f.beta == doctest::Approx(1.0).epsilon(0.05));
    CHECK(f.n_tail >= kMinTailObservations);
    CHECK(f.k_max == s.k_max());
    CHECK(f.decades == doctest::Approx(std::log10(double(f.k_max) / double(f.k_min))));
    CHECK(f.ls_slope == doctest::Approx(-2.0).epsilon(0.15));
    CHECK(passes_gate(f));
}

TEST_CASE("fit: other exponents") {
    for (double s : {1.5, 2.5, 3.0}) {
        const PowerLawFit f = fit_power_law(oracle::zipf_sizes(s, 50000, 2));
        CHECK(f.beta + 1 == doctest::Approx(s).epsilon(0.05));
    }
}

TEST_CASE("fit: MLE at a fixed cutoff maximises the truncated likelihood") {
    const auto s = oracle::zipf_sizes(2.2, 20000, 3);
    const PowerLawFit f = fit_power_law_at(s, 2);
    auto loglik = [&](double a) {
        double ll = 0;
        const double z = power_sum(2, s.k_max(), a);
        for (const auto& p : s.points())
            if (p.k >= 2) ll += static_cast<double>(p.m) * (-a * std::log(static_cast<double>(p.k)) - std::log(z));
        return ll;
    };
    const double a = f.beta + 1;
    CHECK(loglik(a) >= loglik(a + 1e-3));
    CHECK(loglik(a) >= loglik(a - 1e-3));
    CHECK(f.k_min == 2);
}

TEST_CASE("fit: KS choice of k_min ignores a distorted head") {
    // Pure power law above k = 8, flattened below.
    std::vector<SpectrumPoint> pts;
    const auto z = oracle::zipf_sizes(2.0, 200000, 4);
    for (const auto& p : z.points()) pts.push_back({p.k, p.k < 8 ? p.m / 10 + 1 : p.m});
    const PowerLawFit f = fit_power_law(DegeneracySpectrum::from_points(pts));
    CHECK(f.k_min >= 4);
    CHECK(f.beta == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("fit: the pure-clustering spectrum m(k) ~ 1/k gives beta = 0") {
    std::vector<SpectrumPoint> pts;
    for (std::uint64_t k = 1; k <= 2000; ++k) pts.push_back({k, static_cast<std::uint64_t>(std::llround(1e6 / k))});
    const PowerLawFit f = fit_power_law(DegeneracySpectrum::from_points(pts));
    CHECK(std::abs(f.beta) < 0.05);
}

TEST_CASE("fit: degenerate and sparse spectra are rejected") {
    try {
        fit_power_law(DegeneracySpectrum::from_points({{1, 500}}));
        FAIL("expected FitError");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitError::Kind::degenerate_tail);
    }
    try {
        fit_power_law(DegeneracySpectrum::from_points({{1, 50}, {2, 20}, {3, 5}}));
        FAIL("expected FitError");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitError::Kind::too_few_points);
    }
    CHECK_THROWS_AS(fit_power_law_at(DegeneracySpectrum::from_points({{1, 5}, {2, 5}}), 2), FitError);
}

TEST_CASE("gate: span and R^2 thresholds") {
    PowerLawFit f;
    f.decades = 1.5;
    f.ls_r2 = 0.9;
    CHECK(passes_gate(f));
    f.decades = 1.49;
    CHECK_FALSE(passes_gate(f));
    f.decades = 3;
    f.ls_r2 = 0.89;
    CHECK_FALSE(passes_gate(f));
    f.ls_r2 = std::nan("");
    CHECK_FALSE(passes_gate(f));
}

TEST_CASE("fit: error shrinks with sample size") {
    double prev = 1e9;
    for (std::size_t n : {1000, 10000, 100000}) {
        double err = 0;
        const int reps = 8;
        for (int r = 0; r < reps; ++r) err += std::abs(fit_power_law(oracle::zipf_sizes(2.0, n, 100 + r)).beta - 1.0);
        err /= reps;
        CHECK(err < prev);
        prev = err;
    }
}
