#include "critrep/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

namespace critrep {

namespace {

constexpr std::uint64_t kDirectTerms = 64;
constexpr double kAlphaLow = -2.0;
constexpr double kAlphaHigh = 10.0;

double f(double x, double alpha) { return std::pow(x, -alpha); }

// Odd derivatives of x^-alpha: d1 = -a x^(-a-1), d3 = -a(a+1)(a+2) x^(-a-3), ...
double odd_derivative(double x, double alpha, int order) {
    double c = -1.0;
    for (int j = 0; j < order; ++j) c *= (alpha + j);
    return c * std::pow(x, -alpha - order);
}

double integral(double a, double b, double alpha) {
    const double s = 1.0 - alpha;
    const double L = std::log(b / a);
    if (s == 0.0) return L;
    return std::pow(a, s) * std::expm1(s * L) / s;
}

double euler_maclaurin(double a, double b, double alpha) {
    double sum = integral(a, b, alpha) + 0.5 * (f(a, alpha) + f(b, alpha));
    sum += (odd_derivative(b, alpha, 1) - odd_derivative(a, alpha, 1)) / 12.0;
    sum -= (odd_derivative(b, alpha, 3) - odd_derivative(a, alpha, 3)) / 720.0;
    sum += (odd_derivative(b, alpha, 5) - odd_derivative(a, alpha, 5)) / 30240.0;
    return sum;
}

struct Tail {
    std::vector<SpectrumPoint> points;
    std::uint64_t n = 0;
    double sum_log_k = 0;  // sum over codes of log k
};

Tail tail_of(const DegeneracySpectrum& s, std::uint64_t k_min) {
    Tail t;
    for (const auto& p : s.points()) {
        if (p.k < k_min) continue;
        t.points.push_back(p);
        t.n += p.m;
        t.sum_log_k += static_cast<double>(p.m) * std::log(static_cast<double>(p.k));
    }
    return t;
}

double ks_distance(const Tail& t, double alpha) {
    const std::uint64_t k_min = t.points.front().k, k_max = t.points.back().k;
    const double Z = power_sum(k_min, k_max, alpha);
    const double n = static_cast<double>(t.n);
    double model = 0.0, emp = 0.0, d = 0.0;
    std::uint64_t last = k_min - 1;
    for (const auto& p : t.points) {
        // Just below the jump at p.k, then at p.k.
        if (p.k > last + 1) model += power_sum(last + 1, p.k - 1, alpha);
        d = std::max(d, std::abs(emp - model / Z));
        model += f(static_cast<double>(p.k), alpha);
        emp += static_cast<double>(p.m) / n;
        d = std::max(d, std::abs(emp - model / Z));
        last = p.k;
    }
    return d;
}

PowerLawFit fit_tail(const Tail& t) {
    const std::uint64_t k_min = t.points.front().k, k_max = t.points.back().k;
    const double n = static_cast<double>(t.n);
    auto neg_ll = [&](double alpha) { return alpha * t.sum_log_k / n + std::log(power_sum(k_min, k_max, alpha)); };
    const auto [alpha, value] = boost::math::tools::brent_find_minima(neg_ll, kAlphaLow, kAlphaHigh, 40);
    (void)value;

    PowerLawFit fit;
    fit.beta = alpha - 1.0;
    fit.k_min = k_min;
    fit.k_max = k_max;
    fit.n_tail = t.n;
    fit.decades = std::log10(static_cast<double>(k_max) / static_cast<double>(k_min));
    fit.ks_distance = ks_distance(t, alpha);

    const auto tail_spec = DegeneracySpectrum::from_points(t.points);
    const auto bins = log_bin(tail_spec, kLogBinBase, static_cast<double>(k_min));
    const LineFit line = loglog_fit(bins);
    fit.ls_slope = line.slope;
    fit.ls_r2 = line.r2;
    fit.ls_bins = line.n;
    return fit;
}

}  // namespace

double power_sum(std::uint64_t a, std::uint64_t b, double alpha) {
    if (b < a) return 0.0;
    if (a == 0) throw std::invalid_argument("power_sum: k starts at 1");
    double sum = 0.0;
    std::uint64_t k = a;
    const std::uint64_t direct_end = (b - a < kDirectTerms) ? b : std::max(a, kDirectTerms) - 1;
    for (; k <= direct_end && k <= b; ++k) sum += f(static_cast<double>(k), alpha);
    if (k <= b) sum += euler_maclaurin(static_cast<double>(k), static_cast<double>(b), alpha);
    return sum;
}

PowerLawFit fit_power_law_at(const DegeneracySpectrum& s, std::uint64_t k_min) {
    if (k_min == 0) throw std::invalid_argument("fit_power_law_at: k_min must be >= 1");
    const Tail t = tail_of(s, k_min);
    if (t.points.size() < 2)
        throw FitError(FitError::Kind::degenerate_tail, "power-law fit: tail has fewer than two distinct k");
    if (t.n < kMinTailObservations)
        throw FitError(FitError::Kind::too_few_points, "power-law fit: fewer than " +
                                                           std::to_string(kMinTailObservations) + " codes in tail");
    return fit_tail(t);
}

PowerLawFit fit_power_law(const DegeneracySpectrum& s) {
    const auto& pts = s.points();
    if (pts.size() == 1)
        throw FitError(FitError::Kind::degenerate_tail, "power-law fit: every code has the same frequency");
    if (pts.size() < kMinDistinctFrequencies)
        throw FitError(FitError::Kind::too_few_points, "power-law fit: only " + std::to_string(pts.size()) +
                                                           " distinct frequencies (need " +
                                                           std::to_string(kMinDistinctFrequencies) + ")");
    PowerLawFit best;
    best.ks_distance = std::numeric_limits<double>::infinity();
    std::uint64_t codes_at_or_above = s.n_codes();
    // Short tails fit any exponent with near-zero KS distance.
    for (std::size_t i = 0; i + kMinDistinctFrequencies <= pts.size(); ++i) {
        if (codes_at_or_above < kMinTailObservations) break;
        const PowerLawFit fit = fit_tail(tail_of(s, pts[i].k));
        if (fit.ks_distance < best.ks_distance) best = fit;
        codes_at_or_above -= pts[i].m;
    }
    if (!std::isfinite(best.ks_distance))
        throw FitError(FitError::Kind::too_few_points, "power-law fit: no cutoff leaves enough codes");
    return best;
}

bool passes_gate(const PowerLawFit& f, const ShapeGate& gate) {
    return f.decades >= gate.min_decades && std::isfinite(f.ls_r2) && f.ls_r2 >= gate.min_r2;
}

}  // namespace critrep
