#include "critrep/infostats.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace critrep {

namespace {

void require_nonempty(std::uint64_t M, const char* what) {
    if (M == 0) throw std::invalid_argument(std::string(what) + ": empty input");
}

// -sum (c/M) log(c/M), written as sum (c/M)(log M - log c) so that c == M
// contributes exactly zero.
long double plugin_term(std::uint64_t c, std::uint64_t M, long double log_M) {
    const long double p = static_cast<long double>(c) / static_cast<long double>(M);
    return p * (log_M - std::log(static_cast<long double>(c)));
}

}  // namespace

double entropy_of_counts(std::span<const std::uint64_t> counts) {
    std::uint64_t M = 0;
    for (auto c : counts) M += c;
    require_nonempty(M, "entropy_of_counts");
    const long double log_M = std::log(static_cast<long double>(M));
    long double h = 0;
    for (auto c : counts)
        if (c > 0) h += plugin_term(c, M, log_M);
    return static_cast<double>(h);
}

double resolution(const DegeneracySpectrum& s) {
    require_nonempty(s.total(), "resolution");
    const auto M = s.total();
    const long double log_M = std::log(static_cast<long double>(M));
    long double h = 0;
    for (const auto& p : s.points())
        h += static_cast<long double>(p.m) * plugin_term(p.k, M, log_M);
    return static_cast<double>(h);
}

double relevance(const DegeneracySpectrum& s) {
    require_nonempty(s.total(), "relevance");
    const auto M = s.total();
    const long double log_M = std::log(static_cast<long double>(M));
    long double h = 0;
    for (const auto& p : s.points()) h += plugin_term(p.k * p.m, M, log_M);
    return static_cast<double>(h);
}

double resolution(const CodeHistogram& h) {
    require_nonempty(h.total(), "resolution");
    const auto M = h.total();
    const long double log_M = std::log(static_cast<long double>(M));
    long double sum = 0;
    for (const auto& [code, k] : h.counts()) sum += plugin_term(k, M, log_M);
    return static_cast<double>(sum);
}

double relevance(const CodeHistogram& h) {
    require_nonempty(h.total(), "relevance");
    // Mass carried by each frequency value: P(K=k) = k m(k) / M.
    std::unordered_map<std::uint64_t, std::uint64_t> mass;
    for (const auto& [code, k] : h.counts()) mass[k] += k;
    std::map<std::uint64_t, std::uint64_t> ordered(mass.begin(), mass.end());
    const auto M = h.total();
    const long double log_M = std::log(static_cast<long double>(M));
    long double sum = 0;
    for (const auto& [k, c] : ordered) sum += plugin_term(c, M, log_M);
    return static_cast<double>(sum);
}

InfoSummary summarize(const CodeHistogram& h) {
    InfoSummary s;
    s.M = h.total();
    s.distinct = h.distinct();
    s.H_Z = resolution(h);
    s.H_K = relevance(h);
    return s;
}

InfoSummary entropies_with_labels(const CodeHistogram& h) {
    if (!h.has_joint()) throw std::invalid_argument("entropies_with_labels: histogram has no label counts");
    InfoSummary s = summarize(h);
    const auto M = h.total();
    const long double log_M = std::log(static_cast<long double>(M));

    std::map<int, std::uint64_t> label_counts;
    long double h_yz = 0;
    for (const auto& [key, k] : h.joint()) {
        label_counts[key.first] += k;
        h_yz += plugin_term(k, M, log_M);
    }
    long double h_y = 0;
    for (const auto& [y, k] : label_counts) h_y += plugin_term(k, M, log_M);

    long double mi = 0;
    for (const auto& [key, k_yz] : h.joint()) {
        const long double k_y = static_cast<long double>(label_counts.at(key.first));
        const long double k_z = static_cast<long double>(h.counts().at(key.second));
        const long double p = static_cast<long double>(k_yz) / static_cast<long double>(M);
        mi += p * std::log(static_cast<long double>(k_yz) * static_cast<long double>(M) / (k_y * k_z));
    }
    s.H_Y = static_cast<double>(h_y);
    s.H_YZ = static_cast<double>(h_yz);
    s.I_ZY = static_cast<double>(mi);
    return s;
}

}  // namespace critrep
