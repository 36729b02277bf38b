#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critrep/matrix.hpp"

namespace critrep {

/// Fixed-width bit string packed into 64-bit words. Bits past `width` are
/// always zero, so equality and ordering only see meaningful bits.
class BinaryCode {
public:
    BinaryCode() = default;
    explicit BinaryCode(std::size_t width);
    /// From a string of '0'/'1' characters; character i is bit i.
    static BinaryCode from_string(std::string_view bits);

    std::size_t width() const { return width_; }
    std::span<const std::uint64_t> words() const { return words_; }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
    void set(std::size_t i, bool on = true);
    std::size_t popcount() const;
    std::string to_string() const;

    friend bool operator==(const BinaryCode&, const BinaryCode&) = default;
    // Word-sequence lexicographic, then width.
    friend std::strong_ordering operator<=>(const BinaryCode& a, const BinaryCode& b);

private:
    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Bit i of row r is 1 iff activations(r, i) > threshold (ties map to 0).
std::vector<BinaryCode> binarize(const Matrix& activations, double threshold);

/// Default thresholds: sigmoid units, ReLU units (active vs silent), and the
/// Ising autoencoder.
inline constexpr double kSigmoidThreshold = 0.5;
inline constexpr double kReluThreshold = 0.0;
inline constexpr double kIsingThreshold = 0.4;

/// Exact multiset of codes: k_z for every distinct z, optionally split by label.
class CodeHistogram {
public:
    using Counts = std::map<BinaryCode, std::uint64_t>;
    using JointCounts = std::map<std::pair<int, BinaryCode>, std::uint64_t>;

    CodeHistogram() = default;
    /// Validates sum/positivity invariants; joint counts must marginalise to `counts`.
    CodeHistogram(Counts counts, std::optional<JointCounts> joint = std::nullopt);

    const Counts& counts() const { return counts_; }
    std::uint64_t total() const { return total_; }
    std::size_t distinct() const { return counts_.size(); }
    bool has_joint() const { return joint_.has_value(); }
    const JointCounts& joint() const;

    friend bool operator==(const CodeHistogram&, const CodeHistogram&) = default;

private:
    Counts counts_;
    std::optional<JointCounts> joint_;
    std::uint64_t total_ = 0;
};

/// Counts codes, filling joint (label, code) counts when labels are given.
/// Shards the input across OpenMP threads and merges in shard order.
CodeHistogram count_codes(std::span<const BinaryCode> codes, std::optional<std::span<const int>> labels = std::nullopt);

namespace serial {
CodeHistogram count_codes(std::span<const BinaryCode> codes, std::optional<std::span<const int>> labels = std::nullopt);
}

struct SpectrumPoint {
    std::uint64_t k = 0;  // frequency
    std::uint64_t m = 0;  // number of distinct codes with that frequency
    friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

/// m(k) for every observed frequency, sorted by k, with M = sum k m(k).
class DegeneracySpectrum {
public:
    DegeneracySpectrum() = default;
    /// Points may come in any order; equal k are merged. Requires m >= 1, k >= 1.
    static DegeneracySpectrum from_points(std::vector<SpectrumPoint> points);
    /// One entry per cluster size; zero sizes are skipped.
    static DegeneracySpectrum from_sizes(std::span<const std::uint64_t> sizes);

    const std::vector<SpectrumPoint>& points() const { return points_; }
    std::uint64_t total() const { return total_; }       // M
    std::uint64_t n_codes() const { return n_codes_; }   // sum m(k)
    bool empty() const { return points_.empty(); }
    std::uint64_t k_max() const { return points_.empty() ? 0 : points_.back().k; }

    friend bool operator==(const DegeneracySpectrum&, const DegeneracySpectrum&) = default;

private:
    std::vector<SpectrumPoint> points_;
    std::uint64_t total_ = 0;
    std::uint64_t n_codes_ = 0;
};

DegeneracySpectrum degeneracy(const CodeHistogram& h);

/// Drops frequencies above `k_cutoff` (display window); M is recomputed.
DegeneracySpectrum truncate_above(const DegeneracySpectrum& s, double k_cutoff);

/// Coefficient of variation of the frequency over codes: std(k_z) / mean(k_z).
double size_coefficient_of_variation(const DegeneracySpectrum& s);

struct BinnedPoint {
    double k_center = 0;  // geometric mean of the first and last integer k in the bin
    double m_mean = 0;    // sum of m(k) over the bin / number of integers in the bin
};

/// Geometric bins [origin b^i, origin b^(i+1)) over k >= origin; integers past
/// the largest observed k are not counted, and empty bins are omitted.
std::vector<BinnedPoint> log_bin(const DegeneracySpectrum& s, double base, double origin = 1.0);

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    std::size_t n = 0;
};

/// Least squares of log10(m_mean) on log10(k_center).
LineFit loglog_fit(std::span<const BinnedPoint> bins);
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// CSV with header `k,m_k`.
void write_spectrum_csv(const std::filesystem::path& path, const DegeneracySpectrum& s);
/// CSV with header `k_center,m_mean`.
void write_binned_csv(const std::filesystem::path& path, std::span<const BinnedPoint> bins);

}  // namespace critrep
