#include "critrep/representation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <omp.h>

#include "critrep/errors.hpp"

namespace critrep {

BinaryCode::BinaryCode(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

BinaryCode BinaryCode::from_string(std::string_view bits) {
    BinaryCode c(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') c.set(i);
        else if (bits[i] != '0') throw std::invalid_argument("BinaryCode: expected only '0' and '1'");
    }
    return c;
}

void BinaryCode::set(std::size_t i, bool on) {
    if (i >= width_) throw std::out_of_range("BinaryCode::set: bit beyond width");
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (on) words_[i / 64] |= mask;
    else words_[i / 64] &= ~mask;
}

std::size_t BinaryCode::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::string BinaryCode::to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i)
        if (test(i)) s[i] = '1';
    return s;
}

std::strong_ordering operator<=>(const BinaryCode& a, const BinaryCode& b) {
    if (auto c = std::lexicographical_compare_three_way(a.words_.begin(), a.words_.end(), b.words_.begin(),
                                                        b.words_.end());
        c != 0)
        return c;
    return a.width_ <=> b.width_;
}

std::vector<BinaryCode> binarize(const Matrix& activations, double threshold) {
    if (!std::isfinite(threshold)) throw std::invalid_argument("binarize: threshold must be finite");
    std::vector<BinaryCode> codes(activations.rows(), BinaryCode(activations.cols()));
    for (std::size_t r = 0; r < activations.rows(); ++r) {
        auto row = activations.row(r);
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i] > threshold) codes[r].set(i);
    }
    return codes;
}

// ---------------------------------------------------------------------------

CodeHistogram::CodeHistogram(Counts counts, std::optional<JointCounts> joint)
    : counts_(std::move(counts)), joint_(std::move(joint)) {
    for (const auto& [code, k] : counts_) {
        if (k == 0) throw std::invalid_argument("CodeHistogram: zero count for a listed code");
        total_ += k;
    }
    if (joint_) {
        Counts marginal;
        for (const auto& [key, k] : *joint_) {
            if (k == 0) throw std::invalid_argument("CodeHistogram: zero joint count");
            marginal[key.second] += k;
        }
        if (marginal != counts_) throw std::invalid_argument("CodeHistogram: joint counts do not marginalise to k_z");
    }
}

const CodeHistogram::JointCounts& CodeHistogram::joint() const {
    if (!joint_) throw std::logic_error("CodeHistogram: no joint counts");
    return *joint_;
}

namespace {

struct CodeHash {
    std::size_t operator()(const BinaryCode& c) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL ^ c.width();
        for (auto w : c.words()) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

struct LabeledKeyHash {
    std::size_t operator()(const std::pair<int, BinaryCode>& p) const noexcept {
        return CodeHash{}(p.second) * 31 + static_cast<std::size_t>(p.first);
    }
};

void check_labels(std::span<const BinaryCode> codes, const std::optional<std::span<const int>>& labels) {
    if (labels && labels->size() != codes.size())
        throw DimensionError("count_codes: " + std::to_string(codes.size()) + " codes but " +
                             std::to_string(labels->size()) + " labels");
}

}  // namespace

CodeHistogram count_codes(std::span<const BinaryCode> codes, std::optional<std::span<const int>> labels) {
    check_labels(codes, labels);
    const int shards = std::max(1, std::min<int>(omp_get_max_threads(), static_cast<int>(codes.size() / 4096) + 1));
    std::vector<std::unordered_map<BinaryCode, std::uint64_t, CodeHash>> local(shards);
    std::vector<std::unordered_map<std::pair<int, BinaryCode>, std::uint64_t, LabeledKeyHash>> local_joint(shards);

#pragma omp parallel for schedule(static, 1) num_threads(shards)
    for (int s = 0; s < shards; ++s) {
        const std::size_t begin = codes.size() * static_cast<std::size_t>(s) / static_cast<std::size_t>(shards);
        const std::size_t end = codes.size() * static_cast<std::size_t>(s + 1) / static_cast<std::size_t>(shards);
        for (std::size_t i = begin; i < end; ++i) {
            ++local[s][codes[i]];
            if (labels) ++local_joint[s][{(*labels)[i], codes[i]}];
        }
    }

    CodeHistogram::Counts counts;
    for (const auto& shard : local)
        for (const auto& [code, k] : shard) counts[code] += k;
    std::optional<CodeHistogram::JointCounts> joint;
    if (labels) {
        joint.emplace();
        for (const auto& shard : local_joint)
            for (const auto& [key, k] : shard) (*joint)[key] += k;
    }
    return CodeHistogram(std::move(counts), std::move(joint));
}

CodeHistogram serial::count_codes(std::span<const BinaryCode> codes, std::optional<std::span<const int>> labels) {
    check_labels(codes, labels);
    CodeHistogram::Counts counts;
    std::optional<CodeHistogram::JointCounts> joint;
    if (labels) joint.emplace();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        ++counts[codes[i]];
        if (labels) ++(*joint)[{(*labels)[i], codes[i]}];
    }
    return CodeHistogram(std::move(counts), std::move(joint));
}

// ---------------------------------------------------------------------------

DegeneracySpectrum DegeneracySpectrum::from_points(std::vector<SpectrumPoint> points) {
    std::map<std::uint64_t, std::uint64_t> merged;
    for (const auto& p : points) {
        if (p.k == 0 || p.m == 0) throw std::invalid_argument("DegeneracySpectrum: k and m must be >= 1");
        merged[p.k] += p.m;
    }
    DegeneracySpectrum s;
    for (const auto& [k, m] : merged) {
        s.points_.push_back({k, m});
        s.total_ += k * m;
        s.n_codes_ += m;
    }
    return s;
}

DegeneracySpectrum DegeneracySpectrum::from_sizes(std::span<const std::uint64_t> sizes) {
    std::vector<SpectrumPoint> points;
    points.reserve(sizes.size());
    for (auto k : sizes)
        if (k > 0) points.push_back({k, 1});
    return from_points(std::move(points));
}

DegeneracySpectrum degeneracy(const CodeHistogram& h) {
    std::vector<SpectrumPoint> points;
    points.reserve(h.distinct());
    for (const auto& [code, k] : h.counts()) points.push_back({k, 1});
    DegeneracySpectrum s = DegeneracySpectrum::from_points(std::move(points));
    if (s.total() != h.total()) throw std::logic_error("degeneracy: mass not conserved");
    return s;
}

DegeneracySpectrum truncate_above(const DegeneracySpectrum& s, double k_cutoff) {
    std::vector<SpectrumPoint> kept;
    for (const auto& p : s.points())
        if (static_cast<double>(p.k) <= k_cutoff) kept.push_back(p);
    return DegeneracySpectrum::from_points(std::move(kept));
}

double size_coefficient_of_variation(const DegeneracySpectrum& s) {
    if (s.n_codes() == 0) return 0.0;
    const double n = static_cast<double>(s.n_codes());
    const double mean = static_cast<double>(s.total()) / n;
    double var = 0.0;
    for (const auto& p : s.points()) {
        const double d = static_cast<double>(p.k) - mean;
        var += static_cast<double>(p.m) * d * d;
    }
    return std::sqrt(var / n) / mean;
}

std::vector<BinnedPoint> log_bin(const DegeneracySpectrum& s, double base, double origin) {
    if (!(base > 1.0)) throw std::invalid_argument("log_bin: base must be > 1");
    if (!(origin > 0.0)) throw std::invalid_argument("log_bin: origin must be > 0");
    std::vector<BinnedPoint> bins;
    if (s.empty()) return bins;
    const double k_top = static_cast<double>(s.k_max());
    const double log_base = std::log(base);

    auto edge = [&](long i) { return origin * std::pow(base, static_cast<double>(i)); };
    auto bin_of = [&](double k) {
        auto i = static_cast<long>(std::floor(std::log(k / origin) / log_base));
        while (edge(i) > k) --i;
        while (edge(i + 1) <= k) ++i;
        return i;
    };

    const auto& pts = s.points();
    std::size_t p = 0;
    while (p < pts.size() && static_cast<double>(pts[p].k) < origin) ++p;
    while (p < pts.size()) {
        const long i = bin_of(static_cast<double>(pts[p].k));
        const double lo_edge = edge(i), hi_edge = edge(i + 1);
        double mass = 0.0;
        while (p < pts.size() && static_cast<double>(pts[p].k) < hi_edge) mass += static_cast<double>(pts[p++].m);
        // Integer k in [lo_edge, hi_edge), capped at the largest observed k.
        const double first = std::ceil(lo_edge);
        double last = std::ceil(hi_edge) - 1.0;
        last = std::min(last, k_top);
        const double count = last - first + 1.0;
        bins.push_back({std::sqrt(first * last), mass / count});
    }
    return bins;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("fit_line: x and y lengths differ");
    LineFit f;
    f.n = x.size();
    if (f.n < 2) {
        f.r2 = std::numeric_limits<double>::quiet_NaN();
        return f;
    }
    const double n = static_cast<double>(f.n);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : (syy == 0 ? 1.0 : 0.0);
    return f;
}

LineFit loglog_fit(std::span<const BinnedPoint> bins) {
    std::vector<double> x, y;
    for (const auto& b : bins) {
        x.push_back(std::log10(b.k_center));
        y.push_back(std::log10(b.m_mean));
    }
    return fit_line(x, y);
}

void write_spectrum_csv(const std::filesystem::path& path, const DegeneracySpectrum& s) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "k,m_k\n";
    for (const auto& p : s.points()) out << p.k << ',' << p.m << '\n';
}

void write_binned_csv(const std::filesystem::path& path, std::span<const BinnedPoint> bins) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    out << "k_center,m_mean\n";
    for (const auto& b : bins) out << b.k_center << ',' << b.m_mean << '\n';
}

}  // namespace critrep
