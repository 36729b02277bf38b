#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "critrep/dataset.hpp"
#include "critrep/errors.hpp"

namespace critrep {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& buf, std::size_t offset) {
    return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
           (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                           static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(bytes, 4);
}

std::uint32_t check_magic(const std::vector<std::uint8_t>& buf, std::uint32_t expected,
                          const std::filesystem::path& path) {
    if (buf.size() < 8) throw FormatError(path.string() + ": truncated IDX header");
    const std::uint32_t magic = be32(buf, 0);
    if (magic != expected) {
        throw FormatError(path.string() + ": bad IDX magic 0x" +
                          [&] {
                              char s[9];
                              std::snprintf(s, sizeof s, "%08x", magic);
                              return std::string(s);
                          }());
    }
    return be32(buf, 4);
}

}  // namespace

void LabeledDataset::validate() const {
    for (double v : samples.values())
        if (!(v >= 0.0 && v <= 1.0)) throw FormatError("dataset: pixel outside [0,1]");
    if (labels) {
        if (labels->size() != samples.rows()) throw FormatError("dataset: label count mismatch");
        if (!n_classes) throw FormatError("dataset: labels without n_classes");
        for (int y : *labels)
            if (y < 0 || y >= *n_classes) throw FormatError("dataset: label outside [0, n_classes)");
    }
}

LabeledDataset load_idx(const std::filesystem::path& images,
                        const std::optional<std::filesystem::path>& labels) {
    const auto buf = read_file(images);
    const std::size_t n = check_magic(buf, kImageMagic, images);
    if (buf.size() < 16) throw FormatError(images.string() + ": truncated IDX header");
    const std::size_t rows = be32(buf, 8), cols = be32(buf, 12);
    const std::size_t pixels = rows * cols;
    if (buf.size() < 16 + n * pixels) throw FormatError(images.string() + ": truncated payload");

    LabeledDataset ds;
    ds.image_rows = rows;
    ds.image_cols = cols;
    ds.samples = Matrix(n, pixels);
    auto values = ds.samples.values();
    for (std::size_t i = 0; i < n * pixels; ++i) values[i] = buf[16 + i] / 255.0;

    if (labels) {
        const auto lbuf = read_file(*labels);
        const std::size_t nl = check_magic(lbuf, kLabelMagic, *labels);
        if (nl != n) {
            throw FormatError("count mismatch: " + std::to_string(n) + " images in " +
                              images.string() + " but " + std::to_string(nl) + " labels in " +
                              labels->string());
        }
        if (lbuf.size() < 8 + n) throw FormatError(labels->string() + ": truncated payload");
        std::vector<int> y(lbuf.begin() + 8, lbuf.begin() + 8 + static_cast<std::ptrdiff_t>(n));
        const int max_label = y.empty() ? 0 : *std::max_element(y.begin(), y.end());
        ds.labels = std::move(y);
        ds.n_classes = max_label + 1;
    }
    return ds;
}

void write_idx_images(const std::filesystem::path& path, const Matrix& samples,
                      std::size_t image_rows, std::size_t image_cols) {
    if (image_rows * image_cols != samples.cols())
        throw DimensionError("write_idx_images: geometry does not match sample width");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    put_be32(out, kImageMagic);
    put_be32(out, static_cast<std::uint32_t>(samples.rows()));
    put_be32(out, static_cast<std::uint32_t>(image_rows));
    put_be32(out, static_cast<std::uint32_t>(image_cols));
    std::vector<char> bytes(samples.size());
    std::transform(samples.values().begin(), samples.values().end(), bytes.begin(), [](double v) {
        return static_cast<char>(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    });
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    put_be32(out, kLabelMagic);
    put_be32(out, static_cast<std::uint32_t>(labels.size()));
    for (int y : labels) {
        if (y < 0 || y > 255) throw FormatError("write_idx_labels: label does not fit in a byte");
        out.put(static_cast<char>(y));
    }
    if (!out) throw IoError("short write to " + path.string());
}

LabeledDataset head(const LabeledDataset& ds, std::size_t n) {
    n = std::min(n, ds.size());
    LabeledDataset out;
    out.n_classes = ds.n_classes;
    out.image_rows = ds.image_rows;
    out.image_cols = ds.image_cols;
    std::vector<double> data(ds.samples.values().begin(),
                             ds.samples.values().begin() + static_cast<std::ptrdiff_t>(n * ds.features()));
    out.samples = Matrix(n, ds.features(), std::move(data));
    if (ds.labels) out.labels = std::vector<int>(ds.labels->begin(), ds.labels->begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

LabeledDataset filter_label_range(const LabeledDataset& ds, int lo, int hi) {
    if (!ds.labels) throw FormatError("filter_label_range: dataset has no labels");
    std::vector<std::size_t> keep;
    std::vector<int> rebased;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int y = (*ds.labels)[i];
        if (y >= lo && y <= hi) {
            keep.push_back(i);
            rebased.push_back(y - lo);
        }
    }
    LabeledDataset out;
    out.samples = ds.samples.gather_rows(keep);
    out.labels = std::move(rebased);
    out.n_classes = hi - lo + 1;
    out.image_rows = ds.image_rows;
    out.image_cols = ds.image_cols;
    return out;
}

}  // namespace critrep
