#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "critrep/matrix.hpp"

namespace critrep {

/// Samples in [0,1] (one row each) with optional integer labels.
struct LabeledDataset {
    Matrix samples;
    std::optional<std::vector<int>> labels;
    std::optional<int> n_classes;
    // Image geometry when the rows are flattened images; 0 otherwise.
    std::size_t image_rows = 0;
    std::size_t image_cols = 0;

    std::size_t size() const { return samples.rows(); }
    std::size_t features() const { return samples.cols(); }
    bool has_labels() const { return labels.has_value(); }

    /// Throws FormatError if a pixel leaves [0,1] or a label leaves [0, n_classes).
    void validate() const;
};

/// Reads an IDX image file (magic 0x00000803) and optional IDX label file
/// (magic 0x00000801). Pixels are divided by 255.
LabeledDataset load_idx(const std::filesystem::path& images,
                        const std::optional<std::filesystem::path>& labels = std::nullopt);

/// Writes samples as an IDX image file; pixels are round(255 * v).
void write_idx_images(const std::filesystem::path& path, const Matrix& samples,
                      std::size_t image_rows, std::size_t image_cols);
void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// First `n` samples (all of them if n >= size()).
LabeledDataset head(const LabeledDataset& ds, std::size_t n);

/// Keeps samples whose label lies in [lo, hi] and rebases labels to start at 0.
/// Used to carve the EMNIST lowercase block out of the by-class split.
LabeledDataset filter_label_range(const LabeledDataset& ds, int lo, int hi);

}  // namespace critrep
