#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "critrep/dataset.hpp"

namespace critrep {

struct ManifestEntry {
    std::filesystem::path images;
    std::optional<std::filesystem::path> labels;
    std::optional<std::string> sha256;  // of the image file, lowercase hex
    std::optional<std::size_t> n_expected;
};

/// JSON file mapping dataset name -> {images, labels|null, sha256, n_expected}.
///
/// Relative paths resolve against $CRITREP_DATA_DIR when set, otherwise
/// against the manifest's own directory. Nothing is ever downloaded.
class Manifest {
public:
    static Manifest load(const std::filesystem::path& path);

    bool contains(const std::string& name) const { return entries_.contains(name); }
    /// Entry with paths already resolved. Throws FormatError for unknown names.
    ManifestEntry resolve(const std::string& name) const;
    /// Loads the dataset, checking n_expected and (if `verify`) the checksum.
    LabeledDataset load_dataset(const std::string& name, bool verify = true) const;

    const std::map<std::string, ManifestEntry>& entries() const { return entries_; }

private:
    std::filesystem::path base_;
    std::map<std::string, ManifestEntry> entries_;
};

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace critrep
