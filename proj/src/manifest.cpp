#include "critrep/manifest.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "critrep/errors.hpp"

namespace critrep {

namespace {

std::filesystem::path data_base(const std::filesystem::path& manifest_dir) {
    if (const char* env = std::getenv("CRITREP_DATA_DIR"); env && *env) return env;
    return manifest_dir;
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::filesystem::path& p) {
    return p.is_absolute() ? p : base / p;
}

}  // namespace

Manifest Manifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw FormatError("manifest " + path.string() + ": expected an object");

    Manifest m;
    m.base_ = path.parent_path();
    for (const auto& [name, entry] : doc.items()) {
        if (!entry.is_object() || !entry.contains("images"))
            throw FormatError("manifest entry '" + name + "' lacks 'images'");
        ManifestEntry e;
        e.images = entry.at("images").get<std::string>();
        if (entry.contains("labels") && !entry["labels"].is_null())
            e.labels = std::filesystem::path(entry["labels"].get<std::string>());
        if (entry.contains("sha256") && !entry["sha256"].is_null())
            e.sha256 = entry["sha256"].get<std::string>();
        if (entry.contains("n_expected") && !entry["n_expected"].is_null())
            e.n_expected = entry["n_expected"].get<std::size_t>();
        m.entries_.emplace(name, std::move(e));
    }
    return m;
}

ManifestEntry Manifest::resolve(const std::string& name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end()) throw FormatError("dataset '" + name + "' not in manifest");
    const auto base = data_base(base_);
    ManifestEntry e = it->second;
    e.images = resolve_path(base, e.images);
    if (e.labels) e.labels = resolve_path(base, *e.labels);
    return e;
}

LabeledDataset Manifest::load_dataset(const std::string& name, bool verify) const {
    const ManifestEntry e = resolve(name);
    if (verify && e.sha256 && !e.sha256->empty()) {
        const std::string actual = sha256_file(e.images);
        if (actual != *e.sha256)
            throw FormatError(e.images.string() + ": sha256 " + actual + " != expected " + *e.sha256);
    }
    LabeledDataset ds = load_idx(e.images, e.labels);
    if (e.n_expected && ds.size() != *e.n_expected) {
        throw FormatError(e.images.string() + ": " + std::to_string(ds.size()) +
                          " samples, manifest expects " + std::to_string(*e.n_expected));
    }
    return ds;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

}  // namespace critrep
