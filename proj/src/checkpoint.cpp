#include "critrep/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>

#include "critrep/errors.hpp"

namespace critrep {

namespace {

constexpr char kMagic[4] = {'C', 'R', 'C', 'K'};
constexpr std::uint32_t kKindMlp = 1;
constexpr std::uint32_t kKindRbm = 2;

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void f64(double d) {
        const auto v = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void reals(std::span<const double> values) {
        for (double d : values) f64(d);
    }
    void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
        if (!out) throw IoError("short write to " + path.string());
    }

private:
    std::vector<char> bytes_;
};

class Reader {
public:
    Reader(std::vector<unsigned char> bytes, std::string name) : bytes_(std::move(bytes)), name_(std::move(name)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
        return std::bit_cast<double>(v);
    }
    void reals(std::span<double> out) {
        for (double& d : out) d = f64();
    }
    bool magic_ok() {
        need(4);
        for (char c : kMagic)
            if (bytes_[pos_++] != static_cast<unsigned char>(c)) return false;
        return true;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw FormatError(name_ + ": truncated checkpoint");
    }
    std::vector<unsigned char> bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

void header(Writer& w, std::uint32_t kind, std::uint32_t activation, std::uint32_t head,
            const std::vector<std::size_t>& dims) {
    w.raw(kMagic, 4);
    w.u32(kCheckpointVersion);
    w.u32(kind);
    w.u32(activation);
    w.u32(head);
    w.u32(static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) w.u32(static_cast<std::uint32_t>(d));
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const MlpModel& m) {
    m.validate();
    Writer w;
    header(w, kKindMlp, m.activation == Activation::relu ? 1 : 0,
           m.head == OutputHead::reconstruction ? 1 : 0, m.layer_dims);
    for (std::size_t l = 0; l < m.depth(); ++l) {
        w.reals(m.weights[l].values());
        w.reals(m.biases[l]);
    }
    w.save(path);
}

void write_checkpoint(const std::filesystem::path& path, const RbmModel& r) {
    r.validate();
    Writer w;
    header(w, kKindRbm, 0, 0, {r.n_visible, r.n_hidden});
    w.reals(r.weights.values());
    w.reals(r.visible_bias);
    w.reals(r.hidden_bias);
    w.save(path);
}

AnyModel read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    Reader rd({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, path.string());
    if (!rd.magic_ok()) throw FormatError(path.string() + ": not a checkpoint (bad magic)");
    if (const auto version = rd.u32(); version != kCheckpointVersion)
        throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t kind = rd.u32(), activation = rd.u32(), head = rd.u32(), n_dims = rd.u32();
    if (n_dims < 2 || n_dims > 64) throw FormatError(path.string() + ": implausible layer count");
    std::vector<std::size_t> dims(n_dims);
    for (auto& d : dims) d = rd.u32();

    AnyModel result;
    if (kind == kKindMlp) {
        if (activation > 1 || head > 1) throw FormatError(path.string() + ": unknown activation/head code");
        MlpModel m;
        m.layer_dims = dims;
        m.activation = activation ? Activation::relu : Activation::sigmoid;
        m.head = head ? OutputHead::reconstruction : OutputHead::softmax_classifier;
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            Matrix w(dims[l], dims[l + 1]);
            rd.reals(w.values());
            std::vector<double> b(dims[l + 1]);
            rd.reals(b);
            m.weights.push_back(std::move(w));
            m.biases.push_back(std::move(b));
        }
        result = std::move(m);
    } else if (kind == kKindRbm) {
        if (n_dims != 2) throw FormatError(path.string() + ": RBM checkpoint needs two dims");
        RbmModel r;
        r.n_visible = dims[0];
        r.n_hidden = dims[1];
        r.weights = Matrix(dims[0], dims[1]);
        rd.reals(r.weights.values());
        r.visible_bias.resize(dims[0]);
        rd.reals(r.visible_bias);
        r.hidden_bias.resize(dims[1]);
        rd.reals(r.hidden_bias);
        result = std::move(r);
    } else {
        throw FormatError(path.string() + ": unknown model kind " + std::to_string(kind));
    }
    if (!rd.at_end()) throw FormatError(path.string() + ": trailing bytes after checkpoint payload");
    return result;
}

}  // namespace critrep
