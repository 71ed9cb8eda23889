#include "coco/tensor_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace coco {

namespace {

constexpr char kMagic[4] = {'C', 'O', 'C', 'O'};
constexpr std::uint8_t kVersion = 1;

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("tensor io: " + what);
}

template <typename T>
void write_le(std::ostream& out, T value) {
    // Little-endian host assumed; payload is defined little-endian.
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) fail("truncated binary payload");
    return value;
}

}  // namespace

Tensor read_tensor_text(std::istream& in) {
    std::size_t order = 0;
    if (!(in >> order) || order == 0) fail("bad header: expected positive tensor order");
    std::vector<std::size_t> dims(order);
    std::size_t n = 1;
    for (auto& d : dims) {
        if (!(in >> d) || d == 0) fail("bad header: expected positive mode size");
        n *= d;
    }
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> data[i])) fail("expected " + std::to_string(n) + " values");
    return Tensor(std::move(dims), std::move(data));
}

Tensor read_tensor_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) fail("bad magic bytes");
    const auto version = read_le<std::uint8_t>(in);
    if (version != kVersion) fail("unsupported format version " + std::to_string(version));
    const auto order = read_le<std::uint32_t>(in);
    if (order == 0) fail("bad header: zero tensor order");
    std::vector<std::size_t> dims(order);
    std::size_t n = 1;
    for (auto& d : dims) {
        d = static_cast<std::size_t>(read_le<std::uint64_t>(in));
        if (d == 0) fail("bad header: zero mode size");
        n *= d;
    }
    std::vector<double> data(n);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) fail("truncated binary payload");
    return Tensor(std::move(dims), std::move(data));
}

Tensor read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.clear();
    in.seekg(0);
    if (std::memcmp(magic, kMagic, 4) == 0) return read_tensor_binary(in);
    return read_tensor_text(in);
}

void write_tensor_text(const std::string& path, const Tensor& t) {
    std::ofstream out(path);
    if (!out) fail("cannot open " + path + " for writing");
    out << t.order();
    for (std::size_t d : t.dims()) out << ' ' << d;
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    const auto& data = t.data();
    for (std::size_t i = 0; i < data.size(); ++i)
        out << data[i] << ((i + 1) % 8 == 0 || i + 1 == data.size() ? '\n' : ' ');
    if (!out) fail("write failed for " + path);
}

void write_tensor_binary(const std::string& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    write_le(out, kVersion);
    write_le(out, static_cast<std::uint32_t>(t.order()));
    for (std::size_t d : t.dims()) write_le(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!out) fail("write failed for " + path);
}

}  // namespace coco
