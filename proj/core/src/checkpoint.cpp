#include "seqramp/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "seqramp/common.hpp"

namespace seqramp {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw DataError("checkpoint truncated: " + path);
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, std::span<Parameter* const> params) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write checkpoint: " + path);
    os.write(kMagic, 4);
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint64_t>(params.size()));
    for (const Parameter* p : params) {
        write_pod(os, static_cast<std::uint32_t>(p->name.size()));
        os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        write_pod(os, static_cast<std::uint32_t>(p->value.shape.size()));
        for (int d : p->value.shape) write_pod(os, static_cast<std::uint32_t>(d));
        os.write(reinterpret_cast<const char*>(p->value.values.data()),
                 static_cast<std::streamsize>(p->value.values.size() * sizeof(double)));
    }
    if (!os) throw DataError("failed writing checkpoint: " + path);
}

void load_checkpoint(const std::string& path, std::span<Parameter* const> params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a checkpoint file: " + path);
    const auto version = read_pod<std::uint32_t>(is, path);
    if (version != kVersion) throw DataError("unsupported checkpoint version in " + path);
    const auto count = read_pod<std::uint64_t>(is, path);
    if (count != params.size())
        throw DataError("checkpoint parameter count mismatch in " + path);
    for (Parameter* p : params) {
        const auto name_len = read_pod<std::uint32_t>(is, path);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (!is) throw DataError("checkpoint truncated: " + path);
        if (name != p->name)
            throw DataError("checkpoint parameter name mismatch: expected " + p->name +
                            ", found " + name + " in " + path);
        const auto rank = read_pod<std::uint32_t>(is, path);
        std::vector<int> shape(rank);
        for (auto& d : shape) d = static_cast<int>(read_pod<std::uint32_t>(is, path));
        if (shape != p->value.shape)
            throw DataError("checkpoint shape mismatch for " + p->name + " in " + path);
        is.read(reinterpret_cast<char*>(p->value.values.data()),
                static_cast<std::streamsize>(p->value.values.size() * sizeof(double)));
        if (!is) throw DataError("checkpoint truncated: " + path);
    }
}

} // namespace seqramp
