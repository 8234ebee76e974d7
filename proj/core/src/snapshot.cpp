#include "lfk/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lfk {

static_assert(std::endian::native == std::endian::little,
              "LFK1 I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'L', 'F', 'K', '1'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("snapshot truncated");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Field& field, double time) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open snapshot for write: " + path);
    out.write(kMagic, 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.n()));
    put<double>(out, field.grid.length());
    put<double>(out, time);
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("snapshot write failed: " + path);
}

SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not an LFK1 snapshot: " + path);
    auto dim = get<std::uint32_t>(in);
    auto n = get<std::uint32_t>(in);
    double length = get<double>(in);
    double time = get<double>(in);
    Grid grid(static_cast<int>(dim), static_cast<std::size_t>(n), length);
    Field field(grid);
    in.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("snapshot truncated: " + path);
    return SnapshotData{std::move(field), time};
}

}  // namespace lfk
