#include "blc/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace blc {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    const auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::array<unsigned char, sizeof(T)> le{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        le[i] = std::endian::native == std::endian::little ? bits[i] : bits[sizeof(T) - 1 - i];
    out.write(reinterpret_cast<const char*>(le.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> le{};
    in.read(reinterpret_cast<char*>(le.data()), sizeof(T));
    if (!in) throw std::runtime_error("snapshot: truncated record");
    std::array<unsigned char, sizeof(T)> bits{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits[i] = std::endian::native == std::endian::little ? le[i] : le[sizeof(T) - 1 - i];
    return std::bit_cast<T>(bits);
}

}  // namespace

void write_record(std::ostream& out, const PhysicalField& field, double time) {
    out.write("BLCF", 4);
    put_le<std::uint32_t>(out, snapshot_version);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid().dim()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid().points()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.rank()));
    put_le<double>(out, time);
    for (double v : field.data()) put_le<double>(out, v);
    if (!out) throw std::runtime_error("snapshot: write failed");
}

SnapshotRecord read_record(std::istream& in, double period) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "BLCF", 4) != 0)
        throw std::runtime_error("snapshot: bad magic");
    const auto version = get_le<std::uint32_t>(in);
    if (version != snapshot_version)
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    const auto dim = get_le<std::uint32_t>(in);
    const auto M = get_le<std::uint32_t>(in);
    const auto rank = get_le<std::uint32_t>(in);
    const double time = get_le<double>(in);
    if (rank > 2) throw std::runtime_error("snapshot: bad rank");
    PhysicalField field(Grid(static_cast<int>(dim), static_cast<int>(M), period),
                        static_cast<int>(rank));
    for (double& v : field.data()) v = get_le<double>(in);
    return {time, std::move(field)};
}

void write_snapshot(const std::filesystem::path& path, std::span<const PhysicalField* const> fields,
                    double time) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path.string());
    for (const PhysicalField* f : fields) write_record(out, *f, time);
}

std::vector<SnapshotRecord> read_snapshot(const std::filesystem::path& path, double period) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
    std::vector<SnapshotRecord> records;
    while (in.peek() != std::char_traits<char>::eof()) records.push_back(read_record(in, period));
    if (records.empty()) throw std::runtime_error("snapshot: empty file " + path.string());
    return records;
}

}  // namespace blc
