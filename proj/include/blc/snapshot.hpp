#pragma once

#include "blc/field.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace blc {

// Binary snapshot record, little-endian:
//   char[4]  magic "BLCF"
//   u32      version (1)
//   u32      dim
//   u32      M
//   u32      rank
//   f64      time
//   f64[]    physical samples, component-major, row-major within a component
// A .blcf file holds one or more records back to back.

inline constexpr std::uint32_t snapshot_version = 1;

struct SnapshotRecord {
    double time;
    PhysicalField field;
};

void write_record(std::ostream& out, const PhysicalField& field, double time);
/// Reads one record; throws std::runtime_error on a malformed header.
SnapshotRecord read_record(std::istream& in, double period = 2.0 * std::numbers::pi);

void write_snapshot(const std::filesystem::path& path, std::span<const PhysicalField* const> fields,
                    double time);
std::vector<SnapshotRecord> read_snapshot(const std::filesystem::path& path,
                                          double period = 2.0 * std::numbers::pi);

}  // namespace blc
