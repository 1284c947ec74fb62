#pragma once

#include "chns/grid.hpp"

#include <filesystem>
#include <string>

namespace chns {

enum class SnapshotEncoding { ascii, binary };

struct Snapshot {
    ScalarField field;
    double time = 0.0;
    std::string name;
};

/// Writes a field snapshot.
///
/// Layout: one text header line `nx ny lx ly time name encoding` followed by
/// nx*ny row-major values (x fastest). ascii: one grid row per line, 17
/// significant digits. binary: raw little-endian IEEE-754 doubles. Readers
/// treat a header without the encoding token as ascii.
void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double time, const std::string& name,
                    SnapshotEncoding enc = SnapshotEncoding::ascii);
Snapshot read_snapshot(const std::filesystem::path& path);

/// CSV of a 1D slice: row `index` (axis 'x', varying x) or column `index` (axis 'y').
void write_slice_csv(const std::filesystem::path& path, const ScalarField& f, char axis, int index);

/// Binary portable pixmap (P6), nx by ny pixels, top row = largest y.
/// Gray level round(255 (v - lo)/(hi - lo)) clamped to [0, 255].
void write_heatmap_ppm(const std::filesystem::path& path, const ScalarField& f, double lo = -1.0, double hi = 1.0);

std::string format_double(double x);

}  // namespace chns
