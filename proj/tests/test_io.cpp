#include "chns/initial.hpp"
#include "chns/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

using namespace chns;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "chns_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Snapshot, BinaryRoundTripIsBitExact)
{
    const Grid g(13, 7, 1.5, 0.5);
    ScalarField f = spinodal_phase(g, 0.1, 0.4, 99);
    f(3, 2) = 1.0 / 3.0;
    f(0, 0) = -0.0;
    const auto path = scratch("bin.snap");
    write_snapshot(path, f, 0.125, "phi", SnapshotEncoding::binary);
    const Snapshot s = read_snapshot(path);
    EXPECT_EQ(s.field.grid(), g);
    EXPECT_EQ(s.time, 0.125);
    EXPECT_EQ(s.name, "phi");
    for (std::size_t k = 0; k < f.size(); ++k)
        EXPECT_EQ(std::bit_cast<std::uint64_t>(s.field[k]), std::bit_cast<std::uint64_t>(f[k]));
}

TEST(Snapshot, AsciiRoundTripIsExactWithSeventeenDigits)
{
    const Grid g(6, 5);
    const ScalarField f = spinodal_phase(g, 0.0, 0.9, 4);
    const auto path = scratch("ascii.snap");
    write_snapshot(path, f, 2.5, "sigma");
    const Snapshot s = read_snapshot(path);
    EXPECT_EQ(s.field, f);
    EXPECT_EQ(s.name, "sigma");
}

TEST(Snapshot, HeaderWithoutEncodingIsAscii)
{
    const auto path = scratch("legacy.snap");
    {
        std::ofstream os(path);
        os << "4 4 1 1 0.5 f\n1 2 3 4\n5 6 7 8\n9 10 11 12\n13 14 15 16\n";
    }
    const Snapshot s = read_snapshot(path);
    EXPECT_EQ(s.field(0, 0), 1.0);
    EXPECT_EQ(s.field(1, 1), 6.0);
    EXPECT_EQ(s.field(3, 3), 16.0);
    EXPECT_EQ(s.time, 0.5);
}

TEST(Heatmap, ZeroFieldIsUniformMidGray)
{
    const Grid g(5, 4);
    const auto path = scratch("zero.ppm");
    write_heatmap_ppm(path, ScalarField(g, 0.0));
    const std::string data = slurp(path);
    const std::string header = "P6\n5 4\n255\n";
    ASSERT_EQ(data.substr(0, header.size()), header);
    ASSERT_EQ(data.size(), header.size() + 3u * 5u * 4u);
    // floor(255 * 0.5 + 0.5) = 128.
    for (std::size_t k = header.size(); k < data.size(); ++k)
        EXPECT_EQ(static_cast<unsigned char>(data[k]), 128);
}

TEST(Heatmap, TopRowIsLargestY)
{
    const Grid g(4, 4);
    ScalarField f(g, -1.0);
    f(0, 3) = 1.0;
    const auto path = scratch("rows.ppm");
    write_heatmap_ppm(path, f);
    const std::string data = slurp(path);
    const std::size_t off = std::string("P6\n4 4\n255\n").size();
    EXPECT_EQ(static_cast<unsigned char>(data[off]), 255);     // first pixel: (0, ny-1)
    EXPECT_EQ(static_cast<unsigned char>(data[off + 3 * 4]), 0);   // second row: (0, ny-2)
}

TEST(Slice, CsvHasOneRowPerCell)
{
    const Grid g(4, 5);
    const ScalarField f = ScalarField::sample(g, [](double x, double y) { return x + y; });
    const auto path = scratch("slice.csv");
    write_slice_csv(path, f, 'x', 1);
    std::ifstream is(path);
    std::string line;
    int rows = 0;
    std::getline(is, line);
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Format, SeventeenSignificantDigits)
{
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
}
