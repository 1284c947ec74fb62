#include "chns/io.hpp"

#include "chns/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace chns {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

std::array<unsigned char, 8> to_le_bytes(double x)
{
    auto bits = std::bit_cast<std::uint64_t>(x);
    std::array<unsigned char, 8> b{};
    for (int k = 0; k < 8; ++k) {
        b[k] = static_cast<unsigned char>(bits & 0xffu);
        bits >>= 8;
    }
    return b;
}

double from_le_bytes(const unsigned char* b)
{
    std::uint64_t bits = 0;
    for (int k = 7; k >= 0; --k)
        bits = (bits << 8) | b[k];
    return std::bit_cast<double>(bits);
}

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double time, const std::string& name,
                    SnapshotEncoding enc)
{
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
        throw std::invalid_argument("snapshot name must be a single non-empty token");
    const Grid& g = f.grid();
    const bool bin = enc == SnapshotEncoding::binary;
    std::ofstream os = open_out(path, bin);
    os << g.nx() << ' ' << g.ny() << ' ' << format_double(g.lx()) << ' ' << format_double(g.ly()) << ' '
       << format_double(time) << ' ' << name << ' ' << (bin ? "binary" : "ascii") << '\n';
    if (bin) {
        for (double x : f.values()) {
            const auto b = to_le_bytes(x);
            os.write(reinterpret_cast<const char*>(b.data()), 8);
        }
    } else {
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i)
                os << (i ? " " : "") << format_double(f(i, j));
            os << '\n';
        }
    }
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open snapshot " + path.string());
    std::string header;
    std::getline(is, header);
    std::istringstream hs(header);
    int nx = 0, ny = 0;
    double lx = 0, ly = 0, time = 0;
    std::string name, enc = "ascii";
    if (!(hs >> nx >> ny >> lx >> ly >> time >> name))
        throw std::runtime_error("malformed snapshot header in " + path.string());
    hs >> enc;
    const Grid g(nx, ny, lx, ly);
    std::vector<double> vals(g.cells());
    if (enc == "binary") {
        std::vector<unsigned char> raw(g.cells() * 8);
        is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (is.gcount() != static_cast<std::streamsize>(raw.size()))
            throw std::runtime_error("truncated binary snapshot " + path.string());
        for (std::size_t k = 0; k < vals.size(); ++k)
            vals[k] = from_le_bytes(raw.data() + 8 * k);
    } else if (enc == "ascii") {
        for (auto& v : vals) {
            std::string tok;
            if (!(is >> tok))
                throw std::runtime_error("truncated ascii snapshot " + path.string());
            v = std::strtod(tok.c_str(), nullptr);
        }
    } else {
        throw std::runtime_error("unknown snapshot encoding '" + enc + "'");
    }
    return Snapshot{ScalarField(g, std::move(vals)), time, name};
}

void write_slice_csv(const std::filesystem::path& path, const ScalarField& f, char axis, int index)
{
    const Grid& g = f.grid();
    std::ofstream os = open_out(path, false);
    if (axis == 'x') {
        if (index < 0 || index >= g.ny())
            throw std::out_of_range("slice row out of range");
        os << "x,value\n";
        for (int i = 0; i < g.nx(); ++i)
            os << format_double(g.xc(i)) << ',' << format_double(f(i, index)) << '\n';
    } else if (axis == 'y') {
        if (index < 0 || index >= g.nx())
            throw std::out_of_range("slice column out of range");
        os << "y,value\n";
        for (int j = 0; j < g.ny(); ++j)
            os << format_double(g.yc(j)) << ',' << format_double(f(index, j)) << '\n';
    } else {
        throw std::invalid_argument("slice axis must be 'x' or 'y'");
    }
}

void write_heatmap_ppm(const std::filesystem::path& path, const ScalarField& f, double lo, double hi)
{
    const Grid& g = f.grid();
    std::ofstream os = open_out(path, true);
    os << "P6\n" << g.nx() << ' ' << g.ny() << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(g.nx()) * 3);
    for (int j = g.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double s = (f(i, j) - lo) / (hi - lo);
            const double level = std::isfinite(s) ? std::clamp(std::floor(255.0 * s + 0.5), 0.0, 255.0) : 0.0;
            const auto c = static_cast<unsigned char>(level);
            row[3 * i] = row[3 * i + 1] = row[3 * i + 2] = c;
        }
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

}  // namespace chns
