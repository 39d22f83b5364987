#include "treepde/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "treepde/errors.hpp"

namespace treepde {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'P', 'D', 'E', 'F', 'L', 'D', '1'};

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_binary(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os.write(kMagic, 8);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.dim));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.nx()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.ny()));
    put<std::uint32_t>(os, 0);
    for (double v : {f.grid.x_lo, f.grid.x_hi, f.grid.y_lo, f.grid.y_hi, f.t}) put<double>(os, v);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw ConfigError("failed writing '" + path + "'");
}

Field read_field_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("not a field dump: " + path);
    Field f;
    f.grid.dim = static_cast<int>(get<std::uint32_t>(is));
    auto nx = get<std::uint32_t>(is), ny = get<std::uint32_t>(is);
    (void)get<std::uint32_t>(is);
    f.grid.x_lo = get<double>(is);
    f.grid.x_hi = get<double>(is);
    f.grid.y_lo = get<double>(is);
    f.grid.y_hi = get<double>(is);
    f.t = f.grid.T = get<double>(is);
    f.grid.dx = (f.grid.x_hi - f.grid.x_lo) / (nx - 1);
    f.values.resize(static_cast<std::size_t>(nx) * ny);
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!is) throw ConfigError("truncated field dump: " + path);
    return f;
}

void write_field_csv(const std::string& path, const Field& f, const std::string& comment) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    if (!comment.empty()) os << "# " << comment << "\n";
    os << (f.grid.dim == 2 ? "x,y,value\n" : "x,value\n");
    for (int j = 0; j < f.grid.ny(); ++j)
        for (int i = 0; i < f.grid.nx(); ++i) {
            os << fmt17(f.grid.x(i)) << ",";
            if (f.grid.dim == 2) os << fmt17(f.grid.y(j)) << ",";
            os << fmt17(f.at(i, j)) << "\n";
        }
    if (!os) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace treepde
