#pragma once

// SMSF/SMSM binary field files and small text helpers.
//
//   magic   4 bytes  "SMSF" (field) / "SMSM" (mask only)
//   u32     version = 1
//   u32     nx, ny, nz
//   f64     h
//   f64     origin[3]
//   u8      mask[nx*ny*nz]          (x fastest)
//   f64     values[interior count]  (mask order; SMSF only)
//
// All integers and doubles little-endian.

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include "sms/field.hpp"
#include "sms/grid.hpp"

namespace sms {

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("field file truncated");
    return v;
}

} // namespace detail

inline void write_mask(std::ostream& os, const DomainGrid& g, bool with_values) {
    os.write(with_values ? "SMSF" : "SMSM", 4);
    detail::put<std::uint32_t>(os, 1u);
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nz));
    detail::put<double>(os, g.h);
    for (int a = 0; a < 3; ++a) detail::put<double>(os, g.origin[a]);
    os.write(reinterpret_cast<const char*>(g.mask.data()), static_cast<std::streamsize>(g.mask.size()));
}

inline void save_field(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    const DomainGrid& g = *f.grid;
    write_mask(os, g, true);
    for (std::size_t c = 0; c < g.ncells(); ++c)
        if (g.mask[c]) detail::put<double>(os, f.v[c]);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline void save_mask(const std::string& path, const DomainGrid& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_mask(os, g, false);
    if (!os) throw std::runtime_error("write failed: " + path);
}

struct LoadedField {
    std::shared_ptr<DomainGrid> grid;
    ScalarField field;  // empty (all zero) for SMSM files
    bool has_values = false;
};

inline LoadedField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is) throw std::runtime_error("field file truncated: " + path);
    const bool with_values = std::memcmp(magic, "SMSF", 4) == 0;
    if (!with_values && std::memcmp(magic, "SMSM", 4) != 0)
        throw std::runtime_error("bad magic in " + path);
    const auto version = detail::get<std::uint32_t>(is);
    if (version != 1u) throw std::runtime_error("unsupported field file version");
    const int nx = static_cast<int>(detail::get<std::uint32_t>(is));
    const int ny = static_cast<int>(detail::get<std::uint32_t>(is));
    const int nz = static_cast<int>(detail::get<std::uint32_t>(is));
    const double h = detail::get<double>(is);
    std::array<double, 3> origin{};
    for (int a = 0; a < 3; ++a) origin[a] = detail::get<double>(is);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny * nz);
    is.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
    if (!is) throw std::runtime_error("field file truncated: " + path);

    LoadedField out;
    out.grid = std::make_shared<DomainGrid>(build_custom(nx, ny, nz, h, origin, std::move(mask)));
    out.field = ScalarField(*out.grid);
    out.has_values = with_values;
    if (with_values) {
        for (std::size_t c = 0; c < out.grid->ncells(); ++c)
            if (out.grid->mask[c]) out.field.v[c] = detail::get<double>(is);
    }
    return out;
}

// fixed-format double rendering used by every CSV/report writer
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace sms
