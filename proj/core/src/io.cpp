#include "kwe/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kwe/errors.hpp"

namespace kwe {

namespace {

constexpr std::array<char, 4> kMagic{'K', 'W', 'E', '1'};

template <class T>
T to_little(T x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U u = std::bit_cast<U>(x);
    U r = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) r |= ((u >> (8 * i)) & 0xff) << (8 * (sizeof(U) - 1 - i));
    return std::bit_cast<T>(r);
  }
}

template <class T>
void put(std::ostream& os, T x) {
  x = to_little(x);
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T x;
  if (!is.read(reinterpret_cast<char*>(&x), sizeof(T))) throw DomainError("snapshot '" + path + "' is truncated");
  return to_little(x);
}

double parse_double(std::string_view s, const std::string& path) {
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DomainError("csv '" + path + "': bad number '" + std::string(s) + "'");
  return x;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf;
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

std::string csv_row(const NormReport& r) {
  const double v[] = {r.time,     r.l1_xv,      r.linfM_xv,   r.linfx_l2v_alpha, r.l2x_l1v_w,
                      r.mass,     r.momentum.x, r.momentum.y, r.momentum.z,      r.energy,
                      r.momentN,  r.min_value,  r.boundary_mass_lost};
  std::string out;
  for (std::size_t i = 0; i < std::size(v); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

void write_csv(const std::string& path, std::span<const NormReport> reports) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << kCsvHeader << '\n';
  for (const auto& r : reports) f << csv_row(r) << '\n';
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

std::vector<NormReport> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line != kCsvHeader) throw DomainError("csv '" + path + "': unexpected header");
  std::vector<NormReport> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::array<double, 13> v{};
    std::size_t pos = 0, k = 0;
    while (k < v.size()) {
      const std::size_t c = line.find(',', pos);
      const std::string_view cell(line.data() + pos, (c == std::string::npos ? line.size() : c) - pos);
      v[k++] = parse_double(cell, path);
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    if (k != v.size()) throw DomainError("csv '" + path + "': row with wrong column count");
    NormReport r;
    r.time = v[0];
    r.l1_xv = v[1];
    r.linfM_xv = v[2];
    r.linfx_l2v_alpha = v[3];
    r.l2x_l1v_w = v[4];
    r.mass = v[5];
    r.momentum = {v[6], v[7], v[8]};
    r.energy = v[9];
    r.momentN = v[10];
    r.min_value = v[11];
    r.boundary_mass_lost = v[12];
    out.push_back(r);
  }
  return out;
}

void write_snapshot(const std::string& path, const DistributionField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  const auto& g = f.grid();
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.x.dim()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.x.n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.v.n()));
  put<double>(os, g.v.v_max());
  put<double>(os, g.x.x_max());
  put<double>(os, f.time);
  for (double x : f.values()) put<double>(os, x);
  if (!os) throw ConfigError("write to '" + path + "' failed");
}

DistributionField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open '" + path + "'");
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw DomainError("snapshot '" + path + "': wrong magic (expected KWE1)");
  const auto dim = get<std::uint32_t>(is, path);
  const auto nx = get<std::uint32_t>(is, path);
  const auto nv = get<std::uint32_t>(is, path);
  const double v_max = get<double>(is, path);
  const double x_max = get<double>(is, path);
  const double time = get<double>(is, path);
  const SpatialGrid xg = dim == 0 ? SpatialGrid() : SpatialGrid(static_cast<int>(dim), x_max, static_cast<int>(nx));
  GridHandle grid = make_grid(xg, VelocityGrid(v_max, static_cast<int>(nv)));
  std::vector<double> values(grid->size());
  for (double& x : values) x = get<double>(is, path);
  if (is.peek() != std::char_traits<char>::eof()) throw DomainError("snapshot '" + path + "': trailing bytes");
  return DistributionField(grid, std::move(values), time);
}

}  // namespace kwe
