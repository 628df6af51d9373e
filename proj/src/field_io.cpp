#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "fracop/core.hpp"
#include "fracop/error.hpp"

namespace fracop {

namespace {

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  os.write(b, 8);
}

double get_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | b[k];
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(std::ostream& os, const Field& f) {
  nlohmann::ordered_json h;
  h["n"] = f.grid.n;
  h["extent"] = f.grid.extent;
  h["points"] = f.grid.points;
  h["label"] = f.label;
  os << h.dump() << '\n';
  for (double v : f.values) put_le(os, v);
  if (!os) throw Error("write_field: stream failure");
}

Field read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParamError("read_field: missing header line");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParamError(std::string("read_field: malformed header: ") + e.what());
  }
  for (const char* key : {"n", "extent", "points"})
    if (!h.contains(key)) throw ParamError(std::string("read_field: header lacks '") + key + "'");
  GridSpec g = make_grid(h["n"].get<int>(), h["extent"].get<double>(), h["points"].get<std::size_t>());
  std::vector<unsigned char> raw(g.size() * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) throw ParamError("read_field: truncated payload");
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_le(raw.data() + 8 * i);
  return Field(g, std::move(values), h.value("label", std::string{}));
}

void save_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_field(os, f);
}

Field load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("cannot open '" + path + "' for reading");
  return read_field(is);
}

void write_field_csv(std::ostream& os, const Field& f) {
  const int n = f.grid.n;
  for (int a = 0; a < n; ++a) os << 'i' << a << ',';
  for (int a = 0; a < n; ++a) os << 'x' << a << ',';
  os << "value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = f.grid.unflatten(i);
    for (int a = 0; a < n; ++a) os << idx[a] << ',';
    for (int a = 0; a < n; ++a) os << format_double(f.grid.coord(idx[a])) << ',';
    os << format_double(f[i]) << '\n';
  }
}

}  // namespace fracop
