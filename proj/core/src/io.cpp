#include "qdnls/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "qdnls/errors.hpp"

namespace qdnls {

static_assert(std::endian::native == std::endian::little, "snapshot codec assumes little-endian");

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), std::streamsize(contents.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("csv: row width differs from header");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

void CsvTable::add_row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  for (double x : cells) s.push_back(format_double(x));
  add_row(s);
}

std::string CsvTable::render(std::string_view fingerprint) const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  out += "# fingerprint=";
  out += fingerprint;
  out += '\n';
  return out;
}

std::vector<std::string> diagnostics_header() {
  return {"t", "mass", "energy", "grad_u", "grad_v", "grad_w", "F",
          "hs_0", "hs_sc", "hs_half", "hs_1", "gn_ratio"};
}

std::vector<double> diagnostics_cells(const DiagnosticsRow& r) {
  return {r.t,  r.mass,  r.energy,  r.grad_sq_u, r.grad_sq_v, r.grad_sq_w,
          r.F,  r.hs_0,  r.hs_sc,   r.hs_half,   r.hs_1,      r.gn_ratio};
}

namespace {

constexpr char kMagic[7] = {'Q', 'D', 'N', 'L', 'S', '1', '\0'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(std::string_view in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error("snapshot: truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_snapshot(const TorusGrid& grid, Repr repr, int components,
                            std::span<const cplx> values) {
  if (values.size() != grid.size() * std::size_t(components))
    throw InvalidArgument("snapshot: value count does not match header");
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, std::uint32_t(grid.dim()));
  put<std::uint32_t>(out, std::uint32_t(grid.n()));
  put<double>(out, grid.period());
  put<std::uint8_t>(out, static_cast<std::uint8_t>(repr));
  put<std::uint32_t>(out, std::uint32_t(components));
  out.reserve(out.size() + values.size() * 16);
  for (const cplx& z : values) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  return out;
}

std::string encode_snapshot(const SpectralField& f) {
  return encode_snapshot(f.grid(), f.repr(), f.components(), f.values());
}

std::string encode_snapshot(const StateTriple& s) {
  // Store spectral coefficients so a mixed-representation state is coherent.
  std::vector<cplx> all;
  for (int i = 0; i < 3; ++i) {
    const SpectralField f = to_spectral(s[i]);
    all.insert(all.end(), f.values().begin(), f.values().end());
  }
  return encode_snapshot(s.grid(), Repr::spectral, 3 * s.grid().dim(), all);
}

DecodedSnapshot decode_snapshot(std::string_view in) {
  if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0)
    throw Error("snapshot: bad magic");
  std::size_t pos = sizeof kMagic;
  const auto version = get<std::uint32_t>(in, pos);
  if (version != 1) throw Error("snapshot: unsupported version " + std::to_string(version));
  const auto dim = get<std::uint32_t>(in, pos);
  const auto n = get<std::uint32_t>(in, pos);
  const auto period = get<double>(in, pos);
  const auto repr = get<std::uint8_t>(in, pos);
  const auto comps = get<std::uint32_t>(in, pos);
  if (repr > 1) throw Error("snapshot: bad representation tag");
  TorusGrid grid(int(dim), int(n), period);
  const std::size_t count = grid.size() * comps;
  if (in.size() - pos != count * 16) throw Error("snapshot: payload size mismatch");
  std::vector<cplx> values(count);
  for (auto& z : values) {
    const double re = get<double>(in, pos);
    const double im = get<double>(in, pos);
    z = cplx(re, im);
  }
  return DecodedSnapshot{grid, static_cast<Repr>(repr), int(comps), std::move(values)};
}

SpectralField decode_field(std::string_view bytes) {
  DecodedSnapshot d = decode_snapshot(bytes);
  if (d.components != d.grid.dim()) throw Error("snapshot: not a single field");
  return SpectralField(d.grid, d.repr, std::move(d.values));
}

StateTriple decode_state(std::string_view bytes) {
  DecodedSnapshot d = decode_snapshot(bytes);
  const int dim = d.grid.dim();
  if (d.components != 3 * dim) throw Error("snapshot: not a state triple");
  const std::size_t per = d.grid.size() * dim;
  auto part = [&](int i) {
    return SpectralField(d.grid, d.repr,
                         std::vector<cplx>(d.values.begin() + i * per, d.values.begin() + (i + 1) * per));
  };
  return StateTriple(part(0), part(1), part(2));
}

}  // namespace qdnls
