#pragma once

// Artifact serialization: atomic file writes, CSV tables with a fingerprint
// footer, shortest round-trip number formatting, and the QDNLS1 binary
// snapshot format.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qdnls/diagnostics.hpp"
#include "qdnls/spectral.hpp"

namespace qdnls {

/// Shortest decimal text that parses back to exactly x ("inf", "-inf",
/// "nan" for non-finite values).
std::string format_double(double x);

/// Writes to a temporary sibling file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Comma-separated table with a header row and a trailing
/// "# fingerprint=<hash>" line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& cells);
  std::size_t rows() const noexcept { return rows_.size(); }

  std::string render(std::string_view fingerprint) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

/// Header row for diagnostics: t,mass,energy,grad_u,grad_v,grad_w,F,hs_0,hs_sc,hs_half,hs_1,gn_ratio
std::vector<std::string> diagnostics_header();
std::vector<double> diagnostics_cells(const DiagnosticsRow& r);

/// Binary snapshot: "QDNLS1\0", u32 version (1), u32 dim, u32 n, f64 period,
/// u8 repr, u32 component count, then (re, im) f64 pairs per value,
/// component by component, row-major, all little-endian.
std::string encode_snapshot(const TorusGrid& grid, Repr repr, int components,
                            std::span<const cplx> values);
std::string encode_snapshot(const SpectralField& f);
/// A state is stored as one record with 3 * dim components (u, then v, then w).
std::string encode_snapshot(const StateTriple& s);

struct DecodedSnapshot {
  TorusGrid grid;
  Repr repr;
  int components;
  std::vector<cplx> values;
};

/// Throws Error on bad magic, version, truncation, or inconsistent sizes.
DecodedSnapshot decode_snapshot(std::string_view bytes);
SpectralField decode_field(std::string_view bytes);
StateTriple decode_state(std::string_view bytes);

}  // namespace qdnls
