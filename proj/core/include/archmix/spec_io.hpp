#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "archmix/process.hpp"

namespace archmix {

struct LoadedSpec {
  std::variant<TvArchSpec, ArchInfSpec> model;
  std::string innovation_name;  // empty when the file names none
  std::string id;

  bool is_tvarch() const { return std::holds_alternative<TvArchSpec>(model); }
  const TvArchSpec& tvarch() const { return std::get<TvArchSpec>(model); }
  const ArchInfSpec& archinf() const { return std::get<ArchInfSpec>(model); }
};

// Schema (JSON):
//   {"kind":"tvarch","p":2,"a0":0.1,"coeffs":[0.3,{"knots":[0,50],"values":[0.2,0.1]}],
//    "delta":0.4,"innovation":"exponential"}
//   {"kind":"archinf","a0":1.0,"coeffs":[0.5],"delta":0.4,"nu":1,
//    "tail":{"class":"geometric","param":0.5},"innovation":"uniform02"}
//   coefficient rules: "coeffs":{"rule":"geometric","ratio":0.5,"sum":0.3}
//                      "coeffs":{"rule":"polynomial","exponent":2.5,"sum":0.5}
// Explicit archinf coefficient lists without "tail" are treated as finite
// support. "moment_bound" supplies E|X|^nu for nu > 1.
LoadedSpec parse_spec_json_text(const std::string& text, const std::string& id = "inline");
LoadedSpec load_spec_file(const std::string& path);

// Fixed 17-significant-digit formatting used by every CSV the tool writes.
std::string format_g17(double v);

std::uint64_t fnv1a64(const std::string& s);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as '# ...' lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
std::string render_csv(const CsvTable& table);

}  // namespace archmix
