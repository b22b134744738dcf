#include "archmix/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "archmix/errors.hpp"

namespace archmix {

namespace {

using nlohmann::json;

Schedule parse_schedule(const json& j, const std::string& field) {
  if (j.is_number()) return Schedule::constant(j.get<double>());
  if (j.is_object() && j.contains("knots") && j.contains("values")) {
    return Schedule::piecewise(j.at("knots").get<std::vector<long>>(),
                               j.at("values").get<std::vector<double>>());
  }
  throw ValidationError(field + ": expected a number or {knots, values}");
}

TailClass parse_tail(const json& j) {
  TailClass tail;
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "geometric")
    tail.kind = TailClass::Kind::Geometric;
  else if (cls == "polynomial")
    tail.kind = TailClass::Kind::Polynomial;
  else
    throw ValidationError("tail.class: expected geometric|polynomial, got '" + cls + "'");
  tail.param = j.at("param").get<double>();
  return tail;
}

ArchInfCoeffs parse_archinf_coeffs(const json& spec) {
  const json& j = spec.at("coeffs");
  if (j.is_array()) {
    auto head = j.get<std::vector<double>>();
    if (spec.contains("tail")) return ArchInfCoeffs::explicit_head(std::move(head), parse_tail(spec.at("tail")));
    return ArchInfCoeffs::finite(std::move(head));
  }
  if (j.is_object() && j.contains("rule")) {
    const std::string rule = j.at("rule").get<std::string>();
    if (rule == "geometric")
      return ArchInfCoeffs::geometric_rule(j.at("ratio").get<double>(), j.at("sum").get<double>());
    if (rule == "polynomial")
      return ArchInfCoeffs::polynomial_rule(j.at("exponent").get<double>(),
                                            j.at("sum").get<double>());
    throw ValidationError("coeffs.rule: expected geometric|polynomial, got '" + rule + "'");
  }
  throw ValidationError("coeffs: expected an array or a {rule,...} object");
}

LoadedSpec parse_spec_json(const json& j, const std::string& id) {
  LoadedSpec out;
  out.id = id;
  if (j.contains("innovation")) out.innovation_name = j.at("innovation").get<std::string>();

  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "tvarch") {
    TvArchSpec spec;
    spec.p = j.at("p").get<int>();
    spec.intercept = parse_schedule(j.at("a0"), "a0");
    const json& cj = j.at("coeffs");
    if (!cj.is_array()) throw ValidationError("coeffs: tvarch expects an array of schedules");
    for (std::size_t i = 0; i < cj.size(); ++i)
      spec.coeffs.push_back(parse_schedule(cj[i], "coeffs[" + std::to_string(i) + "]"));
    spec.delta = j.at("delta").get<double>();
    spec.validate_basic();
    out.model = std::move(spec);
  } else if (kind == "archinf") {
    ArchInfSpec spec;
    spec.a0 = j.at("a0").get<double>();
    spec.coeffs = parse_archinf_coeffs(j);
    spec.delta = j.at("delta").get<double>();
    spec.nu = j.value("nu", 1.0);
    if (j.contains("moment_bound")) spec.moment_bound = j.at("moment_bound").get<double>();
    spec.validate_basic();
    out.model = std::move(spec);
  } else {
    throw ValidationError("kind: expected tvarch|archinf, got '" + kind + "'");
  }
  return out;
}

}  // namespace

LoadedSpec parse_spec_json_text(const std::string& text, const std::string& id) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("spec JSON parse error at byte " + std::to_string(e.byte) + ": " +
                          e.what());
  }
  try {
    return parse_spec_json(j, id);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("spec JSON: ") + e.what());
  }
}

LoadedSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string id = path;
  if (const auto slash = id.find_last_of('/'); slash != std::string::npos)
    id = id.substr(slash + 1);
  if (const auto dot = id.rfind(".json"); dot != std::string::npos) id = id.substr(0, dot);
  return parse_spec_json_text(buf.str(), id);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  out << render_csv(table);
}

}  // namespace archmix
