#include "gibq/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/sha.h>

#include "gibq/errors.hpp"

namespace gibq {

Json field_to_json(const SpectralField& f) {
  Json entries = Json::array();
  for (const auto& m : f.modes())
    entries.push_back({{"xi", m.xi}, {"re", m.value.real()}, {"im", m.value.imag()}});
  return {{"period", f.lattice().period},
          {"domain", f.lattice().domain == Domain::Torus ? "torus" : "line"},
          {"entries", std::move(entries)}};
}

SpectralField field_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw ConfigError("a spectral field must be a JSON object");
    for (const auto& [key, value] : j.items())
      if (key != "period" && key != "entries" && key != "domain")
        throw ConfigError(fmt::format("unknown key '{}' in spectral field", key));
    if (!j.contains("entries")) throw ConfigError("spectral field lacks 'entries'");
    const double period = j.value("period", 1.0);
    const std::string domain = j.value("domain", std::string("torus"));
    FrequencyLattice lattice;
    if (domain == "torus")
      lattice = FrequencyLattice::torus(period);
    else if (domain == "line")
      lattice = FrequencyLattice::line_approx(period);
    else
      throw ConfigError(fmt::format("unknown domain '{}'", domain));
    std::vector<Mode> modes;
    for (const auto& e : j.at("entries")) {
      for (const auto& [key, value] : e.items())
        if (key != "xi" && key != "re" && key != "im")
          throw ConfigError(fmt::format("unknown key '{}' in field entry", key));
      modes.push_back({e.at("xi").get<Frequency>(),
                       Complex(e.value("re", 0.0), e.value("im", 0.0))});
    }
    return SpectralField(lattice, std::move(modes));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed spectral field: {}", e.what()));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

Json pair_to_json(const InitialPair& pair) {
  return {{"u0", field_to_json(pair.u0)}, {"u1", field_to_json(pair.u1)}};
}

InitialPair pair_from_json(const Json& j) {
  if (j.is_object() && j.contains("u0")) {
    for (const auto& [key, value] : j.items())
      if (key != "u0" && key != "u1") throw ConfigError(fmt::format("unknown key '{}' in pair", key));
    InitialPair p;
    p.u0 = field_from_json(j.at("u0"));
    p.u1 = j.contains("u1") ? field_from_json(j.at("u1")) : SpectralField(p.u0.lattice());
    if (!(p.u0.lattice() == p.u1.lattice())) throw ConfigError("pair components use different lattices");
    return p;
  }
  const SpectralField f = field_from_json(j);
  return {f, SpectralField(f.lattice())};
}

Json trajectory_to_json(const Trajectory& t) {
  Json fields = Json::array();
  for (const auto& v : t.values()) fields.push_back(field_to_json(v));
  return {{"horizon", t.horizon()}, {"nodes", t.nodes()}, {"fields", std::move(fields)}};
}

Json params_to_json(const InflationParams& p) {
  return {{"n", p.n},         {"k", p.k}, {"s", p.s}, {"sigma", p.sigma}, {"delta", p.delta},
          {"N", p.N},         {"R", p.R}, {"T", p.T}, {"A", p.A},
          {"adjustments", p.adjustments}};
}

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json ledger_to_json(const EstimateLedger& L) {
  Json conditions = Json::array();
  for (const auto& c : L.conditions)
    conditions.push_back({{"name", c.name},
                          {"lhs", finite_or_null(c.lhs)},
                          {"rhs", finite_or_null(c.rhs)},
                          {"margin", finite_or_null(c.margin)},
                          {"shorthand_margin", finite_or_null(c.shorthand)},
                          {"holds", c.holds}});
  Json lines = Json::array();
  for (const auto& l : L.lemma_lines)
    lines.push_back({{"name", l.name},
                     {"lhs", finite_or_null(l.lhs)},
                     {"rhs", finite_or_null(l.rhs)},
                     {"ratio", finite_or_null(l.margin)}});
  return {{"g_s_of_A", L.g_s_of_A},     {"f_sq_of_A", L.f_sq_of_A},
          {"sigma_variant", L.sigma_variant}, {"conditions", std::move(conditions)},
          {"lemma_lines", std::move(lines)},  {"xi1_lower_ratio", L.xi1_lower_ratio}};
}

Json report_to_json(const InflationReport& r) {
  Json j;
  j["schema"] = r.schema;
  j["params"] = params_to_json(r.params);
  j["family"] = r.family;
  j["method"] = r.method;
  j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  j["max_generation"] = r.max_generation;
  j["status"] = r.status;
  j["perturbation"] = {{"hs", r.perturbation_hs},
                       {"sigma", r.perturbation_sigma},
                       {"family", r.perturbation_family},
                       {"ws2inf", r.perturbation_ws2inf}};
  Json xi = Json::array();
  for (double v : r.xi_hs) xi.push_back(finite_or_null(v));
  j["xi_hs"] = std::move(xi);
  j["series_ledger"] = r.ledger;
  j["series_ratios"] = r.ratios;
  j["tail_sum"] = finite_or_null(r.tail_sum);
  j["series_tail_residual"] = finite_or_null(r.series_tail_residual);
  j["xi1_phi"] = {{"hs", r.xi1_phi_hs}, {"sigma", r.xi1_phi_sigma}, {"family", r.xi1_phi_family}};
  j["lower_bound_ratio"] = r.lower_bound_ratio;
  j["family_lower_bound_ratio"] = r.family_lower_bound_ratio;
  j["solution"] = {{"hs", finite_or_null(r.solution_hs)},
                   {"sigma", finite_or_null(r.solution_sigma)},
                   {"family", finite_or_null(r.solution_family)}};
  j["fixed_point_distance"] = finite_or_null(r.fixed_point_distance);
  j["resonant_split"] = {{"i1_hs", r.i1_hs}, {"i2_hs", r.i2_hs}};
  j["sup_weight_ratio"] = r.sup_weight_ratio;
  j["estimates"] = ledger_to_json(r.estimates);
  j["diagnostics"] = r.diagnostics;
  return j;
}

std::string grid_to_csv(const GridField& g) {
  std::string out = "x,value\n";
  const double M = static_cast<double>(g.samples.size());
  for (std::size_t i = 0; i < g.samples.size(); ++i)
    out += fmt::format("{:.17g},{:.17g}\n", g.period * static_cast<double>(i) / M, g.samples[i]);
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ComputationError(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw ComputationError(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::string sha1_hex(const std::string& data) {
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::string hex;
  for (unsigned char c : digest) hex += fmt::format("{:02x}", c);
  return hex;
}

std::string git_blob_hash(const std::string& content) {
  std::string obj = "blob " + std::to_string(content.size());
  obj.push_back('\0');
  obj += content;
  return sha1_hex(obj);
}

}  // namespace gibq
