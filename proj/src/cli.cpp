#include "gibq/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "gibq/construction.hpp"
#include "gibq/errors.hpp"
#include "gibq/harness.hpp"
#include "gibq/io.hpp"
#include "gibq/ktree.hpp"
#include "gibq/norms.hpp"
#include "gibq/oracle.hpp"
#include "gibq/parallel.hpp"
#include "gibq/series.hpp"
#include "gibq/verify.hpp"

namespace gibq {
namespace {

namespace fs = std::filesystem;

enum class LogLevel { Quiet, Info, Debug };
LogLevel g_log = LogLevel::Info;

void info(const std::string& msg) {
  if (g_log != LogLevel::Quiet) std::cerr << msg << "\n";
}

Json load_json(const std::string& path) {
  if (!fs::exists(path))
    throw ConfigError(fmt::format("config file '{}' not found; expected a JSON object", path));
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where));
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) {
      std::string keys;
      for (const auto& a : allowed) keys += (keys.empty() ? "" : ", ") + a;
      throw ConfigError(fmt::format("unknown key '{}' in {}; allowed keys: {}", key, where, keys));
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("key '{}' has the wrong type", key));
  }
}

template <class T>
T require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(fmt::format("{} requires key '{}'", where, key));
  return get_or<T>(j, key, T{});
}

void emit(const std::string& content, const std::string& out) {
  if (out.empty())
    std::cout << content;
  else
    write_atomic(out, content);
}

// ---------------------------------------------------------------- trees

int cmd_trees(int k, int J) {
  if (k < 2) throw ConfigError("--arity must be at least 2");
  if (J < 0) throw ConfigError("--max-gen must be non-negative");
  const auto table = count_trees(k, J);
  const auto bound = verify_count_bound(k, J);
  std::string out = "j,count,fuss_catalan,count_times_sq,root,holds,c0_measured\n";
  for (int j = 0; j <= J; ++j) {
    const BigInt weighted = table.counts[j] * (1 + j) * (1 + j);
    out += fmt::format("{},{},{},{},{:.12g},{},{:.12g}\n", j, table.counts[j].str(),
                       fuss_catalan(k, j).str(), weighted.str(), bound.per_j_root[j],
                       bound.holds[j] ? 1 : 0, bound.c0);
  }
  std::cout << out;
  return 0;
}

// ------------------------------------------------------------ construct

struct ScheduleArgs {
  int n = 1;
  int k = 2;
  double s = -0.75;
  double sigma = -0.75;
  std::optional<double> delta;
  std::optional<Frequency> N;
  bool no_separation = false;
};

InflationParams build_schedule(const ScheduleArgs& a) {
  ScheduleOptions so;
  so.delta_hint = a.delta;
  so.N_override = a.N;
  so.enforce_separation = !a.no_separation;
  try {
    return schedule(a.n, a.k, a.s, a.sigma, so);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

int cmd_construct(const ScheduleArgs& a, const std::string& out) {
  const InflationParams P = build_schedule(a);
  const BumpData bump = make_bump(P);
  Json j;
  j["schema"] = kReportSchemaVersion;
  j["params"] = params_to_json(P);
  j["sigma"] = bump.sigma;
  j["omega"] = bump.omega;
  j["phi"] = pair_to_json(bump.phi);
  emit(j.dump(2) + "\n", out);
  return 0;
}

// ---------------------------------------------------------------- solve

struct Problem {
  InitialPair data;
  int k = 2;
  double horizon = 0.0;
  int p = kDefaultTimeDegree;
};

/// {k, horizon, p, data | data_file | schedule{n, s, sigma, delta, N,
/// enforce_separation, seed}}. With a schedule the horizon defaults to T.
Problem load_problem(const std::string& path) {
  const Json cfg = load_json(path);
  reject_unknown(cfg, {"k", "horizon", "p", "data", "data_file", "schedule"}, "solve config");
  Problem pb;
  pb.k = get_or<int>(cfg, "k", 2);
  pb.p = get_or<int>(cfg, "p", kDefaultTimeDegree);
  if (pb.k < 2) throw ConfigError("k must be at least 2");
  if (pb.p < 2) throw ConfigError("p must be at least 2");
  const int sources = int(cfg.contains("data")) + int(cfg.contains("data_file")) + int(cfg.contains("schedule"));
  if (sources != 1) throw ConfigError("solve config needs exactly one of data, data_file, schedule");
  std::optional<double> scheduled_T;
  if (cfg.contains("data")) {
    pb.data = pair_from_json(cfg.at("data"));
  } else if (cfg.contains("data_file")) {
    fs::path file = cfg.at("data_file").get<std::string>();
    if (file.is_relative()) file = fs::path(path).parent_path() / file;
    pb.data = pair_from_json(load_json(file.string()));
  } else {
    const Json& sj = cfg.at("schedule");
    reject_unknown(sj, {"n", "s", "sigma", "delta", "N", "enforce_separation", "seed"}, "schedule");
    ScheduleArgs a;
    a.n = get_or<int>(sj, "n", 1);
    a.k = pb.k;
    a.s = get_or<double>(sj, "s", -0.75);
    a.sigma = get_or<double>(sj, "sigma", a.s);
    if (sj.contains("delta")) a.delta = sj.at("delta").get<double>();
    if (sj.contains("N")) a.N = sj.at("N").get<Frequency>();
    a.no_separation = !get_or<bool>(sj, "enforce_separation", true);
    const InflationParams P = build_schedule(a);
    InitialPair base = InitialPair::zero(FrequencyLattice::torus());
    if (sj.contains("seed")) base = sample_base_data(sj.at("seed").get<std::uint64_t>(), 0.5, 1.0);
    pb.data = perturbed_data(base, make_bump(P));
    scheduled_T = P.T;
  }
  if (cfg.contains("horizon"))
    pb.horizon = get_or<double>(cfg, "horizon", 0.0);
  else if (scheduled_T)
    pb.horizon = *scheduled_T;
  else
    throw ConfigError("solve config requires 'horizon'");
  if (!(pb.horizon > 0)) throw ConfigError("horizon must be positive");
  return pb;
}

int cmd_solve(const std::string& config, int J, const std::string& method, double tol,
              const std::string& out) {
  const Problem pb = load_problem(config);
  std::string csv = "j,sup_l1,ratio\n";
  if (method == "series") {
    SeriesBuilder builder(pb.data, pb.k, pb.horizon, pb.p);
    const auto acc = partial_sum(builder, J);
    for (int j = 0; j <= J; ++j)
      csv += fmt::format("{},{:.12g},{:.12g}\n", j, acc.ledger[j], acc.ratios[j]);
    info(fmt::format("fitted constant {:.6g}, tail residual {:.6g}", acc.fitted_c,
                     tail_residual(acc, pb.data)));
  } else if (method == "fixed-point") {
    FixedPointOptions fo;
    fo.degree = pb.p;
    fo.max_iterations = J > 0 ? J : fo.max_iterations;
    const auto fp = fixed_point(pb.data, pb.k, pb.horizon, tol, fo);
    for (std::size_t i = 0; i < fp.distances.size(); ++i) {
      const double ratio = i ? fp.distances[i] / fp.distances[i - 1] : 0.0;
      csv += fmt::format("{},{:.12g},{:.12g}\n", i + 1, fp.distances[i], ratio);
    }
    info(fmt::format("contraction factor {:.6g} (predicted {:.6g})", fp.contraction_factor,
                     fp.predicted_factor));
  } else {
    throw ConfigError(fmt::format("unknown method '{}'; use series or fixed-point", method));
  }
  emit(csv, out);
  return 0;
}

// ---------------------------------------------------------------- norms

int cmd_norms(const std::string& field, const std::string& spec_text, bool embeddings, int count,
              std::uint64_t seed, const std::string& out) {
  if (embeddings) {
    const std::vector<double> regularities = {-0.75, -0.25, 0.0, 0.5};
    const auto corpus = embedding_corpus(seed, count);
    std::string csv = "field,s,check,lhs,rhs,margin,holds\n";
    bool all = true;
    auto row = [&](std::size_t i, double s, const InequalityLine& l) {
      csv += fmt::format("{},{:.6g},{},{:.12g},{:.12g},{:.12g},{}\n", i, s, l.name, l.lhs, l.rhs,
                         l.margin, l.holds ? 1 : 0);
      all = all && l.holds;
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const double s = regularities[i % regularities.size()];
      for (const auto& l : check_embeddings(corpus[i], s).lines) row(i, s, l);
      const auto alg = check_algebra(corpus[i], corpus[(i + 1) % corpus.size()]);
      row(i, 0.0, alg.fl1);
      row(i, 0.0, alg.m21);
    }
    emit(csv, out);
    return all ? 0 : 1;
  }
  if (field.empty() || spec_text.empty())
    throw ConfigError("norms needs --field and --spec, or --check-embeddings");
  const NormSpec spec = NormSpec::parse(spec_text);
  const Json j = load_json(field);
  const bool is_pair = j.is_object() && j.contains("u0");
  const double value = is_pair ? norm(pair_from_json(j), spec) : norm(field_from_json(j), spec);
  emit(fmt::format("{:.17g}\n", value), out);
  return 0;
}

// --------------------------------------------------------------- oracle

std::string field_csv(const SpectralField& f) {
  std::string csv = "xi,re,im\n";
  for (const auto& m : f.modes())
    csv += fmt::format("{},{:.17g},{:.17g}\n", m.xi, m.value.real(), m.value.imag());
  return csv;
}

int cmd_oracle(const std::string& mode, const std::string& config, double dt, int depth,
               long long a, long long b, int A, const std::string& out) {
  if (mode == "sandwich") {
    if (A < 1) throw ConfigError("--A must be positive");
    const auto rep = convolution_sandwich(a, b, A);
    std::string csv = "a,b,A,lower_constant,upper_constant,support_ok,holds\n";
    csv += fmt::format("{},{},{},{:.12g},{:.12g},{},{}\n", a, b, A, rep.lower_constant,
                       rep.upper_constant, rep.support_ok ? 1 : 0, rep.holds() ? 1 : 0);
    emit(csv, out);
    return 0;
  }
  if (config.empty()) throw ConfigError(fmt::format("oracle --mode {} needs --config", mode));
  const Problem pb = load_problem(config);
  if (mode == "rk4") {
    Rk4Options ro;
    ro.dt = dt;
    ro.closure_depth = depth;
    ro.output_degree = pb.p;
    const auto res = rk4_solve(pb.data, pb.k, pb.horizon, ro);
    info(fmt::format("rk4: {} steps of {:.6g}, closure {} modes, tail {:.3g}, energy drift {:.3g}",
                     res.steps, res.dt, res.closure.size(), res.tail, res.energy_drift));
    emit(field_csv(res.trajectory.final_value()), out);
    return 0;
  }
  if (mode == "xi1") {
    const SpectralField closed = xi1_closed_form(pb.data, pb.k, pb.horizon);
    const SpectralField direct = xi_term(pb.data, pb.k, 1, pb.horizon, pb.p).trajectory.final_value();
    const double scale = std::max(closed.l1(), direct.l1());
    info(fmt::format("closed form vs Duhamel path: relative l1 gap {:.3g}",
                     scale > 0 ? (closed - direct).l1() / scale : 0.0));
    emit(field_csv(closed), out);
    return 0;
  }
  throw ConfigError(fmt::format("unknown oracle mode '{}'; use rk4, xi1 or sandwich", mode));
}

// -------------------------------------------------------------- inflate

SweepConfig parse_sweep_config(const Json& cfg) {
  reject_unknown(cfg,
                 {"k", "s", "sigma", "delta", "n_list", "N_list", "families", "seed", "J", "p",
                  "method", "enforce_separation"},
                 "inflate config");
  SweepConfig c;
  c.k = get_or<int>(cfg, "k", 2);
  c.s = get_or<double>(cfg, "s", -0.75);
  c.sigma = get_or<double>(cfg, "sigma", c.s);
  if (cfg.contains("delta")) c.delta = get_or<double>(cfg, "delta", 0.0);
  c.n_list = get_or<std::vector<int>>(cfg, "n_list", {});
  c.N_list = get_or<std::vector<Frequency>>(cfg, "N_list", {});
  if (c.n_list.empty() && c.N_list.empty()) throw ConfigError("inflate config needs n_list or N_list");
  if (cfg.contains("families")) {
    c.families.clear();
    for (const auto& f : get_or<std::vector<std::string>>(cfg, "families", {}))
      c.families.push_back(NormSpec::parse(f));
  } else {
    c.families = {NormSpec::sobolev(c.s)};
  }
  if (cfg.contains("seed")) c.seed = get_or<std::uint64_t>(cfg, "seed", 0);
  c.J = get_or<int>(cfg, "J", 8);
  c.p = get_or<int>(cfg, "p", kDefaultTimeDegree);
  try {
    c.method = parse_method(get_or<std::string>(cfg, "method", "series"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  c.enforce_separation = get_or<bool>(cfg, "enforce_separation", true);
  if (c.k < 2) throw ConfigError("k must be at least 2");
  if (c.J < 1) throw ConfigError("J must be at least 1");
  if (c.p < 2) throw ConfigError("p must be at least 2");
  for (int n : c.n_list)
    if (n < 1) throw ConfigError("n_list entries must be positive");
  return c;
}

int cmd_inflate(const std::string& config, const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("inflate needs --out");
  const Json cfg = load_json(config);
  const SweepConfig sc = parse_sweep_config(cfg);
  const SweepResult result = sweep(sc);

  Json reports = Json::array();
  bool failed = false;
  for (const auto& r : result.reports) {
    reports.push_back(report_to_json(r));
    failed = failed || r.status.rfind("error", 0) == 0;
  }
  const std::string reports_text = reports.dump(2) + "\n";
  const fs::path dir(out_dir);
  write_atomic(dir / "runs.csv", result.csv);
  write_atomic(dir / "reports.json", reports_text);

  Json manifest;
  manifest["schema"] = kManifestSchemaVersion;
  manifest["report_schema"] = kReportSchemaVersion;
  manifest["tool_version"] = kVersion;
  manifest["config"] = cfg;
  manifest["config_hash"] = git_blob_hash(cfg.dump());
  manifest["outputs"] = Json::array({
      Json{{"path", "runs.csv"}, {"git_blob", git_blob_hash(result.csv)}},
      Json{{"path", "reports.json"}, {"git_blob", git_blob_hash(reports_text)}},
  });
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  info(fmt::format("{} runs written to {}", result.reports.size(), dir.string()));
  return failed ? 1 : 0;
}

// ----------------------------------------------------------- verify-all

int cmd_verify_all(bool quick, std::uint64_t seed, const std::string& out_dir) {
  VerifyOptions vo;
  vo.quick = quick;
  vo.seed = seed;
  std::string text;
  bool all = true;
  verify_all(vo, [&](const CriterionResult& r) {
    const std::string block = render(r);
    std::cout << block << std::flush;
    text += block;
    all = all && r.pass;
  });
  const std::string tail = fmt::format("digest {}\n", sha1_hex(text));
  std::cout << tail;
  if (!out_dir.empty()) write_atomic(fs::path(out_dir) / "verify.txt", text + tail);
  return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"gIBq norm-inflation toolkit"};
  app.require_subcommand(0, 1);
  bool version = false;
  std::size_t threads = 0;
  std::string log_level = "info";
  app.add_flag("--version", version, "print tool and schema versions");
  app.add_option("--threads", threads, "worker cap (GIBQ_THREADS takes precedence)");
  app.add_option("--log-level", log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  int arity = 2, max_gen = 6;
  auto* trees = app.add_subcommand("trees", "tree count table and measured C0 as CSV");
  trees->add_option("--arity", arity)->required();
  trees->add_option("--max-gen", max_gen)->required();

  ScheduleArgs sa;
  std::string out;
  auto* construct = app.add_subcommand("construct", "scheduled parameters and the bump data");
  construct->add_option("--n", sa.n)->required();
  construct->add_option("--k", sa.k);
  construct->add_option("--s", sa.s);
  construct->add_option("--sigma", sa.sigma);
  construct->add_option("--delta", sa.delta);
  construct->add_option("--N", sa.N, "bypass the n-derived N");
  construct->add_flag("--no-separation", sa.no_separation);
  construct->add_option("--out", out);

  std::string config, method = "series";
  int solve_gen = 8;
  double tol = 1e-9;
  auto* solve = app.add_subcommand("solve", "convergence ledger of the series or fixed point");
  solve->add_option("--config", config)->required();
  solve->add_option("--max-gen", solve_gen);
  solve->add_option("--method", method);
  solve->add_option("--tol", tol);
  solve->add_option("--out", out);

  std::string field, spec;
  bool embeddings = false;
  int corpus = 100;
  std::uint64_t seed = VerifyOptions{}.seed;
  auto* norms = app.add_subcommand("norms", "evaluate a norm or run the embedding matrix");
  norms->add_option("--field", field);
  norms->add_option("--spec", spec, "family,s[,q], e.g. fl,-0.5,1 or hs,-0.75");
  norms->add_flag("--check-embeddings", embeddings);
  norms->add_option("--count", corpus);
  norms->add_option("--seed", seed);
  norms->add_option("--out", out);

  std::string mode;
  double dt = 0.0;
  int depth = Rk4Options{}.closure_depth;
  long long sa_a = 0, sa_b = 0;
  int sa_A = 10;
  auto* oracle = app.add_subcommand("oracle", "independent reference computations");
  oracle->add_option("--mode", mode)->required()->check(CLI::IsMember({"rk4", "xi1", "sandwich"}));
  oracle->add_option("--config", config);
  oracle->add_option("--dt", dt);
  oracle->add_option("--depth", depth);
  oracle->add_option("--a", sa_a);
  oracle->add_option("--b", sa_b);
  oracle->add_option("--A", sa_A);
  oracle->add_option("--out", out);

  std::string out_dir;
  auto* inflate = app.add_subcommand("inflate", "parameter sweep to runs.csv and manifest.json");
  inflate->add_option("--config", config)->required();
  inflate->add_option("--out", out_dir)->required();

  bool quick = false;
  auto* verify = app.add_subcommand("verify-all", "invariant suite");
  verify->add_flag("--quick", quick);
  verify->add_option("--seed", seed);
  verify->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  g_log = log_level == "quiet" ? LogLevel::Quiet : log_level == "debug" ? LogLevel::Debug : LogLevel::Info;
  if (threads > 0 && !std::getenv("GIBQ_THREADS")) set_thread_count(threads);

  try {
    if (version) {
      std::cout << fmt::format("gibq {}\nreport schema {}\nmanifest schema {}\n", kVersion,
                               kReportSchemaVersion, kManifestSchemaVersion);
      return 0;
    }
    if (*trees) return cmd_trees(arity, max_gen);
    if (*construct) return cmd_construct(sa, out);
    if (*solve) return cmd_solve(config, solve_gen, method, tol, out);
    if (*norms) return cmd_norms(field, spec, embeddings, corpus, seed, out);
    if (*oracle) return cmd_oracle(mode, config, dt, depth, sa_a, sa_b, sa_A, out);
    if (*inflate) return cmd_inflate(config, out_dir);
    if (*verify) return cmd_verify_all(quick, seed, out_dir);
    std::cout << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ComputationError& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gibq
