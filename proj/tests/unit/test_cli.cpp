#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

#include "gibq/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  std::string out;
  int code = -1;
};

Run run(const std::string& args) {
  Run r;
  const std::string cmd = std::string("'") + GIBQ_CLI_PATH + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "gibq_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("trees") {
  const auto r = run("trees --arity 2 --max-gen 6");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("j,count,", 0) == 0);
  CHECK(r.out.find("\n5,42,42,") != std::string::npos);
  CHECK(r.out.find("\n6,132,132,") != std::string::npos);
}

TEST_CASE("version and usage errors") {
  const auto v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("gibq.report/1") != std::string::npos);
  CHECK(run("trees --arity 2").code == 2);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("trees --arity 1 --max-gen 3").code == 2);
}

TEST_CASE("inflate config errors") {
  CHECK(run("inflate --config missing.json --out x").code == 2);
  const auto dir = scratch();
  gibq::write_atomic(dir / "bad.json", R"({"k": 2, "N_list": [256], "colour": "red"})");
  CHECK(run("inflate --config '" + (dir / "bad.json").string() + "' --out '" + (dir / "o").string() + "'").code == 2);
  gibq::write_atomic(dir / "bad2.json", R"({"k": 2})");
  CHECK(run("inflate --config '" + (dir / "bad2.json").string() + "' --out '" + (dir / "o").string() + "'").code == 2);
}

TEST_CASE("inflate writes reproducible outputs") {
  const auto dir = scratch();
  gibq::write_atomic(dir / "cfg.json",
                     R"({"k": 2, "s": -0.75, "delta": 0.25, "N_list": [256, 512], "J": 2,
                         "families": ["hs,-0.75", "fl,-0.75,1"], "method": "series"})");
  const std::string cfg = "'" + (dir / "cfg.json").string() + "'";
  CHECK(run("inflate --config " + cfg + " --out '" + (dir / "a").string() + "'").code == 0);
  CHECK(run("inflate --config " + cfg + " --out '" + (dir / "b").string() + "'").code == 0);
  for (const char* f : {"runs.csv", "manifest.json", "reports.json"})
    CHECK(gibq::read_text_file(dir / "a" / f) == gibq::read_text_file(dir / "b" / f));
  const auto manifest = gibq::Json::parse(gibq::read_text_file(dir / "a" / "manifest.json"));
  CHECK(manifest["outputs"][0]["git_blob"] == gibq::git_blob_hash(gibq::read_text_file(dir / "a" / "runs.csv")));
  const auto csv = gibq::read_text_file(dir / "a" / "runs.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("construct, norms, solve and oracle") {
  const auto dir = scratch();
  const auto bump = dir / "bump.json";
  CHECK(run("construct --n 2 --k 2 --s -0.75 --sigma -2 --delta 0.25 --out '" + bump.string() + "'").code == 0);
  const auto j = gibq::Json::parse(gibq::read_text_file(bump));
  CHECK(j["params"]["N"] == 1024);
  CHECK(j["omega"].size() == 44);

  gibq::write_atomic(dir / "phi.json", j["phi"].dump());
  const auto n = run("norms --field '" + (dir / "phi.json").string() + "' --spec fl1-pair");
  CHECK(n.code == 0);
  CHECK(std::stod(n.out) == doctest::Approx(44 * j["params"]["R"].get<double>()));
  CHECK(run("norms --field '" + (dir / "phi.json").string() + "' --spec nope,1").code == 2);
  const auto emb = run("norms --check-embeddings --count 5");
  CHECK(emb.code == 0);
  CHECK(emb.out.rfind("field,s,check,", 0) == 0);

  gibq::write_atomic(dir / "solve.json",
                     R"({"k": 2, "horizon": 0.5, "data": {"u0": {"entries": [{"xi": 1, "re": 0.1}, {"xi": -1, "re": 0.1}]}}})");
  const auto s = run("solve --config '" + (dir / "solve.json").string() + "' --max-gen 4");
  CHECK(s.code == 0);
  CHECK(s.out.rfind("j,sup_l1,ratio\n0,", 0) == 0);
  const auto fp = run("solve --config '" + (dir / "solve.json").string() + "' --method fixed-point");
  CHECK(fp.code == 0);
  CHECK(run("solve --config '" + (dir / "solve.json").string() + "' --method euler").code == 2);

  const auto sw = run("oracle --mode sandwich --A 10");
  CHECK(sw.code == 0);
  CHECK(sw.out.find("0,0,10,") != std::string::npos);
  const auto x = run("oracle --mode xi1 --config '" + (dir / "solve.json").string() + "'");
  CHECK(x.code == 0);
  CHECK(x.out.rfind("xi,re,im\n", 0) == 0);
  const auto rk = run("oracle --mode rk4 --config '" + (dir / "solve.json").string() + "'");
  CHECK(rk.code == 0);

  gibq::write_atomic(dir / "blowup.json",
                     R"({"k": 2, "horizon": 1.0, "data": {"u0": {"entries": [{"xi": 1, "re": 40}, {"xi": -1, "re": 40}]}}})");
  CHECK(run("solve --config '" + (dir / "blowup.json").string() + "' --method fixed-point").code == 1);
}
