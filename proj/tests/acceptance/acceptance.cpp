// Acceptance run: one PASS/FAIL line per criterion 1-11, detail lines
// indented beneath it. Runtime budgets are part of each verdict.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <sys/wait.h>

#include <fmt/format.h>

#include "gibq/verify.hpp"

namespace {

// Seconds. Criteria 7 and 9 reuse the sweep measured under criterion 6, so
// their own time is only the extra work; 6 carries the shared cost.
const std::map<std::string, double> kBudget = {
    {"1", 1.0},   {"2", 30.0},  {"3", 120.0}, {"4", 30.0},  {"5", 1.0},  {"6", 600.0},
    {"7", 600.0}, {"8", 600.0}, {"9", 900.0}, {"10", 1.0}, {"S1", 120.0}, {"S2", 30.0}};

std::string capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : GIBQ_CLI_PATH;
  bool all = true;
  auto clock = std::chrono::steady_clock::now();

  gibq::verify_all(gibq::VerifyOptions{}, [&](const gibq::CriterionResult& r) {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - clock).count();
    clock = now;
    const double budget = kBudget.at(r.id);
    const bool in_time = seconds <= budget;
    const bool pass = r.pass && in_time;
    const bool supplementary = r.id.front() == 'S';
    if (!supplementary) all = all && pass;
    std::cout << fmt::format("{} {} {}: {} [{:.1f} s of {:.0f} s]\n", pass ? "PASS" : "FAIL",
                             supplementary ? "supplementary" : "criterion", r.id, r.title, seconds,
                             budget);
    for (const auto& d : r.details) std::cout << "    " << d << "\n";
    if (!in_time) std::cout << "    runtime budget exceeded\n";
    std::cout << std::flush;
  });

  // Criterion 11 drives the installed tool so the whole output path is covered.
  const std::string command = fmt::format("'{}' verify-all --quick 2>/dev/null", cli);
  int status_a = 0, status_b = 0;
  const std::string first = capture(command, status_a);
  const std::string second = capture(command, status_b);
  const bool same = !first.empty() && first == second && status_a == status_b;
  all = all && same;
  std::cout << fmt::format("{} criterion 11: verify-all --quick output is byte-identical across runs\n",
                           same ? "PASS" : "FAIL");
  std::cout << fmt::format("    {} bytes, exit statuses {} and {}\n", first.size(), status_a, status_b);
  return all ? 0 : 1;
}
