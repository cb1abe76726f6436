// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

using nlohmann::json;

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = sphcs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

bool report(int id, const std::string &title, bool pass, const std::string &detail) {
  std::printf("criterion %d %-4s %s (%s)\n", id, pass ? "PASS" : "FAIL", title.c_str(),
              detail.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct SuiteSummary {
  bool pass = false;
  double seconds = 0;
  int checks = 0;
  double worst_ratio = 0; // worst residual / tolerance among bounded checks
  std::string failed;
};

SuiteSummary summarize(const json &suite, const std::string &exclude_prefix = "") {
  SuiteSummary s;
  s.pass = suite["pass"].get<bool>();
  s.seconds = suite.value("seconds", 0.0);
  for (const auto &c : suite["checks"]) {
    const std::string name = c["name"];
    if (!exclude_prefix.empty() && name.starts_with(exclude_prefix))
      continue;
    ++s.checks;
    if (!c["pass"].get<bool>() && s.failed.empty())
      s.failed = name;
    if (c["bound"] == "at_most" && !c["informational"].get<bool>() &&
        c["residual"].is_number() && c["tolerance"].get<double>() > 0)
      s.worst_ratio =
          std::max(s.worst_ratio, c["residual"].get<double>() / c["tolerance"].get<double>());
  }
  return s;
}

} // namespace

int main(int argc, char **argv) {
  std::string golden_dir = SPHCS_GOLDEN_DIR;
  if (argc > 1)
    golden_dir = argv[1];
  bool all = true;

  const auto tmp = std::filesystem::temp_directory_path() / "sphcs_acceptance_verify.json";
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = run({"--timing", "verify", "--negative-controls", "--output", tmp.string()});
  const double verify_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json doc;
  try {
    doc = json::parse(slurp(tmp.string()));
  } catch (const std::exception &e) {
    std::printf("verify report unreadable: %s\n%s", e.what(), v.err.c_str());
    return 1;
  }
  std::filesystem::remove(tmp);

  struct Criterion {
    int id;
    std::string suite, title;
    double budget;
  };
  const std::vector<Criterion> criteria = {
      {1, "complexifier", "complexifier and phase-space constraints", 1},
      {2, "kernels", "heat kernels on S^d and H^d", 30},
      {3, "operators", "e(d+1) algebra and annihilation operators", 30},
      {4, "coherent", "coherent states", 60},
      {5, "resolution", "resolution of the identity", 300},
      {6, "transform", "Segal-Bargmann isometry and inversion", 300},
      {7, "flat", "flat-space transform and small-tau limit", 60},
      {8, "husimi", "Husimi density", 60},
  };
  for (const auto &c : criteria) {
    const json *suite = nullptr;
    for (const auto &s : doc["suites"])
      if (s["suite"] == c.suite)
        suite = &s;
    if (!suite) {
      all = report(c.id, c.title, false, "suite missing") && all;
      continue;
    }
    const auto s = summarize(*suite);
    const bool in_budget = s.seconds <= c.budget;
    std::string detail = std::to_string(s.checks) + " checks, worst residual/tolerance " +
                         fmt(s.worst_ratio) + ", " + fmt(s.seconds) + " s of " +
                         fmt(c.budget) + " s";
    if (!s.failed.empty())
      detail += ", failed: " + s.failed;
    if (!in_budget)
      detail += ", over time budget";
    all = report(c.id, c.title, s.pass && in_budget, detail) && all;
    if (c.id == 2)
      for (const auto &ch : (*suite)["checks"])
        if (ch["informational"].get<bool>())
          std::printf("  info: %s residual %s (not asserted)\n",
                      ch["name"].get<std::string>().c_str(),
                      ch["residual"].is_number() ? fmt(ch["residual"].get<double>()).c_str()
                                                 : ch["residual"].dump().c_str());
  }

  // Criterion 9: command-line interface.
  std::vector<std::string> problems;
  if (v.code != 0 || !doc["pass"].get<bool>())
    problems.push_back("verify exit code " + std::to_string(v.code));
  const std::vector<std::vector<std::string>> det = {
      {"kernel", "--dim", "2", "--theta-im", "0.5"},
      {"transform", "--dim", "3", "--preset", "random:3", "--method", "quadrature"},
      {"husimi", "--dim", "2", "--preset", "random:3"},
      {"invert", "--dim", "2", "--preset", "random:3"},
  };
  for (const auto &cmd : det) {
    auto one = cmd, four = cmd;
    one.insert(one.begin(), {"--threads", "1"});
    four.insert(four.begin(), {"--threads", "4"});
    const auto a = run(one), b = run(four);
    if (a.code != 0 || b.code != 0 || a.out != b.out)
      problems.push_back(cmd[0] + " differs across thread counts");
  }
  const std::vector<std::pair<std::string, std::vector<std::string>>> goldens = {
      {"kernel_sphere_d2.csv", {"kernel", "--dim", "2", "--tau", "0.5", "--theta", "0:3.14159:100"}},
      {"kernel_hyperbolic_d3.csv",
       {"kernel", "--space", "hyperbolic", "--dim", "3", "--time", "1.0", "--radius", "0:5:50"}},
      {"kernel_sphere_d1_complex.csv",
       {"kernel", "--dim", "1", "--tau", "0.5", "--theta", "0:3.14159:60", "--theta-im", "0.8"}},
      {"transform_y10.csv", {"transform", "--dim", "2", "--tau", "0.5", "--preset", "harmonic:1,0"}},
  };
  for (const auto &[file, args] : goldens) {
    const auto r = run(args);
    if (r.code != 0 || r.out != slurp(golden_dir + "/" + file))
      problems.push_back(file + " does not match");
  }
  if (run({"kernel", "--dim", "7"}).code != 2)
    problems.push_back("invalid input is not exit code 2");
  if (run({"kernel", "--method", "spectral", "--tau", "0.001", "--theta", "1"}).code != 3)
    problems.push_back("numerical failure is not exit code 3");
  std::string detail = "verify " + fmt(verify_seconds) + " s, " +
                       std::to_string(det.size()) + " thread-count comparisons, " +
                       std::to_string(goldens.size()) + " golden tables";
  for (const auto &p : problems)
    detail += ", " + p;
  all = report(9, "command-line interface", problems.empty(), detail) && all;

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
