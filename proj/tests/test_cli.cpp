#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/limitlaw.hpp"
#include "trapwalk/regimes.hpp"

using namespace trapwalk;

namespace {

std::string work_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/trapwalk_cli_XXXXXX";
    if (!mkdtemp(tmpl)) std::abort();
    return std::string(tmpl);
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  std::string dir = work_dir();
  std::string cmd = std::string(TRAPWALK_CLI_PATH) + " " + args + " > " + dir +
                    "/stdout.txt 2> " + dir + "/stderr.txt";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(dir + "/stdout.txt");
  r.err = slurp(dir + "/stderr.txt");
  return r;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV body rows (header comments stripped), split on commas.
std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::size_t pos = 0;
    for (;;) {
      std::size_t next = line.find(',', pos);
      row.push_back(line.substr(pos, next == std::string::npos ? next : next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int header_comment_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  int n = 0;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') ++n;
  return n;
}

// Minimal well-formedness scan: every open tag is closed in LIFO order.
// Attribute values in our artifacts never contain '<' or '>'.
bool xml_balanced(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = text.find('<', i)) != std::string::npos) {
    if (text.compare(i, 2, "<?") == 0) {
      i = text.find("?>", i);
      if (i == std::string::npos) return false;
      i += 2;
      continue;
    }
    if (text.compare(i, 4, "<!--") == 0) {
      i = text.find("-->", i);
      if (i == std::string::npos) return false;
      i += 3;
      continue;
    }
    std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tok = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tok.empty()) return false;
    if (tok[0] == '/') {
      if (stack.empty() || stack.back() != tok.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    bool self_closing = tok.back() == '/';
    std::size_t name_end = tok.find_first_of(" \t\n/");
    std::string name = tok.substr(0, name_end);
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("env: round-trip, usage errors, constraint naming") {
  std::string dir = work_dir();
  std::string path = dir + "/e.txt";
  auto r = run_cli("env --dim 1 --radius 100 --p 0.5 --seed 1 --out " + path);
  CHECK(r.status == 0);

  std::string text = slurp(path);
  CHECK(text.compare(0, 11, "# trapwalk-") == 0);
  CHECK(text.find("# cmd: env") != std::string::npos);
  CHECK(text.find("# config: dim=1 radius=100 p=0.5 seed=1") != std::string::npos);

  std::ifstream in(path, std::ios::binary);
  Environment parsed = read_environment(in);
  Environment direct = sample_environment(1, 100, 0.5, 1);
  CHECK(parsed.dim == direct.dim);
  CHECK(parsed.radius == direct.radius);
  CHECK(parsed.density == direct.density);
  CHECK(parsed.seed == direct.seed);
  CHECK(parsed.occupancy == direct.occupancy);

  auto missing = run_cli("env --dim 1 --radius 10 --out " + dir + "/x.txt");
  CHECK(missing.status == 2);
  CHECK(missing.err.find("--p") != std::string::npos);

  auto bad = run_cli("env --dim 1 --radius 10 --p 1.0 --out " + dir + "/x.txt");
  CHECK(bad.status == 2);
  CHECK(bad.err.find("density must lie in [0, 1)") != std::string::npos);
}

TEST_CASE("survival: annealed t=0, L=0 average equals quenched, check gate") {
  std::string dir = work_dir();

  auto r = run_cli("survival --mode annealed-exact --p 0.5 --t 0 --out " + dir + "/a.csv");
  CHECK(r.status == 0);
  auto rows = csv_rows(dir + "/a.csv");
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 4);
  CHECK(std::stod(rows[0][0]) == 0.0);
  CHECK(std::stod(rows[0][1]) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::stod(rows[0][2]) <= 1e-9);
  CHECK(rows[0][3] == "annealed-exact");
  CHECK(header_comment_lines(dir + "/a.csv") == 4);

  std::string env_path = dir + "/e2.txt";
  CHECK(run_cli("env --dim 1 --radius 60 --p 0.4 --seed 3 --out " + env_path).status == 0);
  auto q = run_cli("survival --env " + env_path + " --mode quenched --x 0 --t 2 7 --out " +
                   dir + "/q.csv");
  auto av = run_cli("survival --env " + env_path + " --mode averaged --L 0 --t 2 7 --out " +
                    dir + "/av.csv");
  CHECK(q.status == 0);
  CHECK(av.status == 0);
  auto qr = csv_rows(dir + "/q.csv");
  auto ar = csv_rows(dir + "/av.csv");
  REQUIRE(qr.size() == 2);
  REQUIRE(ar.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::stod(ar[i][1]) ==
          doctest::Approx(std::stod(qr[i][1])).epsilon(1e-12).scale(1e-15));
  }

  auto chk = run_cli("survival --mode annealed-exact --p 0.5 --t 10 --check --n 40000 --out " +
                     dir + "/c.csv");
  CHECK(chk.status == 0);
  CHECK(chk.err.find("check ok") != std::string::npos);
}

TEST_CASE("phase: flat segment in csv, well-formed svg with threshold markers") {
  std::string dir = work_dir();
  auto r = run_cli("phase --steps 13 --out-csv " + dir + "/f.csv --out-svg " + dir + "/f.svg");
  CHECK(r.status == 0);

  auto rows = csv_rows(dir + "/f.csv");
  REQUIRE(rows.size() == 13);
  int flat = 0;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 4);
    double gamma = std::stod(row[0]);
    double inv = std::stod(row[2]);
    if (gamma == 0.0) {
      CHECK(std::stod(row[1]) == 0.0);  // sentinel: no finite abar at gamma = 0
      CHECK(std::isinf(inv));
      CHECK(row[3].empty());
    } else if (gamma >= 0.5) {
      CHECK(inv == 1.0);
      ++flat;
    } else {
      CHECK(inv < 1.0);
      CHECK(row[3].find("case") != std::string::npos);
    }
  }
  CHECK(flat == 8);  // grid 0,0.1,...,1.2: the eight points at gamma >= 0.5

  std::string svg = slurp(dir + "/f.svg");
  CHECK(xml_balanced(svg));
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("gamma1 = 0.5") != std::string::npos);
  CHECK(svg.find("gamma2 = 0.707107") != std::string::npos);

  CHECK(run_cli("phase --steps 0 --out-csv " + dir + "/z.csv --out-svg " + dir + "/z.svg")
            .status == 2);
}

TEST_CASE("limitlaw: gamma gating, deterministic artifacts, summary fields") {
  std::string dir = work_dir();

  auto bad = run_cli("limitlaw --gamma 0.9 --n-envs 10");
  CHECK(bad.status == 2);
  CHECK(bad.err.find("a1") != std::string::npos);
  CHECK(bad.err.find("gamma2") != std::string::npos);

  CHECK(run_cli("limitlaw --n-envs 0").status == 2);

  auto sp = scaling_params(0.5, 0.5, 1.0);
  std::string ts = fmt(sp.time_at(4, 0.5)) + " " + fmt(sp.time_at(6, 0.5));
  std::string base = "limitlaw --t-list " + ts + " --n-envs 300 --u-steps 51 --seed 9";
  auto r1 = run_cli(base + " --out-samples " + dir + "/s1.csv --out-cf " + dir +
                    "/c1.csv --out-summary " + dir + "/m1.txt");
  CHECK(r1.status == 0);
  auto r2 = run_cli(base + " --out-samples " + dir + "/s2.csv --out-cf " + dir +
                    "/c2.csv --out-summary " + dir + "/m2.txt");
  CHECK(r2.status == 0);

  CHECK(slurp(dir + "/s1.csv") == slurp(dir + "/s2.csv"));
  CHECK(slurp(dir + "/c1.csv") == slurp(dir + "/c2.csv"));
  CHECK(slurp(dir + "/m1.txt") == slurp(dir + "/m2.txt"));

  auto samples = csv_rows(dir + "/s1.csv");
  CHECK(samples.size() == 600);  // 300 draws per time point
  CHECK(std::stod(samples[0][0]) == doctest::Approx(sp.time_at(4, 0.5)).epsilon(1e-15));
  CHECK(samples[0][1] == "0");

  auto cf = csv_rows(dir + "/c1.csv");
  CHECK(cf.size() == 51);
  REQUIRE(cf[0].size() == 5);
  CHECK(std::stod(cf[0][0]) == -5.0);
  CHECK(std::stod(cf[50][0]) == 5.0);

  std::string summary = slurp(dir + "/m1.txt");
  CHECK(summary.find("a1 0.421875\n") != std::string::npos);
  CHECK(summary.find("neg_levy_tail_at_1 2\n") != std::string::npos);
  CHECK(summary.find("n_envs 300\n") != std::string::npos);
  CHECK(summary.find("t0_max_cf_discrepancy ") != std::string::npos);
  CHECK(summary.find("t1_mean_tail_count ") != std::string::npos);
  CHECK(summary.find("cf_discrepancy_decreasing ") != std::string::npos);
}

TEST_CASE("validate: filter selects checks, reports are stable across runs") {
  auto r = run_cli("validate --filter spectral");
  CHECK(r.status == 0);
  int lines = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++lines;
    CHECK(line.compare(0, 7, "[PASS] ") == 0);
    CHECK(line.find("spectral") != std::string::npos);
  }
  CHECK(lines >= 2);

  // same seed, same verdicts: compare everything left of the timing column
  auto r2 = run_cli("validate --filter spectral");
  CHECK(r2.status == 0);
  auto names = [](const std::string& text) {
    std::vector<std::string> v;
    std::istringstream ss(text);
    std::string l;
    while (std::getline(ss, l))
      if (l.size() > 41) v.push_back(l.substr(0, 41));
    return v;
  };
  CHECK(names(r.out) == names(r2.out));

  auto none = run_cli("validate --filter no-such-check");
  CHECK(none.status == 2);
  CHECK(none.err.find("no checks match") != std::string::npos);
}
