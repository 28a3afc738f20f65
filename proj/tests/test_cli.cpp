// Runs the built command-line tool and checks its output and exit codes.

#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" PERINULL_CLI "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Value printed after a fixed-width label, e.g. "BF              1.259".
std::string field(const std::string& out, const std::string& label) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(label, 0) == 0 && line.size() > label.size() && line[label.size()] == ' ') {
      const auto b = line.find_first_not_of(' ', label.size());
      return line.substr(b);
    }
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("perinull_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

const char* kSummary = "--summary 25.1 7.3 47 28.0 6.2 43";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bf from summary statistics") {
  // The pooled t of the rounded summary statistics is -2.02.
  const Run r = cli(std::string("bf ") + kSummary + " --variant point --kappa1 0.7071");
  CHECK(r.code == 0);
  CHECK(field(r.out, "BF") == "1.307");
  CHECK(field(r.out, "t").rfind("-2.02", 0) == 0);
  // With the reported t = 2.00 the worked-example value follows.
  const Run two = cli(std::string("bf ") + kSummary + " --t 2 --variant point --kappa1 0.7071");
  CHECK(two.code == 0);
  CHECK(field(two.out, "BF") == "1.259");
}

TEST_CASE("bf decomposition echo") {
  const Run r = cli("bf --t 0 --n 50 --design one-sample --variant peri --kappa0 0.05 --kappa1 0.7071");
  CHECK(r.code == 0);
  CHECK(std::stod(field(r.out, "BF")) < 1.0);
  const std::string d = field(r.out, "decomposition");
  std::smatch m;
  REQUIRE(std::regex_search(d, m, std::regex(R"(BF10 = ([0-9.eE+-]+)\s+x\s+BF0~0 = ([0-9.eE+-]+)\s+=\s+([0-9.eE+-]+)\s+\(direct ratio ([0-9.eE+-]+)\))")));
  const double a = std::stod(m[1]), b = std::stod(m[2]), prod = std::stod(m[3]), direct = std::stod(m[4]);
  CHECK(a * b == doctest::Approx(prod).epsilon(1e-5));
  CHECK(prod == doctest::Approx(direct).epsilon(1e-5));
}

TEST_CASE("bf posterior probability and JSON") {
  const Run r = cli(std::string("bf ") + kSummary + " --t 4 --variant point --prior-odds 1 --kappa1 0.7071");
  CHECK(r.code == 0);
  CHECK(field(r.out, "posterior prob").rfind("0.994", 0) == 0);
  const Run j = cli(std::string("bf ") + kSummary + " --t 4 --variant peri --kappa0 0.05 --kappa1 0.7071 --json");
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  const auto& res = doc["result"];
  CHECK(res["bf"].get<double>() == doctest::Approx(124.0).epsilon(2.0 / 124.0));
  CHECK(res["log_bf"].get<double>() ==
        doctest::Approx(res["point_null_log_bf"].get<double>() + res["correction_log_bf"].get<double>()).epsilon(1e-12));
  CHECK(res["posterior_prob_numerator"].get<double>() == doctest::Approx(0.992).epsilon(0.001));
  // 17 significant digits survive the round trip.
  CHECK(nlohmann::json::parse(doc.dump())["result"]["log_bf"].get<double>() == res["log_bf"].get<double>());
}

TEST_CASE("bf variants run") {
  for (const char* v : {"interval --a 0.1", "peripoint --xi 0.5", "shrinking --c 0.5"}) {
    const Run r = cli(std::string("bf --t 2.5 --n 80 --variant ") + v);
    CAPTURE(v);
    CHECK(r.code == 0);
    CHECK(std::isfinite(std::stod(field(r.out, "log BF"))));
  }
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("bf --t 2").code == 2);                            // no sample size
  CHECK(cli("bf --t 2 --n 30 --variant bogus").code == 2);     // unknown variant
  CHECK(cli("bf --t 2 --n 30 --kappa0 -1 --variant peri").code == 2);
  CHECK(cli("bf --t 2 --n 30 --no-such-flag").code == 2);
  CHECK(cli("").code == 2);                                    // no subcommand
  CHECK(cli("asymptotics --mu 0 --sigma 0").code == 2);
  CHECK(cli("simulate --ngrid 10:5:1 --out /tmp/perinull_cli_test_bad").code == 2);
  CHECK(cli("laplace-verify --model nope").code == 2);
}

TEST_CASE("numerical failure exits with 3") {
  CHECK(cli("bf --t 2 --n 30 --rel-tol 1e-15 --max-subdivisions 1").code == 3);
}

TEST_CASE("config file precedence: flags over file over defaults") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "bf.cfg";
  std::ofstream(cfg) << "# defaults\nt = 4\nn1 = 47\nn2 = 43\nkappa1 = 0.7071\nvariant = point\n";
  const Run from_file = cli("bf --config " + cfg.string());
  CHECK(from_file.code == 0);
  CHECK(std::abs(std::stod(field(from_file.out, "BF")) - 174.0) < 0.1);
  const Run flag_wins = cli("bf --t 2 --config " + cfg.string());
  CHECK(field(flag_wins.out, "BF") == "1.259");
  std::ofstream(cfg) << "bogus = 1\n";
  CHECK(cli("bf --t 2 --n 20 --config " + cfg.string()).code == 2);
  CHECK(cli("bf --t 2 --n 20 --config " + (dir / "missing.cfg").string()).code == 2);
}

TEST_CASE("asymptotics") {
  const Run r = cli("asymptotics --mu 0 --sigma 1 --kappa0 0.05 --kappa1 1");
  CHECK(r.code == 0);
  CHECK(field(r.out, "limit log BF").rfind("-3.22", 0) == 0);
  CHECK(field(r.out, "min valid n") == "184");

  const Run j = cli("asymptotics --mu 0.167 --sigma 1 --kappa0 0.05 --kappa1 1 --n 1000 --json");
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(std::abs(doc["limit_log_bf"].get<double>() - std::log(10.0)) < 0.04);
  CHECK(doc["bias"]["value"].get<double>() < 0.0);

  const fs::path dir = scratch("grid");
  fs::create_directories(dir);
  const Run g = cli("asymptotics --mu 0 --kappa0 0.05 --kappa1 1 --grid 100:300:1 --out " + dir.string());
  CHECK(g.code == 0);
  const auto rows = read_csv(dir / "asymptotics.csv");
  REQUIRE(rows.size() == 202);
  CHECK(rows[0][0] == "n");
  CHECK(rows[0][1] == "valid");
  long first_valid = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][1] == "true") {
      first_valid = std::stol(rows[i][0]);
      break;
    }
  CHECK(first_valid == 184);
}

TEST_CASE("simulate writes curves and manifest deterministically") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::string args = " --mu 0.167 --reps 1 --seed 7 --ngrid 100:400:100 --variants point,peri";
  CHECK(cli("simulate --out " + a.string() + args).code == 0);
  CHECK(cli("simulate --out " + b.string() + args + " --workers 3").code == 0);
  const std::string ca = slurp(a / "curves.csv");
  CHECK(ca.rfind("variant,n,mean,q025,q975,source\n", 0) == 0);
  CHECK(ca == slurp(b / "curves.csv"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["command"] == "simulate");
  CHECK(m["seed"].get<std::uint64_t>() == 7);
  for (const char* k : {"parameters", "version", "timestamp"}) CHECK(m.contains(k));
  CHECK_FALSE(fs::exists(a / "plot.gp"));
}

TEST_CASE("simulate seed from the environment and plot script") {
  const fs::path a = scratch("sim_env");
  CHECK(cli("simulate --out " + a.string() + " --reps 1 --ngrid 50:100:50 --emit-plotscript", "PERINULL_SEED=31").code == 0);
  CHECK(nlohmann::json::parse(slurp(a / "manifest.json"))["seed"].get<std::uint64_t>() == 31);
  bool script = false;
  for (const auto& e : fs::directory_iterator(a)) script = script || e.path().extension() == ".gp";
  CHECK(script);
  CHECK(cli("simulate --out " + a.string() + " --reps 1 --ngrid 50:100:50", "PERINULL_SEED=abc").code == 2);
}

TEST_CASE("desk-scale smoke run satisfies the boundedness invariant") {
  const fs::path a = scratch("smoke");
  const Run r = cli("simulate --out " + a.string() +
                    " --mu 0.167 --sigma 1 --kappa0 0.05 --kappa1 1 --reps 50 --ngrid 100:2000:100 --variants point,peri");
  REQUIRE(r.code == 0);
  const double limit = std::log(std::sqrt(2.0) * 0.05 * std::exp(0.167 * 0.167 / (2 * 0.0025)) /
                                (std::sqrt(std::numbers::pi) * (1 + 0.167 * 0.167)));
  int peri = 0, asym = 0;
  double prev_point = -INFINITY;
  for (const auto& row : read_csv(a / "curves.csv")) {
    if (row[0] == "variant") continue;
    REQUIRE(row.size() == 6);
    CHECK(std::stod(row[3]) <= std::stod(row[4]));
    if (row[0] == "peri" && row[5] == "simulated") {
      ++peri;
      CHECK(std::stod(row[2]) <= limit + 0.1);
    }
    if (row[0] == "peri" && row[5] == "asymptotic") ++asym;
    if (row[0] == "point" && std::stol(row[1]) >= 1000) {
      CHECK(std::stod(row[2]) > prev_point);
      prev_point = std::stod(row[2]);
    }
  }
  CHECK(peri == 20);
  CHECK(asym == 20);
}

TEST_CASE("laplace-verify") {
  const Run t = cli("laplace-verify --model ttest-peri --theta 0 1 --kappa0 0.05 --json");
  REQUIRE(t.code == 0);
  const auto jt = nlohmann::json::parse(t.out);
  CHECK(std::abs(jt["expansion"]["c1"].get<double>() + 199.83) < 0.5);
  CHECK(jt["closed_form"]["c1_peri"].get<double>() == doctest::Approx(-199.8333).epsilon(1e-5));

  const Run fd = cli("laplace-verify --model ttest-peri --theta 0 1 --kappa0 0.05 --derivatives fd --json");
  REQUIRE(fd.code == 0);
  CHECK(std::abs(nlohmann::json::parse(fd.out)["expansion"]["c1"].get<double>() + 199.83) < 5.0);

  const Run c = cli("laplace-verify --model conjugate-gaussian --n 100 --json");
  REQUIRE(c.code == 0);
  CHECK(std::abs(nlohmann::json::parse(c.out)["abs_error"]["with_c2"].get<double>()) < 1e-10);

  const Run b = cli("laplace-verify --model beta-bernoulli --n 50 --json");
  REQUIRE(b.code == 0);
  const auto e = nlohmann::json::parse(b.out)["abs_error"];
  CHECK(std::abs(e["with_c1"].get<double>()) < std::abs(e["leading"].get<double>()));
  CHECK(std::abs(e["with_c2"].get<double>()) < std::abs(e["with_c1"].get<double>()));

  // An invalid bracket is reported, not an error.
  const Run bad = cli("laplace-verify --model ttest-peri --theta 0 1 --kappa0 0.05 --n 100 --json");
  CHECK(bad.code == 0);
  CHECK(nlohmann::json::parse(bad.out)["expansion"]["valid"].get<bool>() == false);
  const Run text = cli("laplace-verify --model ttest-alt --theta 0.1 1");
  CHECK(text.code == 0);
  CHECK(text.out.find("C1") != std::string::npos);
}

}
