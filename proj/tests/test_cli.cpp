#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <string>

#include "mgarch/data.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(MGARCH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mgarch_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& child) const {
    return (path / child).string();
  }
};

void write_sim_config(const std::string& path, int t_len) {
  std::ofstream out(path);
  out << "[simulation]\nkind = proposed\nk = 2\nT = " << t_len
      << "\nburn_in = 200\n"
      << "lambda0 = 0.05\nlambda1 = 0.88\nlambda2 = 0.07\n"
      << "theta1 = 0.03\ntheta2 = 0.9\ndof = 8\nrbar = 0.5\n";
}

}  // namespace

TEST_CASE("cli pipeline: simulate, describe, fit, diagnose, roll, compare",
          "[cli][slow]") {
  TempDir dir;
  write_sim_config(dir / "sim.conf", 800);

  REQUIRE(run_cli("simulate --config " + (dir / "sim.conf") + " --out " +
                  (dir / "sim") + " --seed 11") == 0);
  const fs::path panel_csv = fs::path(dir / "sim") / "panel.csv";
  REQUIRE(fs::exists(panel_csv));

  REQUIRE(run_cli("describe --input " + panel_csv.string() + " --out " +
                  (dir / "desc")) == 0);
  REQUIRE(fs::exists(fs::path(dir / "desc") / "describe.json"));

  {
    std::ofstream conf(dir / "model.conf");
    conf << "[mean]\np = 0\n[correlation]\nm = 0\n";
  }
  REQUIRE(run_cli("fit --input " + panel_csv.string() + " --config " +
                  (dir / "model.conf") + " --out " + (dir / "fit")) == 0);
  for (const char* name : {"fit_summary.txt", "fit_summary.json",
                           "volatility.csv", "correlation.csv",
                           "residuals_std.csv"}) {
    REQUIRE(fs::exists(fs::path(dir / "fit") / name));
  }

  // every emitted CSV parses back through the panel loader
  for (const char* name :
       {"volatility.csv", "correlation.csv", "residuals_std.csv"}) {
    REQUIRE_NOTHROW(
        mgarch::load_panel_csv((fs::path(dir / "fit") / name).string()));
  }

  REQUIRE(run_cli("diagnose --input " +
                  (fs::path(dir / "fit") / "residuals_std.csv").string() +
                  " --lags 5,10 --asymptotic --out " + (dir / "diag")) == 0);
  REQUIRE(fs::exists(fs::path(dir / "diag") / "adequacy.json"));

  REQUIRE(run_cli("roll --input " + panel_csv.string() + " --window 69 "
                  "--out " + (dir / "roll")) == 0);
  REQUIRE(fs::exists(fs::path(dir / "roll") / "roll_volatility.csv"));
  for (const char* name : {"roll_volatility.csv", "roll_correlation.csv"}) {
    REQUIRE_NOTHROW(
        mgarch::load_panel_csv((fs::path(dir / "roll") / name).string()));
  }

  // the adequacy table presents statistics as value(p-value)
  {
    std::ifstream in(fs::path(dir / "diag") / "adequacy.txt");
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    REQUIRE(text.find("Q(5)") != std::string::npos);
    REQUIRE(text.find("Q(10)") != std::string::npos);
    REQUIRE(text.find("verdict:") != std::string::npos);
  }

  REQUIRE(run_cli("compare --fit " + (dir / "fit") + " --roll " +
                  (dir / "roll") + " --out " + (dir / "cmp")) == 0);
  const fs::path cmp = fs::path(dir / "cmp") / "compare.csv";
  REQUIRE(fs::exists(cmp));
  std::ifstream in(cmp);
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "time,series,method,value");
  // both methods present
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  REQUIRE(body.find(",model,") != std::string::npos);
  REQUIRE(body.find(",rolling,") != std::string::npos);
  REQUIRE(body.find("sd:A1") != std::string::npos);
  REQUIRE(body.find("corr:A1|A2") != std::string::npos);
}

TEST_CASE("cli fit adds leverage rows exactly when configured", "[cli][slow]") {
  TempDir dir;
  write_sim_config(dir / "sim.conf", 600);
  REQUIRE(run_cli("simulate --config " + (dir / "sim.conf") + " --out " +
                  (dir / "sim") + " --seed 29") == 0);
  const std::string panel =
      (fs::path(dir / "sim") / "panel.csv").string();

  {
    std::ofstream conf(dir / "plain.conf");
    conf << "[mean]\np = 0\n";
  }
  {
    std::ofstream conf(dir / "lever.conf");
    conf << "[mean]\np = 0\n[variance]\nleverage = free igarch\n";
  }
  REQUIRE(run_cli("fit --input " + panel + " --config " +
                  (dir / "plain.conf") + " --out " + (dir / "plain")) == 0);
  REQUIRE(run_cli("fit --input " + panel + " --config " +
                  (dir / "lever.conf") + " --out " + (dir / "lever")) == 0);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  const std::string plain = slurp(fs::path(dir / "plain") / "fit_summary.txt");
  const std::string lever = slurp(fs::path(dir / "lever") / "fit_summary.txt");
  REQUIRE(plain.find("lambda3") == std::string::npos);
  REQUIRE(lever.find("lambda3") != std::string::npos);
  REQUIRE(lever.find("[igarch]") != std::string::npos);
}

TEST_CASE("cli describe handles a ten-asset panel", "[cli]") {
  TempDir dir;
  {
    std::ofstream conf(dir / "sim.conf");
    conf << "[simulation]\nkind = proposed\nk = 10\nT = 80\nburn_in = 100\n"
         << "lambda0 = 0.05\nlambda1 = 0.85\nlambda2 = 0.08\n"
         << "theta1 = 0.01\ntheta2 = 0.9\ndof = 9\nrbar = 0.3\nm = 12\n";
  }
  REQUIRE(run_cli("simulate --config " + (dir / "sim.conf") + " --out " +
                  (dir / "sim") + " --seed 55") == 0);
  REQUIRE(run_cli("describe --input " +
                  (fs::path(dir / "sim") / "panel.csv").string() +
                  " --out " + (dir / "desc")) == 0);
  std::ifstream in(fs::path(dir / "desc") / "describe.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  REQUIRE(rows == 11);  // header + ten assets
}

TEST_CASE("cli joins several inputs on their common calendar", "[cli]") {
  TempDir dir;
  {
    std::ofstream a(dir / "a.csv");
    a << "date,X\n2020-01-01,0.5\n2020-01-02,-0.2\n2020-01-03,0.1\n"
      << "2020-01-06,0.4\n2020-01-07,-0.6\n2020-01-08,0.2\n2020-01-09,0.3\n"
      << "2020-01-10,-0.1\n2020-01-13,0.2\n2020-01-14,0.6\n2020-01-15,-0.4\n"
      << "2020-01-16,0.1\n2020-01-17,0.5\n2020-01-20,-0.3\n";
  }
  {
    std::ofstream b(dir / "b.csv");
    b << "date,Y\n2020-01-02,1.5\n2020-01-03,-1.2\n2020-01-06,0.8\n"
      << "2020-01-07,-0.9\n2020-01-08,1.2\n2020-01-09,0.7\n2020-01-10,-1.1\n"
      << "2020-01-13,0.9\n2020-01-14,1.6\n2020-01-15,-1.4\n2020-01-16,0.3\n"
      << "2020-01-17,1.1\n2020-01-20,-0.5\n2020-01-21,0.9\n";
  }
  REQUIRE(run_cli("describe --input " + (dir / "a.csv") + " --input " +
                  (dir / "b.csv") + " --out " + (dir / "out")) == 0);
  std::ifstream in(fs::path(dir / "out") / "describe.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);  // header + X + Y over the 13 common dates
  REQUIRE(lines[1].rfind("X,", 0) == 0);
  REQUIRE(lines[2].rfind("Y,", 0) == 0);
}

TEST_CASE("cli is deterministic per seed", "[cli]") {
  TempDir dir;
  write_sim_config(dir / "sim.conf", 120);
  REQUIRE(run_cli("simulate --config " + (dir / "sim.conf") + " --out " +
                  (dir / "a") + " --seed 5") == 0);
  REQUIRE(run_cli("simulate --config " + (dir / "sim.conf") + " --out " +
                  (dir / "b") + " --seed 5") == 0);
  std::ifstream fa(fs::path(dir / "a") / "panel.csv");
  std::ifstream fb(fs::path(dir / "b") / "panel.csv");
  const std::string a((std::istreambuf_iterator<char>(fa)),
                      std::istreambuf_iterator<char>());
  const std::string b((std::istreambuf_iterator<char>(fb)),
                      std::istreambuf_iterator<char>());
  REQUIRE(a == b);
  REQUIRE_FALSE(a.empty());
}

TEST_CASE("cli exit codes partition by failure class", "[cli]") {
  TempDir dir;

  // usage error: unknown subcommand
  REQUIRE(run_cli("frobnicate") != 0);

  // parse error: empty input file
  { std::ofstream out(dir / "empty.csv"); }
  REQUIRE(run_cli("describe --input " + (dir / "empty.csv")) == 2);

  // parse error: malformed simulation config (explosive parameters are
  // caught by validation before any computation)
  {
    std::ofstream out(dir / "bad.conf");
    out << "[simulation]\nkind = proposed\nk = 2\nT = 50\nburn_in = 10\n"
        << "lambda0 = 0.05\nlambda1 = 0.95\nlambda2 = 0.10\n"
        << "theta1 = 0.02\ntheta2 = 0.9\ndof = 8\nrbar = 0.3\n";
  }
  REQUIRE(run_cli("simulate --config " + (dir / "bad.conf") + " --out " +
                  (dir / "x")) == 2);

  // numeric error: rolling window longer than the sample
  write_sim_config(dir / "sim.conf", 50);
  REQUIRE(run_cli("simulate --config " + (dir / "sim.conf") + " --out " +
                  (dir / "sim") + " --seed 2") == 0);
  REQUIRE(run_cli("roll --input " +
                  (fs::path(dir / "sim") / "panel.csv").string() +
                  " --window 100 --out " + (dir / "roll")) == 2);
}
