#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string cli_path() {
  const char* p = std::getenv("NHEE_CLI");
  return p ? p : "./tools/nhee";
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/tmp/nhee_cli_stdout.txt 2>/tmp/nhee_cli_stderr.txt";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// first data line after the header row, split by commas
std::vector<std::string> first_row(const std::string& csv, std::vector<std::string>* header) {
  std::istringstream ss(csv);
  std::vector<std::string> head, row;
  for (std::string line; std::getline(ss, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (head.empty()) {
      head = cells;
      continue;
    }
    row = cells;
    break;
  }
  if (header) *header = head;
  return row;
}

double cell_value(const std::string& csv, const std::string& column) {
  std::vector<std::string> head;
  const auto row = first_row(csv, &head);
  for (std::size_t i = 0; i < head.size() && i < row.size(); ++i)
    if (head[i] == column) return std::atof(row[i].c_str());
  return std::nan("");
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("entropy task: gapless two-band is strongly negative") {
  REQUIRE(run_cli("--task entropy --model two-band --t 0.5 --a0 2 --b0 1 --B 1 "
                  "--L 100 --Ly 3 --renyi 2,3 --out /tmp/nhee_entropy.csv") == 0);
  const std::string csv = slurp("/tmp/nhee_entropy.csv");
  CHECK(cell_value(csv, "re_SA") < -10.0);
  CHECK(std::abs(cell_value(csv, "im_SA")) < 1e-6 * (std::abs(cell_value(csv, "re_SA")) + 1));
  CHECK(cell_value(csv, "max_abs_p") > 2.0);
}

TEST_CASE("sweep emits one row per L in input order; byte-identical across threads") {
  const std::string base =
      "--task sweep --model two-band --t 0.5 --a0 2 --b0 1 --B 1 --Ly 3 "
      "--L-list 40,60,80 --renyi 2 ";
  REQUIRE(run_cli(base + "--threads 1 --out /tmp/nhee_sweep1.csv") == 0);
  REQUIRE(run_cli(base + "--threads 3 --out /tmp/nhee_sweep2.csv") == 0);
  const std::string a = slurp("/tmp/nhee_sweep1.csv");
  CHECK(a == slurp("/tmp/nhee_sweep2.csv"));
  int data_rows = 0;
  std::istringstream ss(a);
  for (std::string line; std::getline(ss, line);)
    if (!line.empty() && line[0] != '#') ++data_rows;
  CHECK(data_rows == 1 + 3);  // header + 3 rows
}

TEST_CASE("json envelope carries schema, config echo and rows") {
  REQUIRE(run_cli("--task entropy --model two-band --t 0.5 --a0 2 --b0 1 --L 40 --Ly 2 "
                  "--format json --dump-p --out /tmp/nhee_entropy.json") == 0);
  const auto j = nlohmann::json::parse(slurp("/tmp/nhee_entropy.json"));
  CHECK(j["schema_version"].get<int>() == 1);
  CHECK(j["tool"] == "nhee");
  CHECK(j["task"] == "entropy");
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0].contains("re_SA"));
  CHECK(j["config_ini"].is_string());
  CHECK(j["occupation_spectrum"].size() == 2 * 2 * 20);  // n_orb * Ly * L/2
  CHECK(j.contains("wall_time_s"));
}

TEST_CASE("config echo round-trips to identical CSV") {
  REQUIRE(run_cli("--task entropy --model two-band --t 0.62 --a0 1.7 --b0 1.1 --L 24 --Ly 2 "
                  "--format json --out /tmp/nhee_echo.json") == 0);
  const auto j = nlohmann::json::parse(slurp("/tmp/nhee_echo.json"));
  {
    std::ofstream cfg("/tmp/nhee_echo.ini");
    cfg << j["config_ini"].get<std::string>();
  }
  // flags win over the config file: pin the format back to csv for byte checks
  REQUIRE(run_cli("--task entropy --config /tmp/nhee_echo.ini --format csv "
                  "--out /tmp/nhee_echo1.csv") == 0);
  REQUIRE(run_cli("--task entropy --config /tmp/nhee_echo.ini --format csv "
                  "--out /tmp/nhee_echo2.csv") == 0);
  const std::string a = slurp("/tmp/nhee_echo1.csv");
  CHECK(!a.empty());
  CHECK(a == slurp("/tmp/nhee_echo2.csv"));
  REQUIRE(run_cli("--task entropy --config /tmp/nhee_echo.ini --format csv --L 26 "
                  "--out /tmp/nhee_echo3.csv") == 0);
  CHECK(cell_value(slurp("/tmp/nhee_echo3.csv"), "L") == 26.0);
}

TEST_CASE("classify-ep reports class and exponent") {
  REQUIRE(run_cli("--task classify-ep --model four-band --M 3 --delta 2 --alpha 0 "
                  "--L 10 --Ly 6 --out /tmp/nhee_classify.csv") == 0);
  const std::string csv = slurp("/tmp/nhee_classify.csv");
  std::vector<std::string> head;
  const auto row = first_row(csv, &head);
  bool found = false;
  for (std::size_t i = 0; i < head.size(); ++i)
    if (head[i] == "class") {
      CHECK(row[i] == "quadratic_det");
      found = true;
    }
  CHECK(found);
  CHECK(std::abs(cell_value(csv, "exponent") - 2.0) < 0.05);
}

TEST_CASE("oracle-check exits zero when all residuals pass") {
  REQUIRE(run_cli("--task oracle-check --instances 8 --out /tmp/nhee_oracle.csv") == 0);
  const std::string csv = slurp("/tmp/nhee_oracle.csv");
  std::istringstream ss(csv);
  int rows = 0;
  for (std::string line; std::getline(ss, line);)
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 1 + 8);
}

TEST_CASE("exit codes: config error 2, numeric refusal 3") {
  CHECK(run_cli("--task entropy --model two-band --L 25 --Ly 2 --out /tmp/x.csv") == 2);  // odd L
  CHECK(run_cli("--task nonsense --out /tmp/x.csv") == 2);
  CHECK(run_cli("--task entropy --model four-band --Z 1.5 --k0-from-zeeman --L 10 --Ly 2 "
                "--out /tmp/x.csv") == 2);
  // overflow guard: (B*Ly)*log(L/pi) > 600
  CHECK(run_cli("--task entropy --model two-band --t 0.5 --a0 2 --b0 1 --B 20 --L 64 --Ly 10 "
                "--out /tmp/x.csv") == 3);
  const std::string err = slurp("/tmp/nhee_cli_stderr.txt");
  CHECK(err.find("\"code\":3") != std::string::npos);
}

TEST_CASE("default output path honors NHEE_OUT_DIR") {
  std::system("rm -rf /tmp/nhee_outdir && mkdir -p /tmp/nhee_outdir");
  const std::string cmd = "NHEE_OUT_DIR=/tmp/nhee_outdir " + cli_path() +
                          " --task entropy --model two-band --L 16 --Ly 1 "
                          ">/dev/null 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(!slurp("/tmp/nhee_outdir/entropy.csv").empty());
}

TEST_SUITE_END();

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 1);
  return doctest::Context(argc, argv).run();
}
