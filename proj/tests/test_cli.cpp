#include "qbt/models.hpp"
#include "qbt/serialize.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qbt;

namespace {

// The CLI under test; provided by ctest through the environment.
std::string cli() {
  const char* p = std::getenv("QBT_CLI");
  return p ? p : "";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& out_file) {
  RunResult r;
  const std::string cmd = "\"" + cli() + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  if (!out_file.empty()) {
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
  }
  return r;
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::vector<std::vector<double>> parse_csv(const std::string& body) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(body);
  std::string line;
  bool header_seen = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("cli verify: exit codes for pass, corrupted model, and missing file") {
  REQUIRE_FALSE(cli().empty());

  SUBCASE("builtin model passes with exit 0") {
    const auto out = tmp("qbt_cli_verify.json");
    const RunResult r = run("--model \"sl1d N=12\" --no-timestamp verify --out " +
                                out.string(),
                            out.string());
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("pass") == true);
  }

  SUBCASE("corrupted G1 fails the Green entry with exit 1") {
    const TripleModel m = models::synthetic_pair(3, 6, 2);
    auto doc = model_to_json(m);
    doc["G1"][0][0][0] = doc["G1"][0][0][0].get<double>() + 0.5;
    const auto model_path = tmp("qbt_cli_corrupt.json");
    {
      std::ofstream f(model_path);
      f << doc.dump();
    }
    const auto out = tmp("qbt_cli_corrupt_report.json");
    const RunResult r = run("--model " + model_path.string() +
                                " --no-timestamp verify --out " + out.string(),
                            out.string());
    CHECK(r.exit_code == 1);
    const auto rep = nlohmann::json::parse(r.out);
    CHECK(rep.at("pass") == false);
    CHECK(rep.at("entries").at(0).at("name") == "green");
    CHECK(rep.at("entries").at(0).at("pass") == false);
    std::filesystem::remove(model_path);
    std::filesystem::remove(out);
  }

  SUBCASE("missing file exits 2") {
    const RunResult r = run("--model /nonexistent/model.json verify", "");
    CHECK(r.exit_code == 2);
  }

  SUBCASE("saved model round-trips through the CLI") {
    const TripleModel m = models::convection_diffusion_1d(
        models::Coefficients1D::sample_cd(
            8, [](double) { return 1.0; }, [](double) { return 1.0; },
            [](double) { return Complex(0, 0); }));
    const auto model_path = tmp("qbt_cli_model.json");
    save_model(m, model_path);
    const auto out = tmp("qbt_cli_model_report.json");
    const RunResult r = run("--model " + model_path.string() +
                                " --no-timestamp verify --out " + out.string(),
                            out.string());
    CHECK(r.exit_code == 0);
    std::filesystem::remove(model_path);
    std::filesystem::remove(out);
  }
}

TEST_CASE("cli solve: dual-route agreement and failure reasons") {
  REQUIRE_FALSE(cli().empty());

  SUBCASE("Robin solve at -1 agrees between routes") {
    const auto out = tmp("qbt_cli_solve.csv");
    const RunResult r =
        run("--model \"sl1d N=16\" --param theta=1 --no-timestamp solve --lambda -1 "
            "--rhs e1 --out " + out.string(),
            out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("re(u_direct)") != std::string::npos);
    double deviation = 1.0;
    std::stringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line)) {
      const std::string key = "# krein_vs_direct_relative_deviation: ";
      if (line.rfind(key, 0) == 0) deviation = std::stod(line.substr(key.size()));
    }
    CHECK(deviation < 1e-10);
    CHECK(parse_csv(r.out).size() == 16);
    std::filesystem::remove(out);
  }

  SUBCASE("Dirichlet parameter reproduces the A0 resolvent") {
    const auto out = tmp("qbt_cli_solve0.csv");
    const RunResult r =
        run("--model \"sl1d N=8\" --param dirichlet --no-timestamp solve --lambda -1 "
            "--out " + out.string(),
            out.string());
    CHECK(r.exit_code == 0);
    for (const auto& row : parse_csv(r.out)) {
      REQUIRE(row.size() == 5);
      CHECK(std::abs(row[1] - row[3]) < 1e-12);  // direct == krein
      CHECK(std::abs(row[2] - row[4]) < 1e-12);
    }
    std::filesystem::remove(out);
  }

  SUBCASE("a Robin eigenvalue is reported as birman-schwinger singular") {
    const TripleModel m = models::sturm_liouville_1d(models::Coefficients1D::sample(
        16, [](double) { return 1.0; }, [](double) { return 0.0; }));
    const std::vector<Complex> sp =
        ab_spectrum(m, BoundaryParameter::robin(Complex(1, 0), m.m()));
    REQUIRE(!sp.empty());
    std::ostringstream lam;
    lam.precision(17);
    lam << sp.front().real();
    const auto out = tmp("qbt_cli_solve_sing.json");
    const RunResult r = run("--model \"sl1d N=16\" --param theta=1 --no-timestamp solve "
                            "--lambda " + lam.str() + " --out " + out.string(),
                            out.string());
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("birman-schwinger singular") != std::string::npos);
    std::filesystem::remove(out);
  }
}

TEST_CASE("cli eig matches the pencil cross-check column") {
  REQUIRE_FALSE(cli().empty());
  const auto out = tmp("qbt_cli_eig.csv");
  const RunResult r =
      run("--model \"sl1d N=16\" --param theta=1 --no-timestamp eig "
          "--region 0,60,-1,1 --grid 24 --out " + out.string(),
          out.string());
  CHECK(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);  // 1.70, 13.42, 42.91 lie below 60
  for (const auto& row : rows) {
    REQUIRE(row.size() == 5);
    CHECK(row[3] < 1e-7);  // pencil_distance
    CHECK(row[2] < 1e-9);  // bs_residual
  }
  std::filesystem::remove(out);
}

TEST_CASE("cli dtn emits symmetric frame entries on the symmetric model") {
  REQUIRE_FALSE(cli().empty());
  const auto out = tmp("qbt_cli_dtn.csv");
  const RunResult r = run("--model \"sl1d N=16\" --no-timestamp dtn --lambda \"-1;-2\" "
                          "--out " + out.string(),
                          out.string());
  CHECK(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 8);  // two lambdas x 2x2 entries
  // Symmetry: entry (i,j) equals entry (j,i) for each lambda.
  for (size_t base : {size_t(0), size_t(4)}) {
    CHECK(rows[base + 1][4] == doctest::Approx(rows[base + 2][4]).epsilon(1e-12));
  }
  std::filesystem::remove(out);
}

TEST_CASE("cli sweep produces continuous eigenvalue trajectories") {
  REQUIRE_FALSE(cli().empty());
  const auto out = tmp("qbt_cli_sweep.csv");
  const RunResult r =
      run("--model \"sl1d N=12\" --no-timestamp sweep --theta 0.1:1.0:10 "
          "--region 0,12,-1,1 --grid 20 --out " + out.string(),
          out.string());
  CHECK(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(!rows.empty());
  // Group roots by theta and track the lowest branch.
  std::map<double, std::vector<double>> by_theta;
  for (const auto& row : rows) by_theta[row[0]].push_back(row[1]);
  REQUIRE(by_theta.size() == 10);
  std::vector<double> lowest;
  for (auto& [th, roots] : by_theta) {
    lowest.push_back(*std::min_element(roots.begin(), roots.end()));
  }
  // Continuity diagnostic: adjacent-theta distance bounded by 10x the local
  // step times the observed sensitivity of the branch.
  const double dtheta = 0.1;
  double sensitivity = std::max(1.0, std::abs(lowest[1] - lowest[0]) / dtheta);
  for (size_t k = 1; k < lowest.size(); ++k) {
    const double step = std::abs(lowest[k] - lowest[k - 1]);
    CHECK(step <= 10.0 * dtheta * sensitivity);
    sensitivity = std::max(1.0, step / dtheta);
  }
  std::filesystem::remove(out);
}

TEST_CASE("cli table output honors --format json") {
  REQUIRE_FALSE(cli().empty());
  const auto out = tmp("qbt_cli_dtn.json");
  const RunResult r = run("--model \"sl1d N=8\" --no-timestamp --format json dtn "
                          "--lambda \"-1\" --out " + out.string(),
                          out.string());
  CHECK(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("columns").size() == 6);
  CHECK(doc.at("rows").size() == 4);
  CHECK_FALSE(doc.contains("timestamp"));
  std::filesystem::remove(out);
}
