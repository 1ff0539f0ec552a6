#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "rose_dyn/cli.hpp"

using namespace rose_dyn;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> last_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::string last;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      last = line;
    }
  }
  std::vector<std::string> cols;
  std::istringstream row(last);
  for (std::string f; std::getline(row, f, ',');) {
    cols.push_back(f);
  }
  return cols;
}

}  // namespace

TEST_CASE("field-eval", "[cli]") {
  auto r = run({"field-eval", "--x", "0", "--y", "0"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "0 0\n");

  r = run({"field-eval", "--x", "-1", "--y", "0"});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream in(r.out);
  double fx = 0.0;
  double fy = 0.0;
  in >> fx >> fy;
  CHECK(std::abs(fx - std::exp(-1.0)) <= 1e-15);
  CHECK(std::abs(fy + std::exp(-1.0)) <= 1e-15);

  r = run({"field-eval", "--r", "1", "--theta", "0.5", "--chart", "polar"});
  CHECK(r.code == cli::kExitOk);
  CHECK(run({"field-eval", "--x", "1"}).code == cli::kExitUsage);
  CHECK(run({"field-eval", "--x", "1", "--y", "0", "--r", "1"}).code == cli::kExitUsage);
  CHECK(run({"field-eval", "--x", "1", "--y", "0", "--chart", "spherical"}).code ==
        cli::kExitUsage);
}

TEST_CASE("classify", "[cli]") {
  const auto r = run({"classify", "--r", "1", "--theta", "0"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["class"] == "SpiralOntoRose");
  CHECK(j["F0"] == 1.0);
  CHECK(j["schema"] == 1);

  const auto deg = run({"classify", "--r", "0.1", "--theta-deg", "90"});
  REQUIRE(deg.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(deg.out)["class"] == "HomoclinicInterior");
}

TEST_CASE("orbit example", "[cli]") {
  const auto r = run({"orbit", "--r", "0.36", "--theta", "1.5708", "--revolutions", "5"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.starts_with("param,r,theta,x,y,F\n"));
  const auto cols = last_row(r.out);
  REQUIRE(cols.size() == 6);
  CHECK(std::stod(cols[0]) == 1.5708 + 10 * std::numbers::pi);
  // The true gap is ~2e-15, well below what rel 1e-10 integration resolves.
  CHECK(std::abs(std::stod(cols[5]) - frozen::cli_final_F) <= 1e-10);

  const auto j = run({"orbit", "--r", "0.36", "--theta", "1.5708", "--format", "json"});
  REQUIRE(j.code == cli::kExitOk);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["terminal"]["kind"] == "RangeEnd");
  CHECK(std::abs(doc["samples"][0][5].get<double>() - frozen::cli_F0) <= 1e-15);
}

TEST_CASE("orbit variants and failures", "[cli]") {
  const auto homoclinic = run({"orbit", "--r", "0.1", "--theta", "1.5708", "--format", "json"});
  REQUIRE(homoclinic.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(homoclinic.out)["terminal"]["kind"] == "OriginEvent");

  const auto back = run({"orbit", "--r", "0.5", "--theta", "1", "--backward", "--format", "json"});
  REQUIRE(back.code == cli::kExitOk);
  const auto doc = nlohmann::json::parse(back.out);
  CHECK(doc["samples"].back()[0].get<double>() < 1.0);

  const auto timed = run({"orbit", "--x", "0.8", "--y", "0", "--t-end", "10", "--format", "json"});
  REQUIRE(timed.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(timed.out)["parameterization"] == "time");

  // Step budget exhausted: data is still written, exit code says computation failed.
  const auto budget = run({"orbit", "--r", "1", "--theta", "0", "--max-steps", "3"});
  CHECK(budget.code == cli::kExitComputation);
  CHECK(budget.out.starts_with("param,"));
}

TEST_CASE("usage errors exit with 2", "[cli]") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"orbit", "--r", "1", "--theta", "0", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"orbit", "--r", "1", "--theta", "0", "--rel-tol", "-1e-10"}).code == cli::kExitUsage);
  CHECK(run({"orbit", "--r", "-0.5", "--theta", "0"}).code == cli::kExitUsage);
  CHECK(run({"orbit", "--r", "nan", "--theta", "0"}).code == cli::kExitUsage);
  CHECK(run({"orbit", "--r", "1", "--theta", "0", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(run({"rose", "--petals", "-1"}).code == cli::kExitUsage);
  CHECK(run({"smoothness", "--x0", "0.5"}).code == cli::kExitUsage);
  const auto r = run({"orbit", "--r", "-0.5", "--theta", "0"});
  CHECK_FALSE(r.err.empty());
  CHECK(r.out.empty());
}

TEST_CASE("help exits cleanly", "[cli]") {
  const auto r = run({"--help"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("orbit") != std::string::npos);
  CHECK(run({"orbit", "--help"}).code == cli::kExitOk);
}

TEST_CASE("output is deterministic", "[cli]") {
  const std::vector<std::string> args{"orbit", "--r", "0.9", "--theta", "0.2", "--revolutions",
                                      "2"};
  CHECK(run(args).out == run(args).out);
  CHECK(run({"rose", "--format", "svg"}).out == run({"rose", "--format", "svg"}).out);
}

TEST_CASE("rose output", "[cli]") {
  const auto r = run({"rose", "--petals", "1", "--points", "16"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.starts_with("theta,r,x,y\n"));
}

TEST_CASE("omega and petal-areas", "[cli]") {
  const auto omega = run({"omega", "--r", "0.5", "--theta", "0"});
  REQUIRE(omega.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(omega.out);
  CHECK(j["converged"] == true);
  CHECK(j["revolutions_used"] == 3);

  CHECK(run({"omega", "--r", "0.1", "--theta", "1.5708"}).code == cli::kExitUsage);
  CHECK(run({"omega", "--r", "1", "--theta", "0", "--epsilon", "1e-12", "--max-revolutions", "1"})
            .code == cli::kExitComputation);

  const auto areas = run({"petal-areas", "--petals", "5"});
  REQUIRE(areas.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(areas.out)["petal_areas"].size() == 5);
  CHECK(run({"petal-areas", "--petals", "3", "--domain-area", "0.01"}).code ==
        cli::kExitComputation);
}

TEST_CASE("smoothness", "[cli]") {
  const auto r = run({"smoothness", "--x0", "-0.5", "--order", "2", "--steps", "1e-2,1e-3,1e-4"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["cauchy"] == true);
}

TEST_CASE("portrait is independent of the thread count", "[cli]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rose_dyn_cli_test";
  fs::create_directories(dir);
  const std::vector<std::string> ics{"--ic", "1,0",   "--ic", "0.1,1.5708", "--ic", "0.5,2",
                                     "--ic", "2,-1", "--revolutions", "2"};
  std::string previous;
  for (const char* threads : {"1", "4"}) {
    ::setenv("ROSE_DYN_THREADS", threads, 1);
    CHECK(cli::batch_threads() == static_cast<unsigned>(std::stoi(threads)));
    const fs::path file = dir / (std::string("portrait_") + threads + ".svg");
    std::vector<std::string> args{"portrait"};
    args.insert(args.end(), ics.begin(), ics.end());
    args.insert(args.end(), {"--out", file.string()});
    REQUIRE(run(args).code == cli::kExitOk);
    std::ifstream in(file);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("<svg") != std::string::npos);
    if (!previous.empty()) {
      CHECK(text.str() == previous);
    }
    previous = text.str();
  }
  ::setenv("ROSE_DYN_THREADS", "0", 1);
  CHECK(cli::batch_threads() >= 1);
  ::unsetenv("ROSE_DYN_THREADS");
  fs::remove_all(dir);

  CHECK(run({"portrait", "--ic", "oops"}).code == cli::kExitUsage);
  CHECK(run({"portrait", "--width", "0"}).code == cli::kExitUsage);
}
