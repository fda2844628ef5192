#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harq/commands.hpp"

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = harq::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const auto neg = run({"optimize", "--beta", "-1"});
  CHECK(neg.code == 2);
  CHECK(neg.err.find("beta must be ≥ 0") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"optimize", "--no-such-flag"}).code == 2);
  CHECK(run({"curves", "bogus"}).code == 2);
  CHECK(run({"optimize", "--format", "xml"}).code == 2);
  CHECK(run({"optimize", "--model", "table:/nonexistent.csv"}).code == 2);
  CHECK(run({"baseline", "--scheme", "polar"}).code == 2);
  CHECK(run({"sweep", "--beta-range", "10:0:5"}).code == 2);
  CHECK(run({"simulate", "--scheme", "dist", "--support", "1,2"}).code == 2);
}

TEST_CASE("optimize report and JSON") {
  const auto text = run({"optimize", "--k", "64", "--nmax", "192", "--beta", "10", "--model", "gaussian-tbcc"});
  REQUIRE(text.code == 0);
  CHECK(text.out.find("schedule           120 133 146 165 192") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "harq_cli_opt.json";
  REQUIRE(run({"optimize", "--beta", "10", "--out", path.string()}).code == 0);
  const auto j = nlohmann::json::parse(slurp(path));
  CHECK(j["schema"] == 1);
  for (const char* key : {"config", "lambda_star", "rho_star", "schedule", "ir_lengths", "gamma_star",
                          "aoi_with_wait"})
    CHECK(j.contains(key));
  CHECK(j["schedule"].front() == 120);
  CHECK(j["schedule"].back() == 192);
  CHECK(j["lambda_star"].get<double>() == doctest::Approx(70).epsilon(0.03));
  int total = 0;
  for (const auto& x : j["ir_lengths"]) total += x.get<int>();
  CHECK(total == 192);

  const auto js = run({"optimize", "--beta", "10", "--format", "json"});
  CHECK(nlohmann::json::parse(js.out) == j);
}

TEST_CASE("per-N1 route and fixed transmission count") {
  const auto r = run({"optimize", "--beta", "10", "--route", "per-n1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("transmissions      6") != std::string::npos);
  CHECK(run({"optimize", "--beta", "10", "--fixed-m", "5"}).code == 0);
  CHECK(run({"optimize", "--beta", "10", "--fixed-m", "40"}).code == 3);
}

TEST_CASE("sweep output is schema-stable and ordered") {
  const auto a = run({"sweep", "--betas", "20,0,10"});
  REQUIRE(a.code == 0);
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "beta,scheme,n1,m,aoi_zero_wait,aoi_with_wait,gamma_star,error");
  std::vector<std::string> order;
  while (std::getline(in, line)) order.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
  CHECK(order == std::vector<std::string>{"0,FR-no-replace", "0,FR-replace", "0,HARQ", "0,HARQ-rounded", "0,IIR",
                                          "10,FR-no-replace", "10,FR-replace", "10,HARQ", "10,HARQ-rounded",
                                          "10,IIR", "20,FR-no-replace", "20,FR-replace", "20,HARQ",
                                          "20,HARQ-rounded", "20,IIR"});
  CHECK(run({"sweep", "--betas", "20,0,10"}).out == a.out);
  const auto j = run({"sweep", "--beta-range", "0:20:10", "--format", "json"});
  REQUIRE(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).size() == 15);
}

TEST_CASE("sweep keeps going past a failing row") {
  const auto path = std::filesystem::temp_directory_path() / "harq_cli_flat.csv";
  std::ofstream(path) << "N,p_ack\n64,0.0\n128,0.5\n192,0.9\n";
  const auto r = run({"sweep", "--betas", "10", "--model", "table:" + path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("10,IIR,,,,,,") != std::string::npos);
}

TEST_CASE("curves") {
  const auto p = run({"curves", "p-lambda", "--beta", "10", "--points", "6", "--lambda-max", "100"});
  REQUIRE(p.code == 0);
  CHECK(p.out.rfind("lambda,p,e_tau,e_tau2,n1,m\n", 0) == 0);
  const auto r = run({"curves", "rho-n1", "--beta", "10", "--n1-step", "8"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n1,feasible,lambda_star,rho,rho_real,m\n", 0) == 0);
  const auto ir = run({"curves", "ir-n1", "--beta", "10", "--n1-step", "8", "--format", "json"});
  REQUIRE(ir.code == 0);
  CHECK(nlohmann::json::parse(ir.out).size() == 17);
}

TEST_CASE("baseline") {
  const auto r = run({"baseline", "--beta", "10", "--scheme", "fr-replace"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "beta,scheme,n1,m,aoi_zero_wait,aoi_with_wait,gamma_star,error\n"
                 "10,FR-replace,132,,224.817682,224.817682,0.000000,\n");
}

TEST_CASE("simulate") {
  const auto a = run({"simulate", "--beta", "10", "--seed", "9", "--epochs", "200000"});
  CHECK(a.code == 0);
  CHECK(a.out.find("check_3sigma       pass") != std::string::npos);
  CHECK(run({"simulate", "--beta", "10", "--seed", "9", "--epochs", "200000"}).out == a.out);

  const auto det = run({"simulate", "--schedule", "192", "--beta", "10", "--epochs", "1000"});
  CHECK(det.code == 0);
  CHECK(det.out.find("analytical_aoi     303.000000") != std::string::npos);
  CHECK(det.out.find("simulated_aoi      303.000000") != std::string::npos);

  // One batch gives no error estimate, so a noisy run cannot be certified.
  const auto one = run({"simulate", "--scheme", "dist", "--support", "15,30", "--mass", "0.5,0.5", "--epochs", "10",
                        "--batches", "1"});
  CHECK(one.code == 4);
  CHECK(one.out.find("check_3sigma       fail") != std::string::npos);

  for (const char* s : {"iir", "fr-no-replace", "fr-replace"})
    CHECK(run({"simulate", "--scheme", s, "--beta", "10", "--epochs", "100000"}).code == 0);
}
