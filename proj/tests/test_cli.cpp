#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mckle/cli.hpp"
#include "mckle/errors.hpp"

using mckle::cli::run_cli;
using json = nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("mckle_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

// 30 equal values with mean of squares 0.2063127.
std::string worked_example_file() {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < 30; ++i) os << std::sqrt(0.2063127) << "\n";
  return write_temp("exp30.csv", os.str());
}

}  // namespace

TEST(ParseNumbers, SeparatorsAndHeader) {
  using mckle::cli::parse_numbers;
  EXPECT_EQ(parse_numbers("1, 2,3\n4 5"), (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_EQ(parse_numbers("x\n1.5\n-2\n"), (std::vector<double>{1.5, -2}));
  EXPECT_THROW(parse_numbers("1\nabc\n"), mckle::DataError);
  EXPECT_THROW(parse_numbers(""), mckle::DataError);
  EXPECT_THROW(mckle::cli::read_data_file("/nonexistent/file.csv"), mckle::Error);
}

TEST(Cli, FitWorkedExample) {
  const CliRun r = run({"fit", "--model", "exponential", "--data", worked_example_file()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json d = json::parse(r.out);
  EXPECT_EQ(d["family"], "exponential");
  EXPECT_EQ(d["n"], 30);
  EXPECT_NEAR(d["theta_hat"]["lambda"].get<double>(), 3.113522, 1e-5);
  EXPECT_NEAR(d["lambda_u"].get<double>(), 2.930374, 1e-5);
  EXPECT_EQ(d["method"], "closed");
  EXPECT_TRUE(d["converged"].get<bool>());
  EXPECT_TRUE(d["V_hat"].is_array());
}

TEST(Cli, IntervalWorkedExample) {
  const std::string file = worked_example_file();
  const CliRun r = run({"interval", "--model", "exponential", "--data", file, "--level", "0.95"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json d = json::parse(r.out);
  EXPECT_EQ(d["kind"], "divergence");
  EXPECT_NEAR(d["cutoff_k"].get<double>(), 0.9498908, 1e-5);
  EXPECT_NEAR(d["lower"].get<double>(), 2.092375, 1e-5);
  EXPECT_NEAR(d["upper"].get<double>(), 4.633022, 1e-5);
  const CliRun w = run({"interval", "--model", "exponential", "--data", file, "--kind", "wald"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NEAR(json::parse(w.out)["lower"].get<double>(), 1.867877, 1e-5);
}

TEST(Cli, TestAtEstimateAndAwayFromIt) {
  const std::string file = worked_example_file();
  const CliRun r = run({"test", "--model", "exponential", "--data", file, "--null", "3.113522"});
  ASSERT_EQ(r.code, 0) << r.err;
  json d = json::parse(r.out);
  EXPECT_FALSE(d["reject"].get<bool>());
  EXPECT_EQ(d["region"]["reject"], d["reject"]);
  const CliRun far = run({"test", "--model", "exponential", "--data", file, "--null", "10"});
  ASSERT_EQ(far.code, 0) << far.err;
  d = json::parse(far.out);
  EXPECT_TRUE(d["reject"].get<bool>());
  EXPECT_TRUE(d["region"]["reject"].get<bool>());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"fit", "--model", "exponential", "--data", "/nonexistent.csv"}).code, 1);
  EXPECT_EQ(run({"fit", "--model", "exponential", "--data", write_temp("bad.csv", "1\nfoo\n")}).code, 1);
  EXPECT_EQ(run({"fit", "--model", "exponential", "--data", write_temp("neg.csv", "-1\n2\n3\n")}).code, 2);
  EXPECT_EQ(run({"fit", "--model", "weibull", "--data", worked_example_file()}).code, 64);
  EXPECT_EQ(run({"fit"}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"interval", "--model", "exponential", "--data", worked_example_file(), "--level", "1.5"}).code, 64);
  EXPECT_EQ(run({"simulate", "--model", "exponential", "--params", "lambda=5", "--sizes", "10", "--reps", "0"}).code, 64);
  EXPECT_EQ(run({"simulate", "--model", "exponential", "--params", "lambda=-1", "--sizes", "10", "--reps", "5"}).code, 2);
}

TEST(Cli, SimulateCsvDeterministic) {
  const std::vector<std::string> base{"simulate", "--model", "exponential", "--params", "lambda=5",
                                      "--sizes", "10:55:5", "--reps", "100", "--seed", "7"};
  auto a_args = base;
  a_args.insert(a_args.end(), {"--threads", "1"});
  auto b_args = base;
  b_args.insert(b_args.end(), {"--threads", "3"});
  const CliRun a = run(a_args), b = run(b_args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 21);
  auto j_args = base;
  j_args.insert(j_args.end(), {"--format", "json"});
  const CliRun j = run(j_args);
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_EQ(json::parse(j.out)["rows"].size(), 20u);
}

TEST(Cli, SampleSizeFloorContract) {
  const CliRun r = run({"samplesize", "--model", "exponential", "--null", "5", "--alt", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json d = json::parse(r.out);
  EXPECT_EQ(d["n_star"].get<long>(), static_cast<long>(std::floor(d["n0"].get<double>())) + 1);
  EXPECT_GE(d["power_at_n_star"].get<double>(), 0.8 - 1e-6);
  const CliRun p = run({"power", "--model", "exponential", "--null", "5", "--alt", "6", "--n", "50"});
  ASSERT_EQ(p.code, 0) << p.err;
  const double pw = json::parse(p.out)["power"].get<double>();
  EXPECT_GE(pw, 0.05);
  EXPECT_LE(pw, 1.0);
}

TEST(Cli, GofNonnegativeAndSingleton) {
  const CliRun r = run({"gof", "--model", "laplace", "--data", write_temp("pm.csv", "-1\n1\n0.3\n-2\n")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(json::parse(r.out)["divergence"].get<double>(), 0.0);
  const CliRun one = run({"gof", "--model", "exponential", "--data", write_temp("one.csv", "0.8\n")});
  ASSERT_EQ(one.code, 0) << one.err;
  const json d = json::parse(one.out);
  EXPECT_TRUE(d["divergence"].is_number());
  EXPECT_EQ(d["entropy_constant"].get<double>(), 0.0);
}

TEST(Cli, OutFileAndHeaderedCsv) {
  const std::string data = write_temp("hdr.csv", "value\n0.5\n1.5\n2.0\n");
  const std::string out = (std::filesystem::temp_directory_path() / "mckle_cli_out.json").string();
  const CliRun r = run({"fit", "--model", "exponential", "--data", data, "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  const json d = json::parse(in);
  EXPECT_EQ(d["n"], 3);
}
