#include "spotiv/io.hpp"
#include "spotiv/pipeline.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#ifndef SPOTIV_CLI
#error "SPOTIV_CLI must name the CLI binary"
#endif
#ifndef SPOTIV_DATA_DIR
#error "SPOTIV_DATA_DIR must name the data directory"
#endif

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// stderr is folded into the captured output.
Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + SPOTIV_CLI + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

const std::string kExample = std::string(SPOTIV_DATA_DIR) + "/example_scenario_i.csv";

}  // namespace

TEST_CASE("estimate report matches the library call") {
  const Run r = run("--mode estimate --input " + kExample + " --seed 3");
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(r.out);

  const auto data = spotiv::read_dataset_csv(kExample);
  const auto est = spotiv::estimate_with_bootstrap(data, spotiv::default_eval_point(), {}, 50,
                                                   0.05, 3, 1);
  CHECK(report["cate"]["cate"].get<double>() == est.cate.cate);
  CHECK(report["cate"]["boot_se"].get<double>() == est.cate.boot_se);
  CHECK(report["cate"]["plug_in_se"].get<double>() == est.cate.plug_in_se);
  CHECK(report["sir"]["M_hat"].get<long>() == est.sir.M_hat);
  CHECK(report["first_stage"]["S_hat"].size() == est.first_stage.S_hat.size());
  CHECK(report["n"].get<long>() == 200);
  CHECK(report.contains("majority_test"));
}

TEST_CASE("missing exposure column exits with an input error") {
  const std::string path = "cli_missing_d.csv";
  {
    std::ofstream f(path);
    f << "y,z1,z2\n1,0.1,0.2\n0,0.3,0.4\n";
  }
  const Run r = run("--mode estimate --input " + path);
  CHECK(r.status == 2);
  CHECK(r.out.find("'d'") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("alpha sets the interval quantile") {
  const Run r = run("--mode estimate --input " + kExample + " --alpha 0.1 --n-boot 20");
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(r.out);
  const double se = report["cate"]["boot_se"].get<double>();
  const auto ci = report["cate"]["ci"];
  const double half = (ci[1].get<double>() - ci[0].get<double>()) / 2.0;
  CHECK(half == doctest::Approx(1.6448536269514722 * se).epsilon(1e-12));
  CHECK(report["alpha"].get<double>() == 0.1);
}

TEST_CASE("bad arguments exit 2") {
  CHECK(run("--mode estimate --input does_not_exist.csv").status == 2);
  CHECK(run("--mode simulate --scenario nope --reps 1").status == 2);
  CHECK(run("--mode estimate --input " + kExample + " --eval-w 1 2").status == 2);
}

TEST_CASE("estimation failure exits 3") {
  const Run r = run("--mode estimate --input " + kExample + " --bandwidth 1e-9 --n-boot 2");
  CHECK(r.status == 3);
}

TEST_CASE("reports are byte-identical across thread counts") {
  const std::string sim =
      "--mode simulate --scenario binary_i --n 300 --c-gamma 0.8 --reps 3 --n-boot 5 "
      "--oracle-draws 100000 --seed 5";
  const Run one = run(sim, "SPOTIV_THREADS=1");
  const Run four = run(sim, "SPOTIV_THREADS=4");
  REQUIRE(one.status == 0);
  CHECK(one.out == four.out);
  const Run csv1 = run(sim + " --format csv", "SPOTIV_THREADS=1");
  const Run csv3 = run(sim + " --format csv", "SPOTIV_THREADS=3");
  CHECK(csv1.out == csv3.out);

  const std::string est = "--mode estimate --input " + kExample + " --n-boot 10";
  CHECK(run(est, "SPOTIV_THREADS=1").out == run(est, "SPOTIV_THREADS=4").out);
}

TEST_CASE("majority-test and generate modes") {
  const Run mt = run("--mode majority-test --input " + kExample);
  REQUIRE(mt.status == 0);
  const auto report = nlohmann::json::parse(mt.out);
  CHECK(report.contains("passed"));
  const Run gen = run("--mode generate --scenario binary_i --n 200 --seed 7");
  REQUIRE(gen.status == 0);
  std::ifstream f(kExample);
  const std::string shipped((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(gen.out == shipped);
}
