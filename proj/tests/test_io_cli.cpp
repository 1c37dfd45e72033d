// Copyright 2026 The nntc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "nntc/experiments.hpp"
#include "nntc/io.hpp"
#include "nntc/loss.hpp"
#include "test_util.hpp"

using namespace nntc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nntc_test_" + std::to_string(static_cast<unsigned long>(::getpid())) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Path of the CLI binary, provided by ctest.
const char* cli_path() { return std::getenv("NNTC_CLI"); }

int run_cli(const std::string& args) {
  const int raw = std::system((std::string(cli_path()) + " " + args + " >/dev/null 2>&1").c_str());
  REQUIRE(raw != -1);
  return WEXITSTATUS(raw);
}

std::string capture_cli(const std::string& args, int* exit_code, const TempDir& dir) {
  const std::string out_file = dir.file("stdout.txt");
  const int raw =
      std::system((std::string(cli_path()) + " " + args + " >" + out_file + " 2>/dev/null").c_str());
  REQUIRE(raw != -1);
  if (exit_code) *exit_code = WEXITSTATUS(raw);
  return slurp(out_file);
}

}  // namespace

TEST_CASE("observation files round trip byte for byte") {
  Shape s({3, 2, 2});
  Rng rng(3);
  auto obs = testutil::random_observations(s, 25, rng);

  std::ostringstream first;
  write_observations(first, obs);
  std::istringstream back(first.str());
  const ObservationSet reread = read_observations(back);
  CHECK(reread.num_samples() == obs.num_samples());
  CHECK(reread.num_unique() == obs.num_unique());
  for (std::int64_t i = 0; i < obs.num_samples(); ++i) {
    CHECK(reread.value(i) == obs.value(i));
    auto a = obs.sample_coords(i);
    auto b = reread.sample_coords(i);
    CHECK(std::vector<int>(a.begin(), a.end()) == std::vector<int>(b.begin(), b.end()));
  }
  std::ostringstream second;
  write_observations(second, reread);
  CHECK(first.str() == second.str());
}

TEST_CASE("observation parser reports line numbers") {
  auto expect_error_at = [](const std::string& text, int line) {
    std::istringstream in(text);
    try {
      read_observations(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_error_at("2 2\n", 1);                        // header lists too few dims
  expect_error_at("2 2 2\n", 2);                       // no samples
  expect_error_at("x 2 2\n1 1 0.5\n", 1);             // bad order token
  expect_error_at("2 2 2\n1 1\n", 2);                 // short sample line
  expect_error_at("2 2 2\n1 3 0.5\n", 2);             // index out of range
  expect_error_at("2 2 2\n1 1 0.5\n1 1 -2\n", 3);     // negative value
  expect_error_at("2 2 2\n0 1 0.5\n", 2);             // one-based indices start at 1
}

TEST_CASE("model files round trip byte for byte") {
  Shape s({3, 4});
  Rng rng(5);
  std::vector<Atom> atoms{random_vertex(s, 1.5, rng), random_vertex(s, 1.5, rng),
                          random_vertex(s, 1.5, rng)};
  std::vector<double> w{0.25, 0.5, 0.25};
  Model model(s, 1.5, atoms, w);

  std::ostringstream first;
  write_model(first, model);
  std::istringstream back(first.str());
  const Model reread = read_model(back);
  CHECK(reread.lambda() == model.lambda());
  CHECK(reread.weights() == model.weights());
  CHECK(reread.atoms().size() == model.atoms().size());
  for (std::size_t j = 0; j < model.size(); ++j) CHECK(reread.atoms()[j] == model.atoms()[j]);

  std::ostringstream second;
  write_model(second, reread);
  CHECK(first.str() == second.str());
}

TEST_CASE("model parser validation") {
  auto expect_error_at = [](const std::string& text, int line) {
    std::istringstream in(text);
    try {
      read_model(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_error_at("1 1 2 2 2\n1 10 1\n", 2);       // bitstring too short
  expect_error_at("1 1 2 2 2\n1 12 11\n", 2);      // non-binary digit
  expect_error_at("1 2 2 2 2\n0.5 10 11\n0.4 01 10\n", 3);  // weights off the simplex
  expect_error_at("1 0 2 2 2\n", 1);               // zero atoms
  expect_error_at("-1 1 2 2 2\n1 11 11\n", 1);     // negative lambda
}

TEST_CASE("dense observation files enumerate every index") {
  Shape s({2, 3});
  std::vector<double> dense{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  std::ostringstream out;
  write_dense_as_observations(out, s, dense);
  std::istringstream in(out.str());
  Shape shape_back({1, 1});
  const std::vector<double> reread = read_dense_observations(in, &shape_back);
  CHECK(shape_back == s);
  CHECK(reread == dense);

  std::istringstream partial("2 2 2\n1 1 0.5\n");
  CHECK_THROWS_AS(read_dense_observations(partial, nullptr), ParseError);
}

TEST_CASE("cli generate is deterministic and consistent") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  const std::string flags = "generate --shape 3,3 --atoms 2 --n 12 --seed 5 --obs-out " +
                            dir.file("a_obs.txt") + " --truth-out " + dir.file("a_truth.txt");
  CHECK(run_cli(flags) == 0);
  const std::string flags2 = "generate --shape 3,3 --atoms 2 --n 12 --seed 5 --obs-out " +
                             dir.file("b_obs.txt") + " --truth-out " + dir.file("b_truth.txt");
  CHECK(run_cli(flags2) == 0);
  CHECK(slurp(dir.file("a_obs.txt")) == slurp(dir.file("b_obs.txt")));
  CHECK(slurp(dir.file("a_truth.txt")) == slurp(dir.file("b_truth.txt")));

  // samples re-parsed and re-evaluated equal the dense truth at their indices
  const ObservationSet obs = read_observations_file(dir.file("a_obs.txt"));
  std::ifstream truth_in(dir.file("a_truth.txt"));
  Shape truth_shape({1, 1});
  const std::vector<double> dense = read_dense_observations(truth_in, &truth_shape);
  REQUIRE(truth_shape == obs.shape());
  for (std::int64_t i = 0; i < obs.num_samples(); ++i) {
    const auto lin = obs.shape().linear_index(obs.sample_coords(i));
    CHECK(obs.value(i) == dense[static_cast<std::size_t>(lin)]);
  }

  // header format: order then dimensions
  std::istringstream header(slurp(dir.file("a_obs.txt")));
  std::string first_line;
  std::getline(header, first_line);
  CHECK(first_line == "2 3 3");
}

TEST_CASE("NNTC_SEED overrides the seed flag") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  CHECK(run_cli("generate --shape 2,2 --atoms 1 --n 5 --seed 9 --obs-out " + dir.file("a.txt")) ==
        0);
  const std::string env_cmd = "NNTC_SEED=9 " + std::string(cli_path()) +
                              " generate --shape 2,2 --atoms 1 --n 5 --seed 1 --obs-out " +
                              dir.file("b.txt") + " >/dev/null 2>&1";
  REQUIRE(std::system(env_cmd.c_str()) != -1);
  CHECK(slurp(dir.file("a.txt")) == slurp(dir.file("b.txt")));
}

TEST_CASE("cli solve, eval and exit codes") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  // realizable rank-1 instance
  REQUIRE(run_cli("generate --shape 4,3,2 --atoms 1 --n 60 --seed 4 --obs-out " +
                  dir.file("obs.txt") + " --truth-out " + dir.file("truth.txt")) == 0);

  SUBCASE("converged solve exits 0 and reaches tiny loss") {
    const int code = run_cli("solve --in " + dir.file("obs.txt") +
                             " --lambda 1 --epsilon 1e-8 --seed 0 --model-out " +
                             dir.file("model.txt") + " --stats-out " + dir.file("stats.json"));
    CHECK(code == 0);
    const auto stats = nlohmann::json::parse(slurp(dir.file("stats.json")));
    CHECK(stats.at("converged").get<bool>());
    CHECK(stats.at("final_loss").get<double>() <= 1e-10);

    // model round trip: reconstruct on U reproduces the reported loss
    const Model model = read_model_file(dir.file("model.txt"));
    const ObservationSet obs = read_observations_file(dir.file("obs.txt"));
    std::vector<double> psi(static_cast<std::size_t>(obs.num_unique()), 0.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
      const auto col = atom_project(model.atoms()[j], obs);
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += model.weights()[j] * col[i];
    }
    CHECK(std::abs(loss(LossState(obs, psi)) - stats.at("final_loss").get<double>()) <= 1e-9);

    // eval against the dense truth: near-perfect recovery
    int eval_code = -1;
    const std::string printed = capture_cli(
        "eval --model " + dir.file("model.txt") + " --truth " + dir.file("truth.txt"), &eval_code,
        dir);
    CHECK(eval_code == 0);
    CHECK(std::stod(printed) <= 1e-9);
  }

  SUBCASE("huge epsilon converges with zero vertex additions") {
    const int code = run_cli("solve --in " + dir.file("obs.txt") +
                             " --lambda 1 --epsilon 1e9 --model-out " + dir.file("model.txt") +
                             " --stats-out " + dir.file("stats.json"));
    CHECK(code == 0);
    const auto stats = nlohmann::json::parse(slurp(dir.file("stats.json")));
    CHECK(stats.at("fw_steps").get<int>() == 0);
  }

  SUBCASE("iteration cap exits 2 but still writes the model") {
    const int code = run_cli("solve --in " + dir.file("obs.txt") +
                             " --lambda 1 --epsilon 1e-12 --max-iterations 1 --model-out " +
                             dir.file("model.txt") + " --stats-out " + dir.file("stats.json"));
    CHECK(code == 2);
    CHECK(fs::exists(dir.file("model.txt")));
    const Model model = read_model_file(dir.file("model.txt"));
    CHECK(model.size() >= 1);
  }

  SUBCASE("starved node budget exits 3") {
    // an unrealizable instance forces a mixed-sign exact proof, which a
    // single-node budget cannot complete
    std::ofstream hard(dir.file("hard.txt"));
    hard << "2 2 2\n1 1 0.3\n1 2 0.9\n2 1 0.7\n2 2 0.1\n";
    hard.close();
    const int code = run_cli("solve --in " + dir.file("hard.txt") +
                             " --lambda 1 --epsilon 1e-9 --node-budget 1 --model-out " +
                             dir.file("model.txt"));
    CHECK(code == 3);
  }

  SUBCASE("malformed input exits 1") {
    std::ofstream bad(dir.file("bad.txt"));
    bad << "2 2 2\n1 5 0.5\n";
    bad.close();
    CHECK(run_cli("solve --in " + dir.file("bad.txt") + " --lambda 1 --model-out " +
                  dir.file("model.txt")) == 1);
    CHECK(run_cli("solve --lambda 1") == 1);  // missing required flags
  }

  SUBCASE("zero model evaluates to NMSE one") {
    std::ofstream zero_model(dir.file("zero.txt"));
    zero_model << "1 1 3 4 3 2\n1 0000 000 00\n";
    zero_model.close();
    int eval_code = -1;
    const std::string printed = capture_cli(
        "eval --model " + dir.file("zero.txt") + " --truth " + dir.file("truth.txt"), &eval_code,
        dir);
    CHECK(eval_code == 0);
    CHECK(std::stod(printed) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("shape mismatch in eval exits 1") {
    TempDir other;
    REQUIRE(run_cli("generate --shape 2,2 --atoms 1 --n 5 --seed 1 --obs-out " +
                    other.file("obs.txt") + " --truth-out " + other.file("truth.txt")) == 0);
    std::ofstream zero_model(dir.file("zero2.txt"));
    zero_model << "1 1 3 4 3 2\n1 0000 000 00\n";
    zero_model.close();
    CHECK(run_cli("eval --model " + dir.file("zero2.txt") + " --truth " +
                  other.file("truth.txt")) == 1);
  }
}

TEST_CASE("cli eval agrees with the in-process nmse") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  Shape s({3, 3});
  Rng rng(21);
  const GroundTruth gt = generate_ground_truth(s, 3, rng);
  const Model mixture(s, 1.0, gt.atoms, gt.weights);

  {
    std::ofstream model_out(dir.file("model.txt"));
    write_model(model_out, mixture);
    std::ofstream truth_out(dir.file("truth.txt"));
    write_dense_as_observations(truth_out, s, gt.dense);
  }
  int code = -1;
  const std::string printed =
      capture_cli("eval --model " + dir.file("model.txt") + " --truth " + dir.file("truth.txt"),
                  &code, dir);
  CHECK(code == 0);
  CHECK(std::stod(printed) == doctest::Approx(nmse(mixture, gt)).epsilon(1e-6));
}

TEST_CASE("cli bench") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;

  SUBCASE("empty spec produces a header-only csv") {
    std::ofstream spec(dir.file("spec.txt"));
    spec << "# nothing here\n\n";
    spec.close();
    CHECK(run_cli("bench --spec " + dir.file("spec.txt") + " --out " + dir.file("out.csv")) == 0);
    CHECK(slurp(dir.file("out.csv")) == "method,shape,num_atoms,n,seed,nmse,time_s,converged\n");
  }

  SUBCASE("parallelism does not change the csv") {
    std::ofstream spec(dir.file("spec.txt"));
    spec << "shape=3,3 atoms=2 n=20 methods=bcg,als reps=2 epsilon=1e-4\n";
    spec << "shape=2,2,2 atoms=1 n=15 methods=bcg reps=2 epsilon=1e-4\n";
    spec.close();
    CHECK(run_cli("bench --spec " + dir.file("spec.txt") + " --out " + dir.file("p1.csv") +
                  " --master-seed 11 --parallelism 1 --no-times") == 0);
    CHECK(run_cli("bench --spec " + dir.file("spec.txt") + " --out " + dir.file("p4.csv") +
                  " --master-seed 11 --parallelism 4 --no-times") == 0);
    CHECK(slurp(dir.file("p1.csv")) == slurp(dir.file("p4.csv")));
  }

  SUBCASE("bad spec exits 1") {
    std::ofstream spec(dir.file("spec.txt"));
    spec << "atoms=2 n=20 methods=bcg\n";  // missing shape
    spec.close();
    CHECK(run_cli("bench --spec " + dir.file("spec.txt") + " --out " + dir.file("out.csv")) == 1);
  }
}
