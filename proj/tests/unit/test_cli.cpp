#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tess/errors.hpp"
#include "tess_cli/commands.hpp"
#include "tess_cli/config.hpp"
#include "tess_cli/dataset_spec.hpp"

using namespace tess;
using namespace tess::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("tess_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults carry the documented hyperparameters") {
  const RunConfig c;
  CHECK(c.get("optim.lr") == "0.001");
  CHECK(c.get("trace.lambda_pre") == "0.5");
  CHECK(c.get("trace.lambda_post") == "0.2");
  CHECK(c.get("lif.gamma") == "0.5");
  CHECK(c.get("lif.v_th") == "0.6");
  CHECK(c.get("sched.patience") == "5");
  CHECK(c.get("learn.mode") == "per-sequence");
  CHECK(c.get("train.threads") == "1");
}

TEST_CASE("serialization round-trips to a normalized form") {
  RunConfig c;
  apply_override(c, "trace.alpha_post=-1");
  apply_override(c, "optim.lr = 0.0005");
  apply_override(c, "model.layers=dense:32,dense:C");
  const std::string text = c.serialize();
  const RunConfig back = parse_config(text);
  CHECK(back.serialize() == text);
  CHECK(back.trace.alpha_post == -1);
  CHECK(parse_config("  optim.lr=5e-4   # comment\n\n").get("optim.lr") == "5e-04");
}

TEST_CASE("errors name the line") {
  CHECK_THROWS_WITH_AS(parse_config("seed = 1\nbogus.key = 2\n"), doctest::Contains("config line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("seed = 1\n\nlif.gamma = fast\n"), doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("just words\n"), doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("learn.mode = sometimes\n"), ConfigError);
}

TEST_CASE("precedence: defaults < file < TESS_SEED < command line") {
  const auto dir = scratch("precedence");
  {
    std::ofstream f(dir / "c.ini");
    f << "seed = 11\ntrain.epochs = 0\nout.dir = " << (dir / "from_file").string() << "\ndata.source = synth:2x8x2:0.05:20\n";
  }
  const std::string cfg = (dir / "c.ini").string();
  auto seed_in = [&](const std::string& sub) { return parse_config(slurp(dir / sub / "config.resolved.ini")).seed; };

  ::unsetenv("TESS_SEED");
  REQUIRE(run({"train", "--config", cfg}) == kExitOk);
  CHECK(seed_in("from_file") == 11);

  REQUIRE(run({"train", "--config", cfg, "--out", (dir / "flag").string()}) == kExitOk);
  CHECK(std::filesystem::exists(dir / "flag" / "metrics.csv"));

  ::setenv("TESS_SEED", "23", 1);
  REQUIRE(run({"train", "--config", cfg, "--out", (dir / "env").string()}) == kExitOk);
  CHECK(seed_in("env") == 23);
  REQUIRE(run({"train", "--config", cfg, "--out", (dir / "cli").string(), "--seed", "5"}) == kExitOk);
  CHECK(seed_in("cli") == 5);
  REQUIRE(run({"train", "--config", cfg, "--out", (dir / "set").string(), "--set", "seed=6"}) == kExitOk);
  CHECK(seed_in("set") == 6);
  ::unsetenv("TESS_SEED");

  REQUIRE(run({"train", "--out", (dir / "defaults").string(), "--epochs", "0", "--dataset", "synth:2x8x2:0.05:20"}) ==
          kExitOk);
  const RunConfig d = parse_config(slurp(dir / "defaults" / "config.resolved.ini"));
  CHECK(d.seed == RunConfig{}.seed);
  CHECK(d.adam.lr == RunConfig{}.adam.lr);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run({"train", "--set", "nope=1"}) == kExitConfig);
  CHECK(run({"train", "--dataset", "evf:" + (dir / "missing.evf").string(), "--out", dir.string()}) == kExitData);
  CHECK(run({"frobnicate"}) == kExitConfig);
  {
    std::ofstream f(dir / "garbage.bin");
    f << "not a checkpoint";
  }
  CHECK(run({"eval", "--checkpoint", (dir / "garbage.bin").string(), "--config", "/dev/null"}) == kExitData);
  CHECK(run({"train", "--dataset", "synth:2x8x2:0.05:20", "--epochs", "1", "--out", dir.string(), "--set",
             "optim.lr=inf"}) == kExitNumeric);
}

TEST_CASE("epochs 0 writes an untrained checkpoint and chance-level metrics") {
  const auto dir = scratch("zero");
  REQUIRE(run({"train", "--epochs", "0", "--out", dir.string()}) == kExitOk);
  CHECK(std::filesystem::exists(dir / "checkpoint_final.bin"));
  CHECK(std::filesystem::exists(dir / "checkpoint_best.bin"));
  const std::string csv = slurp(dir / "metrics.csv");
  CHECK(csv.rfind("epoch,split,loss,accuracy,lr,wall_seconds,lsg_macs,trace_scalars\n", 0) == 0);
  std::istringstream lines(csv);
  std::string header, train_row, cell;
  std::getline(lines, header);
  std::getline(lines, train_row);
  CHECK(train_row.rfind("0,train,", 0) == 0);
  std::istringstream cells(train_row);
  for (int i = 0; i < 4; ++i) std::getline(cells, cell, ',');
  const double acc = std::stod(cell);
  CHECK(acc > 0.3);
  CHECK(acc < 0.7);
}

TEST_CASE("eval reproduces the logged training accuracy") {
  const auto dir = scratch("eval");
  REQUIRE(run({"train", "--epochs", "2", "--out", dir.string(), "--dataset", "synth:2x16x5:0.2:200"}) == kExitOk);
  const std::string csv = slurp(dir / "metrics.csv");
  const auto row = csv.find("\n2,train,");
  REQUIRE(row != std::string::npos);
  std::istringstream fields(csv.substr(row + 1));
  std::string cell;
  std::vector<std::string> cells;
  for (int i = 0; i < 4 && std::getline(fields, cell, ','); ++i) cells.push_back(cell);
  std::string out;
  REQUIRE(run({"eval", "--checkpoint", (dir / "checkpoint_final.bin").string(), "--split", "train"}, &out) == kExitOk);
  CHECK(out.find("accuracy=" + cells[3] + "\n") != std::string::npos);
  CHECK(out.find("loss=" + cells[2] + " ") != std::string::npos);
}

TEST_CASE("dump --basis prints the square-wave rows") {
  std::string out;
  REQUIRE(run({"dump", "--basis", "C=2,n=8"}, &out) == kExitOk);
  CHECK(out == "+1 +1 +1 +1 -1 -1 -1 -1\n+1 +1 -1 -1 +1 +1 -1 -1\n");
  CHECK(run({"dump", "--basis", "C=9,n=4"}) == kExitConfig);
}

TEST_CASE("dump --traces writes t,layer,tensor,index,value rows") {
  std::string out;
  REQUIRE(run({"dump", "--traces", "--dataset", "synth:2x4x3:0:20", "--set", "model.layers=dense:3,dense:C"}, &out) ==
          kExitOk);
  std::istringstream lines(out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,layer,tensor,index,value");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  // per step: layer 0 u,o,h (3 each) + q (4); layer 1 u,o,h (2 each) + q (3)
  CHECK(rows == 3 * (3 * 3 + 4 + 2 * 3 + 3));
}

TEST_CASE("cost report totals equal the formulas") {
  std::string out;
  REQUIRE(run({"cost", "--preset", "vgg9-paper", "--T", "10", "--C", "10", "--rule", "tess", "--format", "csv"}, &out) ==
          kExitOk);
  const auto total = out.find("tess,total,");
  REQUIRE(total != std::string::npos);
  std::istringstream row(out.substr(total));
  std::vector<std::string> cells;
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(cell);
  // 2 * C * T * sum of LIF neurons
  const std::uint64_t neurons = 48ull * 48 * (64 + 128) + 24 * 24 * 512 + 12 * 12 * 1024 + 6 * 6 * 1024 + 10;
  CHECK(std::stoull(cells[4]) == 2 * 10 * 10 * neurons);
  CHECK(std::stoull(cells[5]) == 2 * (neurons + 2 * 48 * 48));
  REQUIRE(run({"cost", "--preset", "toy-dense", "--input", "64", "--C", "2", "--table"}, &out) == kExitOk);
  CHECK(out.find("ETLP") != std::string::npos);
  CHECK(run({"cost", "--rule", "sgd"}) == kExitConfig);
}

TEST_CASE("layer lists and dataset specs") {
  const auto specs = parse_layer_list("conv:4:3:2:1, avgpool, dense:C", 5);
  REQUIRE(specs.size() == 3);
  CHECK(specs[0].stride == 2);
  CHECK(specs[1].pool == 2);
  CHECK(specs[2].out_features == 5);
  CHECK_THROWS_AS(parse_layer_list("mlp:3", 2), ConfigError);
  const DatasetSplits s = load_dataset("synth2d:3x6x6x2:0.1:50", 1);
  CHECK(s.train.frame_shape == Shape{1, 6, 6});
  CHECK(s.train.class_count == 3);
  CHECK_THROWS_AS(load_dataset("synth:2x8", 1), ConfigError);
  CHECK_THROWS_AS(load_dataset("imagenet", 1), ConfigError);
}

}  // TEST_SUITE
