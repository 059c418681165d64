#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tess/checkpoint.hpp"
#include "tess/errors.hpp"
#include "tess/presets.hpp"
#include "tess/trainer.hpp"

using namespace tess;

namespace {

Network small_net(std::uint64_t seed) {
  NetworkOptions o;
  o.class_count = 2;
  return Network::build(make_preset("toy-conv", 2).layers, {1, 4, 4}, o, seed);
}

Checkpoint sample_checkpoint() {
  const Network net = small_net(3);
  NetworkOptimizer opt(net);
  std::mt19937_64 rng(1);
  for (auto& s : opt.states()) {
    if (s.m.empty()) continue;
    s.m = testing::random_tensor(s.m.shape(), rng);
    s.v = testing::random_tensor(s.v.shape(), rng, 0, 1);
    s.step = 42;
  }
  return make_checkpoint(net, opt.states(), 2.5e-4, 7, "rng state text");
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("round trip is exact") {
  const Checkpoint c = sample_checkpoint();
  REQUIRE(c.weights.size() == 3);
  const Checkpoint back = decode_checkpoint(encode_checkpoint(c));
  CHECK(back.epoch == 7);
  CHECK(back.learning_rate == 2.5e-4);
  CHECK(back.rng_state == "rng state text");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.weights[i] == c.weights[i]);
    CHECK(back.moments[i].m == c.moments[i].m);
    CHECK(back.moments[i].v == c.moments[i].v);
    CHECK(back.moments[i].step == 42);
  }
}

TEST_CASE("header layout") {
  const auto bytes = encode_checkpoint(sample_checkpoint());
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "TESSCKPT");
  CHECK(bytes[8] == 1);
  CHECK(bytes[12] == 3);
  CHECK(bytes[32] == 4);  // first tensor rank: conv kernel
}

TEST_CASE("corruption is reported with offsets") {
  auto bytes = encode_checkpoint(sample_checkpoint());
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_checkpoint(bad), doctest::Contains("offset 0"), FormatError);
  bad = bytes;
  bad[8] = 9;
  CHECK_THROWS_WITH_AS(decode_checkpoint(bad), doctest::Contains("offset 8"), FormatError);
  bad = bytes;
  bad.push_back(0);
  try {
    decode_checkpoint(bad);
    FAIL("trailing byte accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == bytes.size());
  }
  bad = bytes;
  bad.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_checkpoint(bad), FormatError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/tess.ckpt"), FormatError);
}

TEST_CASE("restore checks shapes") {
  const Checkpoint c = sample_checkpoint();
  Network net = small_net(99);
  restore_checkpoint(c, net);
  CHECK(net.layer(0).weights == c.weights[0]);
  CHECK(net.layer(3).weights == c.weights[2]);

  NetworkOptions o;
  o.class_count = 2;
  Network other = Network::build(make_preset("toy-dense", 2).layers, {16}, o, 1);
  CHECK_THROWS_AS(restore_checkpoint(c, other), ShapeError);
}

}  // TEST_SUITE
