#include "doctest.h"
#include "tess/costmodel.hpp"
#include "tess/errors.hpp"
#include "tess/presets.hpp"

using namespace tess;

namespace {

ArchDescriptor dense_arch(std::vector<std::uint64_t> n, std::uint64_t steps, std::uint64_t learn_start,
                          std::uint64_t classes) {
  ArchDescriptor a;
  a.input_neurons = n[0];
  for (std::size_t l = 1; l < n.size(); ++l)
    a.layers.push_back({"fc" + std::to_string(l), n[l], n[l - 1], n[l] * n[l - 1]});
  a.time_steps = steps;
  a.learn_start = learn_start;
  a.class_count = classes;
  return a;
}

}  // namespace

TEST_SUITE("costmodel") {

TEST_CASE("memory: L=1, n=(10,10), T=5") {
  const ArchDescriptor a = dense_arch({10, 10}, 5, 0, 2);
  CHECK(mem_cost(a, LearningRule::bptt, true).total == 100);
  CHECK(mem_cost(a, LearningRule::tess, true).total == 40);
  CHECK(mem_cost(a, LearningRule::s_tllr, true).total == 40);
  CHECK(mem_cost(a, LearningRule::tess, false).total == 20);
  CHECK(mem_cost(a, LearningRule::tess, true).bytes() == 160);
}

TEST_CASE("memory: T=2 BPTT equals TESS for equal widths") {
  const ArchDescriptor a = dense_arch({32, 32, 32}, 2, 0, 4);
  CHECK(mem_cost(a, LearningRule::bptt, true).total == mem_cost(a, LearningRule::tess, true).total);
}

TEST_CASE("exact memory counts pre traces over inputs and post traces over outputs") {
  const ArchDescriptor a = dense_arch({64, 128, 2}, 10, 0, 2);
  CHECK(mem_cost(a, LearningRule::tess, true, MemoryAccounting::exact).total == (64 + 128) + (128 + 2));
  CHECK(mem_cost(a, LearningRule::tess, false, MemoryAccounting::exact).total == 64 + 128);
}

TEST_CASE("MACs: L=2, n=(100,100,10), T=6, C=10") {
  const ArchDescriptor a = dense_arch({100, 100, 10}, 6, 0, 10);
  CHECK(mac_cost(a, LearningRule::bptt).total == 66000);
  CHECK(mac_cost(a, LearningRule::tess).total == 13200);
  CHECK(mac_cost(a, LearningRule::s_tllr).total == 66000);
  const CostReport r = mac_cost(a, LearningRule::tess);
  std::uint64_t s = 0;
  for (const CostEntry& e : r.entries) s += e.value;
  CHECK(s == r.total);
}

TEST_CASE("empty learning window costs nothing for local rules") {
  const ArchDescriptor a = dense_arch({100, 100, 10}, 6, 6, 10);
  CHECK(mac_cost(a, LearningRule::tess).total == 0);
  CHECK(mac_cost(a, LearningRule::s_tllr).total == 0);
  CHECK(mac_cost(a, LearningRule::bptt).total == 66000);
}

TEST_CASE("costs weakly increase in T, n, L and C") {
  for (LearningRule rule : {LearningRule::bptt, LearningRule::s_tllr, LearningRule::tess}) {
    const ArchDescriptor base = dense_arch({20, 30, 5}, 4, 1, 5);
    const auto mac = [&](const ArchDescriptor& a) { return mac_cost(a, rule).total; };
    const auto mem = [&](const ArchDescriptor& a) { return mem_cost(a, rule, true).total; };
    for (const ArchDescriptor& bigger :
         {dense_arch({20, 30, 5}, 5, 1, 5), dense_arch({20, 31, 5}, 4, 1, 5), dense_arch({20, 30, 30, 5}, 4, 1, 5),
          dense_arch({20, 30, 5}, 4, 1, 6)}) {
      CHECK(mac(bigger) >= mac(base));
      CHECK(mem(bigger) >= mem(base));
    }
  }
}

TEST_CASE("invalid descriptors") {
  ArchDescriptor a = dense_arch({10, 10}, 5, 6, 2);
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a = dense_arch({10, 10}, 0, 0, 2);
  CHECK_THROWS_AS(a.validate(), ConfigError);
  CHECK_THROWS_AS(parse_rule("sgd"), ConfigError);
}

TEST_CASE("descriptor from a conv stack uses connection counts") {
  const ArchDescriptor a = describe_architecture(make_preset("toy-conv", 4).layers, {1, 16, 16}, 4, 10, 0);
  REQUIRE(a.layers.size() == 3);
  CHECK(a.input_neurons == 256);
  CHECK(a.layers[0].connections == 8 * 16 * 16 * 9);
  CHECK(a.layers[1].connections == 8 * 16 * 16 * 72);
  CHECK(a.layers[2].inputs == 8 * 8 * 8);
  CHECK(a.layers[2].connections == 4 * 512);
}

TEST_CASE("vgg9-paper BPTT MACs by hand") {
  const ArchDescriptor a = describe_architecture(make_preset("vgg9-paper", 10).layers, {2, 48, 48}, 10, 10, 0);
  const std::uint64_t per_step = 48ull * 48 * 64 * 2 * 9 + 48ull * 48 * 128 * 64 * 9 + 24ull * 24 * 256 * 128 * 9 +
                                 24ull * 24 * 256 * 256 * 9 + 12ull * 12 * 512 * 256 * 9 +
                                 12ull * 12 * 512 * 512 * 9 + 6ull * 6 * 512 * 512 * 9 * 2 + 512 * 10;
  CHECK(mac_cost(a, LearningRule::bptt).total == 10 * per_step);
  const std::uint64_t neurons = 48ull * 48 * (64 + 128) + 24 * 24 * 512 + 12 * 12 * 1024 + 6 * 6 * 1024 + 10;
  CHECK(mac_cost(a, LearningRule::tess).total == 10 * 2 * 10 * neurons);
}

TEST_CASE("complexity table") {
  const ArchDescriptor a = dense_arch({10, 20, 5}, 4, 0, 5);
  const auto rows = complexity_table(a);
  REQUIRE(rows.size() == 8);
  CHECK(rows.front().method == "BPTT");
  CHECK(rows.back().method == "TESS");
  CHECK(rows.back().memory_class == "Ln");
  CHECK(rows.back().time_class == "LCn");
  CHECK(rows.back().temporal_local);
  CHECK(rows.back().spatial_local);
  CHECK(rows[3].method == "ETLP");
  CHECK(rows[3].memory_class == "Ln^2");
  CHECK(rows[3].time_class == "LCn");
  CHECK_FALSE(rows[3].executable);
  CHECK(rows.back().time_value == 5.0 * 25);
  CHECK(rows.front().time_value == 4.0 * (200 + 100));
}

}  // TEST_SUITE
