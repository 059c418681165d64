#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tess/errors.hpp"
#include "tess/lif.hpp"
#include "tess/traces.hpp"

using namespace tess;

TEST_SUITE("traces") {

TEST_CASE("update_q examples") {
  const TraceParams p;
  TraceState s = TraceState::zeros({2}, {1}, p);
  s = update_q(s, Tensor::vector({1, 0}), p);
  CHECK(s.q == Tensor::vector({1, 0}));
  s = update_q(s, Tensor::vector({1, 1}), p);
  CHECK(s.q == Tensor::vector({1.5, 1}));
  CHECK_THROWS_AS(update_q(s, Tensor({3}), p), ShapeError);
}

TEST_CASE("constant spike train converges geometrically") {
  const TraceParams p;
  TraceState s = TraceState::zeros({1}, {1}, p);
  for (int k = 1; k <= 12; ++k) {
    s = update_q(s, Tensor::vector({1}), p);
    CHECK(s.q[0] == doctest::Approx((1 - std::pow(0.5, k)) / (1 - 0.5)));
  }
}

TEST_CASE("update_h examples") {
  const TraceParams p;
  TraceState s = TraceState::zeros({1}, {1}, p);
  s = update_h(s, Tensor::vector({0}), p);
  CHECK(s.h[0] == 0.0);
  s.h = Tensor::vector({0.3});
  s = update_h(s, Tensor::vector({0.15}), p);
  CHECK(s.h[0] == doctest::Approx(0.21));
}

TEST_CASE("alpha_post = 0 never allocates h") {
  TraceParams p;
  p.alpha_post = 0;
  TraceState s = TraceState::zeros({4}, {3}, p);
  CHECK(s.h.size() == 0);
  CHECK(s.scalar_count() == 4);
  s = update_h(s, Tensor::vector({0.3, 0.2, 0.1}), p);
  CHECK(s.h.size() == 0);
  const FactorPair e = eligibility_post(s.h, Tensor::vector({1, 1, 1, 1}), p);
  CHECK(e.post.size() == 0);
  CHECK(e.materialize().size() == 0);
  CHECK(TraceState::zeros({4}, {3}, TraceParams{}).scalar_count() == 7);
}

TEST_CASE("eligibility factor pairs") {
  TraceParams p;
  CHECK(eligibility_pre(Tensor({2}), Tensor::vector({1, 2}), p).materialize() == Tensor({2, 2}));
  CHECK(eligibility_pre(Tensor::vector({0.3}), Tensor::vector({1.5}), p).materialize()[0] == doctest::Approx(0.45));
  CHECK(eligibility_post(Tensor::vector({0.21}), Tensor({1}), p).materialize()[0] == 0.0);
  const Tensor plus = eligibility_post(Tensor::vector({0.21}), Tensor::vector({1}), p).materialize();
  CHECK(plus[0] == doctest::Approx(0.21));
  p.alpha_post = -1;
  CHECK(eligibility_post(Tensor::vector({0.21}), Tensor::vector({1}), p).materialize()[0] == -plus[0]);
}

TEST_CASE("parameter validation") {
  TraceParams p;
  p.lambda_pre = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = TraceParams{};
  p.alpha_post = 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("beta = 0 general eligibility equals the instantaneous product") {
  std::mt19937_64 rng(9);
  const TraceParams p;
  const LifParams lif;
  oracle::GeneralTrace general{0.0, {}};
  TraceState s = TraceState::zeros({5}, {4}, p);
  for (int t = 0; t < 10; ++t) {
    const Tensor x = testing::random_binary({5}, rng);
    const Tensor u = testing::random_tensor({4}, rng, -0.5, 1.5);
    s = update_q(s, x, p);
    general.step(testing::to_vec(psi(u, lif)), testing::to_vec(s.q));
    const Tensor e = eligibility_pre(psi(u, lif), s.q, p).materialize();
    CHECK(testing::max_abs_diff(testing::to_mat(e), general.e) < 1e-12);
  }
  // With beta > 0 the general trace keeps history and no longer matches.
  oracle::GeneralTrace decaying{0.5, {}};
  decaying.step({1.0}, {1.0});
  decaying.step({1.0}, {1.0});
  CHECK(decaying.e[0][0] == doctest::Approx(1.5));
}

}  // TEST_SUITE
