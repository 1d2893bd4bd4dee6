#include <cmath>
#include <sstream>

#include "doctest.h"
#include "gradcheck.hpp"
#include "support.hpp"

#include "dmrl/epsilon.hpp"
#include "dmrl/errors.hpp"
#include "dmrl/nn/checkpoint.hpp"
#include "dmrl/nn/layers.hpp"
#include "dmrl/nn/optim.hpp"

using namespace dmrl;
using namespace dmrl::nn;

namespace {

Mat<double> random_mat(int r, int c, Rng& rng) {
  Mat<double> m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = uniform01(rng) * 2 - 1;
  return m;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("affine examples") {
  Rng rng = make_rng(1, 0);
  const Vec<double> x = random_mat(4, 1, rng);
  CHECK(affine<double>(Mat<double>::Identity(4, 4), Mat<double>::Zero(4, 1), x).isApprox(x));
  Mat<double> c(3, 1);
  c << 1, 2, 3;
  CHECK(affine<double>(Mat<double>::Zero(3, 4), c, x) == Vec<double>(c));
  const auto w = random_mat(3, 4, rng), b = random_mat(3, 1, rng);
  const auto y = affine<double>(w, b, x);
  for (int i = 0; i < 3; ++i) {
    double acc = b(i, 0);
    for (int j = 0; j < 4; ++j) acc += w(i, j) * x(j);
    CHECK(y(i) == doctest::Approx(acc).epsilon(1e-12));
  }
  CHECK_THROWS_AS(affine<double>(w, b, Vec<double>::Zero(5)), ShapeError);
}

TEST_CASE("lstm_step zero cell and shapes") {
  const Mat<double> wx = Mat<double>::Zero(256, 121), wh = Mat<double>::Zero(256, 64),
                    b = Mat<double>::Zero(256, 1);
  Vec<double> h, c;
  lstm_step<double>({wx, wh, b}, Vec<double>::Ones(121), Vec<double>::Zero(64), Vec<double>::Zero(64), h, c);
  CHECK(h.size() == 64);
  CHECK(h.isZero());
  CHECK(c.isZero());
}

TEST_CASE("lstm_step matches a gate-by-gate evaluation") {
  Rng rng = make_rng(2, 0);
  const int D = 3, H = 2;
  const auto wx = random_mat(4 * H, D, rng), wh = random_mat(4 * H, H, rng), b = random_mat(4 * H, 1, rng);
  const Vec<double> x = random_mat(D, 1, rng), h0 = random_mat(H, 1, rng), c0 = random_mat(H, 1, rng);
  Vec<double> h, c;
  lstm_step<double>({wx, wh, b}, x, h0, c0, h, c);
  for (int u = 0; u < H; ++u) {
    auto pre = [&](int gate) {
      double z = b(gate * H + u, 0);
      for (int j = 0; j < D; ++j) z += wx(gate * H + u, j) * x(j);
      for (int j = 0; j < H; ++j) z += wh(gate * H + u, j) * h0(j);
      return z;
    };
    const double ig = sig(pre(0)), fg = sig(pre(1)), gg = std::tanh(pre(2)), og = sig(pre(3));
    const double cc = fg * c0(u) + ig * gg;
    CHECK(c(u) == doctest::Approx(cc).epsilon(1e-12));
    CHECK(h(u) == doctest::Approx(og * std::tanh(cc)).epsilon(1e-12));
    CHECK(std::abs(h(u)) < 1.0);
  }
}

TEST_CASE("clip_gradients") {
  ParamSet<float> g;
  const int i = g.add("w", 1, 3);
  g[i] << 12.5f, -11.0f, 3.0f;
  clip_gradients(g);
  CHECK(g[i](0, 0) == 10.0f);
  CHECK(g[i](0, 1) == -10.0f);
  CHECK(g[i](0, 2) == 3.0f);
  auto again = g;
  clip_gradients(again);
  CHECK(again[i] == g[i]);
}

TEST_CASE("optimizer steps") {
  ParamSet<double> p;
  const int i = p.add("w", 1, 1);
  p[i](0, 0) = 1.0;
  auto g = p.zeros_like();
  g[i](0, 0) = 2.0;
  Optimizer<double> sgd(OptimizerKind::sgd, 5e-4);
  sgd.step(p, g);
  CHECK(p[i](0, 0) == doctest::Approx(0.999).epsilon(1e-12));

  for (auto kind : {OptimizerKind::sgd, OptimizerKind::adam}) {
    ParamSet<double> q = p;
    Optimizer<double> opt(kind, 1e-3);
    opt.step(q, q.zeros_like());
    CHECK(q[i] == p[i]);
  }

  ParamSet<double> a;
  const int j = a.add("w", 2, 2);
  auto ones = a.zeros_like();
  ones[j].setOnes();
  Optimizer<double> adam(OptimizerKind::adam, 1e-3);
  adam.step(a, ones);
  for (Eigen::Index k = 0; k < 4; ++k) CHECK(a[j].data()[k] == doctest::Approx(-1e-3).epsilon(1e-4));
  CHECK_THROWS_AS(Optimizer<double>(OptimizerKind::adam, 0.0), ConfigError);
}

TEST_CASE("epsilon schedule") {
  const EpsilonSchedule e;
  CHECK(e.at(0) == doctest::Approx(0.9));
  CHECK(e.at(1) == doctest::Approx(0.899));
  CHECK(e.at(500) == doctest::Approx(0.4));
  CHECK(e.at(890) == doctest::Approx(0.01));
  CHECK(e.at(1000000) == 0.01);
  const std::vector<float> q{0.0f, 5.0f, 5.0f};
  CHECK(argmax(q) == 1);
}

TEST_CASE("checkpoint round trip and version errors") {
  Checkpoint ck;
  ck.schema_hash = 1234;
  ck.meta["variant"] = "hybrid";
  Rng rng = make_rng(3, 0);
  const int i = ck.tensors.add("a/w", 3, 2);
  ck.tensors[i] = random_mat(3, 2, rng).cast<float>();
  const auto bytes = serialize_checkpoint(ck);
  const auto back = deserialize_checkpoint(bytes, 1234);
  CHECK(back.meta == ck.meta);
  CHECK(back.tensors[0] == ck.tensors[0]);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes, 99), VersionError);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_checkpoint(bad), VersionError);
  auto truncated = bytes;
  truncated.resize(truncated.size() / 2);
  CHECK_THROWS(deserialize_checkpoint(truncated));
}

TEST_CASE("finite-difference gradient check, every entry of tiny networks") {
  for (auto enc : {EncoderKind::lstm, EncoderKind::feedforward, EncoderKind::current_slots}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CAPTURE(static_cast<int>(enc));
      CAPTURE(seed);
      Rng rng = make_rng(100 + seed, 0);
      const auto cfg = dmrl::testing::tiny_config(enc);
      HybridNet<double> net(cfg);
      net.init_uniform(rng);
      std::vector<Episode> eps;
      for (int k = 0; k < 4; ++k) eps.push_back(dmrl::testing::random_episode(cfg, 3, rng));
      std::vector<SegmentRef> batch;
      for (const auto& e : eps) batch.push_back({&e, 0, 3});
      const auto r = dmrl::testing::gradient_check(net, batch, {true, true, 1e-2, 0.9}, 1 << 20, rng);
      CAPTURE(r.worst_tensor);
      CHECK(r.worst < 1e-4);
    }
  }
}

TEST_CASE("l1 subgradient equals l1 * sign(h) on a single step") {
  Rng rng = make_rng(4, 0);
  auto cfg = dmrl::testing::tiny_config(EncoderKind::lstm);
  HybridNet<double> net(cfg);
  net.init_uniform(rng);
  // Zero the heads so only the penalty reaches the tracker.
  for (auto& t : net.online.tensors()) {
    if (!t.name.starts_with("tracker")) t.value.setZero();
  }
  Episode ep = dmrl::testing::random_episode(cfg, 1, rng);
  ep.steps[0].terminal = false;
  ep.steps[0].next_user.assign(cfg.user_acts + 2 * cfg.slots, 0.0f);
  const SegmentRef seg{&ep, 0, 1};
  const double lambda = 0.5;
  auto with = net.online.zeros_like(), without = net.online.zeros_like();
  loss_and_gradients<double>(net, std::span(&seg, 1), nullptr, {true, false, lambda, 0.9}, &with);
  loss_and_gradients<double>(net, std::span(&seg, 1), nullptr, {true, false, 0.0, 0.9}, &without);
  // d/db of lambda*sum|h| through h = o*tanh(c): compare against the
  // analytic chain with the backward pass seeded by lambda*sign(h).
  const auto& p = net.online;
  const int wx = p.find("tracker/wx"), wh = p.find("tracker/wh"), b = p.find("tracker/b");
  nn::LstmCache<double> cache;
  Vec<double> h, c;
  lstm_step<double>({p[wx], p[wh], p[b]}, to_vec<double>(ep.steps[0].obs), Vec<double>::Zero(cfg.hidden),
                    Vec<double>::Zero(cfg.hidden), h, c, &cache);
  Mat<double> dwx = Mat<double>::Zero(p[wx].rows(), p[wx].cols()), dwh = dwx.leftCols(cfg.hidden),
              db = Mat<double>::Zero(p[b].rows(), 1);
  Vec<double> dhp, dcp;
  const Vec<double> seed_grad = (h.array().sign() * lambda).matrix();
  lstm_step_backward<double>({p[wx], p[wh], p[b]}, cache, seed_grad, Vec<double>::Zero(cfg.hidden), dwx, dwh,
                             db, dhp, dcp);
  CHECK(((with[b] - without[b]) - db).cwiseAbs().maxCoeff() < 1e-12);
}
