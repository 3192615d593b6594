#include "longae/loss.hpp"

#include <doctest.h>

#include <cmath>

using namespace longae;

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Central finite differences on the logits.
template <typename LossFn>
VectorXd fd_logit_grad(LossFn&& loss_of, VectorXd logits, double h = 1e-6) {
  VectorXd grad(logits.size());
  for (Index k = 0; k < logits.size(); ++k) {
    const double keep = logits[k];
    logits[k] = keep + h;
    const double up = loss_of(logits);
    logits[k] = keep - h;
    const double down = loss_of(logits);
    logits[k] = keep;
    grad[k] = (up - down) / (2 * h);
  }
  return grad;
}

}  // namespace

TEST_SUITE_BEGIN("loss");

TEST_CASE("compute_zeta formula, limits and errors") {
  // 10 nodes: 2 present and 8 absent off-diagonal dyads is hard to stage
  // exactly, so use a direct 5-node construction: C(5,2)=10 dyads.
  MaskedAdjacency adj(5);
  adj.set(0, 1, LinkState::present);
  adj.set(2, 3, LinkState::present);
  CHECK(compute_zeta(adj) == doctest::Approx(0.75));  // 1 - 2/8

  MaskedAdjacency none(4);
  CHECK(compute_zeta(none) == 1.0);  // 0 present

  // present == absent: 4 nodes, 6 dyads -> 3 present, 3 absent.
  MaskedAdjacency balanced(4);
  balanced.set(0, 1, LinkState::present);
  balanced.set(1, 2, LinkState::present);
  balanced.set(2, 3, LinkState::present);
  CHECK(compute_zeta(balanced) == 0.0);

  // More present than absent clamps to 0.
  MaskedAdjacency dense(3);
  dense.set(0, 1, LinkState::present);
  dense.set(0, 2, LinkState::present);
  CHECK(compute_zeta(dense) == 0.0);

  // Row scope.
  MaskedAdjacency rowed(4);
  rowed.set(0, 1, LinkState::present);
  CHECK(compute_zeta(rowed, Index(0)) == doctest::Approx(0.5));  // 1 - 1/2

  // All off-diagonal entries of the row unknown -> no observed absent.
  MaskedAdjacency blank(2);
  blank.set(0, 1, LinkState::unknown);
  CHECK_THROWS_AS(compute_zeta(blank, Index(0)), std::invalid_argument);
}

TEST_CASE("mbce frozen hand values") {
  // targets [1, 0, masked], logits [0, 0, 5], zeta 0.5:
  // (0.5 ln2 + ln2) / 2 = 0.75 ln2.
  VectorXd targets(3), logits(3), mask(3);
  targets << 1, 0, 1;
  logits << 0, 0, 5;
  mask << 1, 1, 0;
  LossConfig cfg;
  cfg.zeta = 0.5;
  const auto r = mbce<double>(targets, logits, mask, cfg);
  CHECK(r.value == doctest::Approx(0.75 * kLn2).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(0.5198603854199589).epsilon(1e-9));
  // grad = mask .* (zeta t (p-1) + (1-t) p) / sum(mask), p = 0.5 at logit 0.
  CHECK(r.d_logits[0] == doctest::Approx(0.5 * (0.5 - 1.0) / 2.0));
  CHECK(r.d_logits[1] == doctest::Approx(0.5 / 2.0));
  CHECK(r.d_logits[2] == 0.0);
}

TEST_CASE("mbce with zeta 1 reduces to plain masked mean cross-entropy") {
  VectorXd targets(2), logits = VectorXd::Zero(2), mask = VectorXd::Ones(2);
  targets << 1, 0;
  LossConfig cfg;
  const auto r = mbce<double>(targets, logits, mask, cfg);
  CHECK(r.value == doctest::Approx(kLn2).epsilon(1e-12));

  // Equality with the direct unweighted form at machine precision.
  Rng rng(4);
  VectorXd t(6), l(6), m(6);
  for (Index i = 0; i < 6; ++i) {
    t[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    l[i] = rng.uniform() * 6 - 3;
    m[i] = i % 3 == 0 ? 0.0 : 1.0;
  }
  const auto balanced = mbce<double>(t, l, m, cfg);
  double direct = 0;
  for (Index i = 0; i < 6; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-l[i]));
    direct += m[i] * (-(t[i] * std::log(p)) - (1 - t[i]) * std::log(1 - p));
  }
  direct /= m.sum();
  CHECK(balanced.value == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("mbce masked positions contribute exactly zero") {
  VectorXd targets(3), logits(3), mask(3);
  targets << 1, 0, 1;
  logits << 0.3, -0.2, 5;
  mask << 1, 1, 0;
  LossConfig cfg;
  cfg.zeta = 0.7;
  const auto base = mbce<double>(targets, logits, mask, cfg);

  VectorXd poked_targets = targets, poked_logits = logits;
  poked_targets[2] = 0;
  poked_logits[2] = -123.0;
  const auto poked = mbce<double>(poked_targets, poked_logits, mask, cfg);
  CHECK(base.value == poked.value);
  CHECK(base.d_logits == poked.d_logits);
  CHECK(poked.d_logits[2] == 0.0);
}

TEST_CASE("mbce errors") {
  VectorXd v3 = VectorXd::Zero(3), v2 = VectorXd::Zero(2);
  LossConfig cfg;
  CHECK_THROWS_AS(mbce<double>(v3, v2, v3, cfg), std::invalid_argument);
  CHECK_THROWS_AS(mbce<double>(v3, v3, VectorXd::Zero(3), cfg), std::invalid_argument);
}

TEST_CASE("mbce gradient matches finite differences") {
  Rng rng(31);
  VectorXd targets(8), logits(8), mask(8);
  for (Index i = 0; i < 8; ++i) {
    targets[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    logits[i] = rng.uniform() * 4 - 2;
    mask[i] = rng.uniform() < 0.25 ? 0.0 : 1.0;
  }
  mask[0] = 1.0;
  LossConfig cfg;
  cfg.zeta = 0.6;
  const auto r = mbce<double>(targets, logits, mask, cfg);
  const VectorXd fd = fd_logit_grad(
      [&](const VectorXd& l) { return mbce<double>(targets, l, mask, cfg).value; }, logits);
  for (Index i = 0; i < 8; ++i) {
    CHECK(r.d_logits[i] == doctest::Approx(fd[i]).epsilon(1e-6));
  }
}

TEST_CASE("mbce decreases monotonically under gradient steps on a singleton") {
  VectorXd targets(2), mask = VectorXd::Ones(2);
  targets << 1, 0;
  VectorXd logits(2);
  logits << -1.0, 1.0;
  LossConfig cfg;
  cfg.zeta = 0.8;
  double prev = mbce<double>(targets, logits, mask, cfg).value;
  CHECK(prev > 0.0);
  for (int step = 0; step < 50; ++step) {
    const auto r = mbce<double>(targets, logits, mask, cfg);
    logits -= 1.0 * r.d_logits;
    const double now = mbce<double>(targets, logits, mask, cfg).value;
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("alpha_mbce reduces to mbce when there are no features") {
  AugmentedRow<double> row;
  row.a_part.resize(3);
  row.a_part << 1, 0, 0;
  row.mask = VectorXd::Ones(3);
  row.x_part.resize(0);
  VectorXd a_logits(3);
  a_logits << 0.5, -0.7, 0.1;
  VectorXd x_logits(0);
  LossConfig cfg;
  cfg.zeta = 0.4;
  const auto a = alpha_mbce<double>(row, a_logits, x_logits, cfg);
  const auto plain = mbce<double>(row.a_part, a_logits, row.mask, cfg);
  CHECK(a.value == plain.value);
  CHECK(a.d_a_logits == plain.d_logits);
  CHECK(a.d_x_logits.size() == 0);
}

TEST_CASE("alpha_mbce feature term frozen values") {
  AugmentedRow<double> row;
  row.a_part.resize(1);
  row.a_part << 1;
  row.mask = VectorXd::Ones(1);
  row.x_part.resize(1);
  VectorXd a_logits = VectorXd::Zero(1);
  VectorXd x_logits = VectorXd::Zero(1);
  LossConfig cfg;
  cfg.zeta = 1.0;

  // Hard target: sigma(0) against x=1 adds ln 2.
  row.x_part << 1;
  const auto hard = alpha_mbce<double>(row, a_logits, x_logits, cfg);
  CHECK(hard.value == doctest::Approx(kLn2 + kLn2).epsilon(1e-12));

  // Soft target 0.5: -0.5 ln 0.5 - 0.5 ln 0.5 = ln 2 as well.
  row.x_part << 0.5;
  const auto soft = alpha_mbce<double>(row, a_logits, x_logits, cfg);
  CHECK(soft.value == doctest::Approx(kLn2 + kLn2).epsilon(1e-12));
  CHECK(soft.d_x_logits[0] == doctest::Approx(0.0));  // p - x = 0.5 - 0.5
}

TEST_CASE("alpha_mbce averages the feature term over F by default") {
  AugmentedRow<double> row;
  row.a_part.resize(1);
  row.a_part << 1;
  row.mask = VectorXd::Ones(1);
  row.x_part = VectorXd::Constant(4, 1.0);
  VectorXd a_logits = VectorXd::Zero(1);
  VectorXd x_logits = VectorXd::Zero(4);
  LossConfig cfg;
  const auto averaged = alpha_mbce<double>(row, a_logits, x_logits, cfg);
  CHECK(averaged.value == doctest::Approx(2 * kLn2).epsilon(1e-12));
  cfg.average_feature_ce = false;
  const auto summed = alpha_mbce<double>(row, a_logits, x_logits, cfg);
  CHECK(summed.value == doctest::Approx(5 * kLn2).epsilon(1e-12));
}

TEST_CASE("alpha_mbce gradient matches finite differences on both slices") {
  Rng rng(77);
  AugmentedRow<double> row;
  row.a_part.resize(5);
  row.mask.resize(5);
  row.x_part.resize(3);
  for (Index i = 0; i < 5; ++i) {
    row.a_part[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    row.mask[i] = rng.uniform() < 0.3 ? 0.0 : 1.0;
  }
  row.mask[0] = 1;
  for (Index i = 0; i < 3; ++i) row.x_part[i] = rng.uniform();
  VectorXd a_logits(5), x_logits(3);
  for (Index i = 0; i < 5; ++i) a_logits[i] = rng.uniform() * 4 - 2;
  for (Index i = 0; i < 3; ++i) x_logits[i] = rng.uniform() * 4 - 2;
  LossConfig cfg;
  cfg.zeta = 0.65;

  const auto r = alpha_mbce<double>(row, a_logits, x_logits, cfg);
  const VectorXd fd_a = fd_logit_grad(
      [&](const VectorXd& l) { return alpha_mbce<double>(row, l, x_logits, cfg).value; },
      a_logits);
  const VectorXd fd_x = fd_logit_grad(
      [&](const VectorXd& l) { return alpha_mbce<double>(row, a_logits, l, cfg).value; },
      x_logits);
  for (Index i = 0; i < 5; ++i) CHECK(r.d_a_logits[i] == doctest::Approx(fd_a[i]).epsilon(1e-6));
  for (Index i = 0; i < 3; ++i) CHECK(r.d_x_logits[i] == doctest::Approx(fd_x[i]).epsilon(1e-6));
}

TEST_CASE("multitask loss equals mbce for unlabeled nodes") {
  Rng rng(9);
  VectorXd targets(4), logits(4), mask = VectorXd::Ones(4), class_logits(3);
  for (Index i = 0; i < 4; ++i) {
    targets[i] = rng.uniform() < 0.5 ? 1 : 0;
    logits[i] = rng.uniform() * 2 - 1;
  }
  for (Index i = 0; i < 3; ++i) class_logits[i] = rng.uniform();
  LossConfig cfg;
  cfg.zeta = 0.5;
  const auto mt = multitask_loss<double>(targets, logits, mask, std::nullopt, class_logits, cfg);
  const auto plain = mbce<double>(targets, logits, mask, cfg);
  CHECK(mt.value == plain.value);
  CHECK(mt.d_a_logits == plain.d_logits);
  CHECK(mt.d_class_logits == VectorXd::Zero(3));
}

TEST_CASE("multitask uniform classifier adds ln C") {
  VectorXd targets(2), logits = VectorXd::Zero(2), mask = VectorXd::Ones(2);
  targets << 1, 0;
  const VectorXd class_logits = VectorXd::Zero(7);
  LossConfig cfg;
  const auto mt = multitask_loss<double>(targets, logits, mask, Index(3), class_logits, cfg);
  const auto plain = mbce<double>(targets, logits, mask, cfg);
  CHECK(mt.value - plain.value == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(mt.value - plain.value == doctest::Approx(1.9459101490553132).epsilon(1e-9));
  // Gradient: softmax - onehot.
  for (Index c = 0; c < 7; ++c) {
    const double expect = (c == 3 ? 1.0 / 7.0 - 1.0 : 1.0 / 7.0);
    CHECK(mt.d_class_logits[c] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("multitask equals independently computed mbce plus cross-entropy") {
  Rng rng(21);
  VectorXd targets(5), logits(5), mask(5), class_logits(3);
  for (Index i = 0; i < 5; ++i) {
    targets[i] = rng.uniform() < 0.5 ? 1 : 0;
    logits[i] = rng.uniform() * 4 - 2;
    mask[i] = rng.uniform() < 0.2 ? 0 : 1;
  }
  mask[1] = 1;
  for (Index i = 0; i < 3; ++i) class_logits[i] = rng.uniform() * 3 - 1.5;
  LossConfig cfg;
  cfg.zeta = 0.3;
  const Index label = 2;

  const auto mt = multitask_loss<double>(targets, logits, mask, label, class_logits, cfg);
  const auto plain = mbce<double>(targets, logits, mask, cfg);
  double norm = 0;
  for (Index c = 0; c < 3; ++c) norm += std::exp(class_logits[c]);
  const double ce = -std::log(std::exp(class_logits[label]) / norm);
  CHECK(mt.value == doctest::Approx(plain.value + ce).epsilon(1e-12));

  const VectorXd fd = fd_logit_grad(
      [&](const VectorXd& cl) {
        return multitask_loss<double>(targets, logits, mask, label, cl, cfg).value;
      },
      class_logits);
  for (Index c = 0; c < 3; ++c) {
    CHECK(mt.d_class_logits[c] == doctest::Approx(fd[c]).epsilon(1e-6));
  }

  CHECK_THROWS_AS(
      multitask_loss<double>(targets, logits, mask, Index(3), class_logits, cfg),
      std::out_of_range);
}

TEST_CASE("losses are non-negative on random inputs") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd targets(6), logits(6), mask(6);
    for (Index i = 0; i < 6; ++i) {
      targets[i] = rng.uniform() < 0.5 ? 1 : 0;
      logits[i] = rng.uniform() * 10 - 5;
      mask[i] = rng.uniform() < 0.3 ? 0 : 1;
    }
    mask[0] = 1;
    LossConfig cfg;
    cfg.zeta = rng.uniform();
    CHECK(mbce<double>(targets, logits, mask, cfg).value >= 0.0);
  }
}

TEST_SUITE_END();
