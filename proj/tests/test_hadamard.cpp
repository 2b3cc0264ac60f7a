#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sp3d/hadamard.hpp"

using namespace sp3d;

TEST_CASE("dense_hadamard base cases") {
  const auto h0 = dense_hadamard(0);
  REQUIRE(h0.rows() == 1);
  CHECK(h0(0, 0) == 1);

  const auto h1 = dense_hadamard(1);
  Eigen::MatrixXi want1(2, 2);
  want1 << 1, 1, 1, -1;
  CHECK(h1 == want1);

  // hand-applied Kronecker step on the order-2 base
  const auto h2 = dense_hadamard(2);
  Eigen::MatrixXi want2(4, 4);
  want2 << 1, 1, 1, 1,
           1, -1, 1, -1,
           1, 1, -1, -1,
           1, -1, -1, 1;
  CHECK(h2 == want2);
}

TEST_CASE("dense_hadamard orthogonality, integer exact") {
  for (int k = 0; k <= 8; ++k) {
    const auto h = dense_hadamard(k);
    const Index n = h.rows();
    CHECK((h.array().abs() == 1).all());
    const Eigen::MatrixXi gram = h * h.transpose();
    CHECK(gram == Eigen::MatrixXi(n * Eigen::MatrixXi::Identity(n, n)));
  }
}

TEST_CASE("dense_hadamard rejects out-of-range orders") {
  CHECK_THROWS_AS(dense_hadamard(-1), SizeError);
  CHECK_THROWS_AS(dense_hadamard(13), SizeError);
}

TEST_CASE("dense_hadamard matches the popcount closed form") {
  const auto h = dense_hadamard(5);
  for (Index i = 0; i < h.rows(); ++i)
    for (Index j = 0; j < h.cols(); ++j) CHECK(h(i, j) == hadamard_sign(i, j));
}

TEST_CASE("fwht frozen examples") {
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(4);
  delta(0) = 1.0;
  CHECK(fwht(delta) == Eigen::VectorXd::Ones(4));

  const double c = 0.37;
  Eigen::VectorXd constant = Eigen::VectorXd::Constant(8, c);
  Eigen::VectorXd want = Eigen::VectorXd::Zero(8);
  want(0) = 8.0 * c;
  CHECK(fwht(constant).isApprox(want, 1e-15));

  Eigen::VectorXd one(1);
  one << 4.2;
  CHECK(fwht(one)(0) == 4.2);
}

TEST_CASE("fwht rejects non power-of-two lengths") {
  CHECK_THROWS_AS(fwht(Eigen::VectorXd::Zero(3)), SizeError);
  CHECK_THROWS_AS(fwht(Eigen::VectorXd::Zero(0)), SizeError);
  CHECK_THROWS_AS(iht(Eigen::VectorXd::Zero(12)), SizeError);
}

TEST_CASE("fwht matches the dense oracle across sizes") {
  std::mt19937_64 rng(7);
  for (Index n = 1; n <= 1024; n *= 2) {
    const auto v = test::random_vector(n, rng);
    const auto want = test::dense_product(v);
    CHECK(test::max_rel_err(fwht(v), want) < 1e-12);
  }
}

TEST_CASE("fwht applied twice scales by the length") {
  std::mt19937_64 rng(11);
  const auto v = test::random_vector(64, rng);
  CHECK(test::max_rel_err(fwht(fwht(v)), Eigen::VectorXd(64.0 * v)) < 1e-13);
}

TEST_CASE("iht inverts fwht and matches the scaled dense oracle") {
  std::mt19937_64 rng(13);
  const auto x = test::random_vector(64, rng);
  CHECK(test::max_rel_err(iht(fwht(x)), x) < 1e-12);

  // inverse identity holds at full pipeline scale
  const auto big = test::random_vector(Index{1} << 18, rng);
  CHECK(test::max_rel_err(iht(fwht(big)), big) < 1e-10);

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(4);
  delta(0) = 1.0;
  CHECK(iht(ones).isApprox(delta, 1e-15));

  const auto v = test::random_vector(8, rng);
  CHECK(test::max_rel_err(iht(v), Eigen::VectorXd(test::dense_product(v) / 8.0)) < 1e-12);
}

TEST_CASE("sensing plan maps marked pixels onto columns 0..M-1") {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 20; ++trial) {
    MarkBits mark(64);
    for (Index n = 0; n < 64; ++n) mark(n) = coin(rng) ? 1 : 0;
    if ((mark != 0).count() == 0) mark(5) = 1;
    const auto plan = MaskedSensingPlan::from_mark(mark);

    CHECK(is_pow2(plan.order));
    CHECK(plan.order >= plan.n_marked);
    CHECK(plan.order < 2 * plan.n_marked + 2);

    Index expected_col = 0;
    for (Index n = 0; n < plan.n_pixels; ++n) {
      if (mark(n)) {
        CHECK(plan.column_of_pixel(n) == expected_col);
        CHECK(plan.pixel_of_column(expected_col) == n);
        ++expected_col;
      } else {
        CHECK(plan.column_of_pixel(n) == -1);
      }
    }
    CHECK(expected_col == plan.n_marked);
  }
}

TEST_CASE("sensing plan rejects empty marks") {
  CHECK_THROWS_AS(MaskedSensingPlan::from_mark(MarkBits()), SizeError);
  CHECK_THROWS_AS(MaskedSensingPlan::from_mark(MarkBits::Zero(16)), SizeError);
}

TEST_CASE("pattern_row frozen examples") {
  // row 0 is the mark itself
  MarkBits mark(6);
  mark << 0, 1, 0, 1, 1, 0;
  const auto plan = MaskedSensingPlan::from_mark(mark);
  CHECK((pattern_row(plan, 0) == mark).all());

  // all four pixels marked, row 1 of zero-shifted H4
  const auto full = MaskedSensingPlan::from_mark(MarkBits::Ones(4));
  MarkBits want_full(4);
  want_full << 1, 0, 1, 0;
  CHECK((pattern_row(full, 1) == want_full).all());

  // mark (0,1,1,0): row 1 of zero-shifted H2 lands in pixels 1 and 2
  MarkBits sparse(4);
  sparse << 0, 1, 1, 0;
  const auto plan2 = MaskedSensingPlan::from_mark(sparse);
  CHECK(plan2.order == 2);
  MarkBits want_sparse(4);
  want_sparse << 0, 1, 0, 0;
  CHECK((pattern_row(plan2, 1) == want_sparse).all());

  CHECK_THROWS_AS(pattern_row(plan2, 2), IndexError);
  CHECK_THROWS_AS(pattern_row(plan2, -1), IndexError);
}

TEST_CASE("pattern_row matches the dense rearrangement rule") {
  std::mt19937_64 rng(23);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 10; ++trial) {
    MarkBits mark(40);
    for (Index n = 0; n < 40; ++n) mark(n) = coin(rng) ? 1 : 0;
    if ((mark != 0).count() == 0) mark(0) = 1;
    const auto plan = MaskedSensingPlan::from_mark(mark);
    for (Index m = 0; m < plan.order; ++m)
      CHECK((pattern_row(plan, m) == test::dense_pattern_row(mark, m)).all());
  }
}

TEST_CASE("pattern_row ones count follows the Hadamard row") {
  MarkBits mark(32);
  mark.setZero();
  for (Index n = 3; n < 32; n += 3) mark(n) = 1;  // M = 10, L = 16
  const auto plan = MaskedSensingPlan::from_mark(mark);
  const auto h = dense_hadamard(test::exact_log2(plan.order));
  for (Index m = 0; m < plan.order; ++m) {
    Index want = 0;
    for (Index c = 0; c < plan.n_marked; ++c) want += h(m, c) > 0 ? 1 : 0;
    CHECK((pattern_row(plan, m) != 0).count() == want);
  }
  CHECK((pattern_row(plan, 0) != 0).count() == plan.n_marked);
}

TEST_CASE("debias frozen examples") {
  const double s = 3.25;
  Eigen::VectorXd y(4);
  y << s, s / 2, s / 2, s / 2;
  Eigen::VectorXd want(4);
  want << s, 0, 0, 0;
  CHECK(debias(y) == want);

  CHECK(debias(Eigen::VectorXd::Zero(8)) == Eigen::VectorXd::Zero(8));
  CHECK_THROWS_AS(debias(Eigen::VectorXd()), SizeError);
}

TEST_CASE("debias turns zero-shifted measurements into bipolar ones") {
  std::mt19937_64 rng(29);
  const auto h = dense_hadamard(3);
  const auto h01 = test::zero_shifted(h);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
  for (Index i = 0; i < 5; ++i) x(i) = test::random_vector(1, rng, 0.0, 2.0)(0);
  const Eigen::VectorXd y_raw = h01 * x;
  const Eigen::VectorXd want = h.cast<double>() * x;
  CHECK(test::max_rel_err(debias(y_raw), want) < 1e-12);
}

TEST_CASE("masked forward model round trip recovers marked values") {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.35);
  for (int trial = 0; trial < 8; ++trial) {
    MarkBits mark(72);
    for (Index n = 0; n < 72; ++n) mark(n) = coin(rng) ? 1 : 0;
    if ((mark != 0).count() == 0) mark(7) = 1;
    const auto plan = MaskedSensingPlan::from_mark(mark);

    Eigen::VectorXd scene = test::random_vector(72, rng, 0.0, 3.0);
    Eigen::VectorXd y_raw(plan.order);
    for (Index m = 0; m < plan.order; ++m) {
      const auto row = pattern_row(plan, m);
      double acc = 0.0;
      for (Index n = 0; n < 72; ++n) acc += row(n) ? scene(n) : 0.0;
      y_raw(m) = acc;
    }
    const Eigen::VectorXd recovered = iht(debias(y_raw));
    for (Index n = 0; n < 72; ++n)
      if (mark(n)) CHECK(recovered(plan.column_of_pixel(n)) == doctest::Approx(scene(n)).epsilon(1e-9));
    for (Index c = plan.n_marked; c < plan.order; ++c)
      CHECK(std::abs(recovered(c)) < 1e-9);
  }
}
