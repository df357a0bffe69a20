#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bcs/channel.hpp"
#include "bcs/ldpc_matrix.hpp"

using namespace bcs;

TEST_CASE("bernoulli signal statistics") {
  const std::size_t m = 1u << 14;
  const double rho = 100.0 / m;

  // mean weight over many draws within 3 standard errors of rho*M
  const int draws = 10000;
  double total = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto x = sample_bernoulli_signal(m, rho, 1000 + d);
    for (const auto b : x) total += b;
  }
  const double mean_weight = total / draws;
  const double se = std::sqrt(m * rho * (1 - rho) / draws);
  CHECK(std::abs(mean_weight - rho * m) <= 3 * se);

  // deterministic given seed
  CHECK(sample_bernoulli_signal(m, rho, 7) == sample_bernoulli_signal(m, rho, 7));
  CHECK(sample_bernoulli_signal(m, rho, 7) != sample_bernoulli_signal(m, rho, 8));
  CHECK_THROWS_AS(sample_bernoulli_signal(4, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_bernoulli_signal(4, 1.0, 0), std::invalid_argument);
}

TEST_CASE("bernoulli signal is symmetric at rho one half") {
  // all four length-2 patterns equally likely
  int counts[4] = {0, 0, 0, 0};
  const int draws = 40000;
  for (int d = 0; d < draws; ++d) {
    const auto x = sample_bernoulli_signal(2, 0.5, 5000 + d);
    counts[x[0] * 2 + x[1]]++;
  }
  for (const int c : counts)
    CHECK(std::abs(c - draws / 4.0) <= 4 * std::sqrt(draws * 0.25 * 0.75));
}

TEST_CASE("measure matches the dense reference and is exact when noiseless") {
  const auto a = SparseBinaryMatrix::sample_gallager({8, 4, 2, 4}, 1);
  const BinarySignal zero(8, 0);
  const auto m0 = measure(a, zero, 0.0, 1.0, 0);
  CHECK(m0.y == std::vector<double>(4, 0.0));

  const BinarySignal x = sample_bernoulli_signal(8, 0.4, 3);
  const double alpha = 1.75;
  const auto clean = measure(a, x, 0.0, alpha, 0);
  const auto ax = a.matvec(x);
  for (std::uint32_t f = 0; f < 4; ++f) CHECK(clean.y[f] == alpha * ax[f]);

  // reproducible by seed; different seeds differ
  const auto n1 = measure(a, x, 0.3, 1.0, 11);
  const auto n2 = measure(a, x, 0.3, 1.0, 11);
  const auto n3 = measure(a, x, 0.3, 1.0, 12);
  CHECK(n1.y == n2.y);
  CHECK(n1.y != n3.y);
  CHECK_THROWS_AS(measure(a, x, -1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("measurement noise has the right variance") {
  // 1e5 scalar noise draws: empirical variance within 2% of sigma^2
  const auto a = SparseBinaryMatrix::sample_gallager({8, 4, 2, 4}, 1);
  const BinarySignal x(8, 0);
  const double sigma = 1.7;
  double acc = 0.0;
  std::size_t count = 0;
  for (int rep = 0; rep < 25000; ++rep) {
    const auto m = measure(a, x, sigma, 1.0, 40000 + rep);
    for (const double v : m.y) {
      acc += v * v;
      ++count;
    }
  }
  REQUIRE(count == 100000);
  CHECK(acc / count == Catch::Approx(sigma * sigma).epsilon(0.02));
}

TEST_CASE("ber counts mismatches normalized by k") {
  const BinarySignal x{0, 1, 1, 0, 0, 0, 1, 0};
  CHECK(ber(x, x, 3.0) == 0.0);

  BinarySignal zero(8, 0), three(8, 0);
  three[1] = three[4] = three[6] = 1;
  CHECK(ber(zero, three, 3.0) == 1.0);

  // random pair equals a hand count / k
  std::mt19937_64 gen(12);
  for (int rep = 0; rep < 50; ++rep) {
    BinarySignal u(8), v(8);
    for (auto& b : u) b = gen() & 1;
    for (auto& b : v) b = gen() & 1;
    int mism = 0;
    for (int i = 0; i < 8; ++i) mism += u[i] != v[i];
    CHECK(ber(u, v, 2.0) == mism / 2.0);
    CHECK(ber(u, v, 2.0) == ber(v, u, 2.0));  // symmetry
  }
  CHECK_THROWS_AS(ber(x, BinarySignal(4, 0), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ber(x, x, 0.0), std::invalid_argument);
}

TEST_CASE("ber obeys the Hamming triangle inequality") {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 100; ++rep) {
    BinarySignal a(16), b(16), c(16);
    for (auto& v : a) v = gen() & 1;
    for (auto& v : b) v = gen() & 1;
    for (auto& v : c) v = gen() & 1;
    CHECK(ber(a, c, 4.0) <= ber(a, b, 4.0) + ber(b, c, 4.0) + 1e-12);
  }
}

TEST_CASE("Eb/N0 conversions") {
  // paper-scale threshold: nu(s-1)/4 = 508 maps to about -29.5 dB
  const double sigma0_sq = 16.0 * 127.0 / 4.0;
  CHECK(sigma0_sq == 508.0);
  CHECK(sigma_to_ebn0_db(std::sqrt(sigma0_sq), 16.0, 14.0) ==
        Catch::Approx(-29.5).margin(0.05));

  // exact algebraic round trip
  for (const double db : {-29.5, -3.0, 0.0, 1.0, 7.5}) {
    const double sigma = ebn0_db_to_sigma(db, 16.0, 14.0);
    CHECK(sigma_to_ebn0_db(sigma, 16.0, 14.0) == Catch::Approx(db).margin(1e-12));
  }
  CHECK_THROWS_AS(ebn0_db_to_sigma(0.0, 0.0, 14.0), std::invalid_argument);
  CHECK_THROWS_AS(ebn0_db_to_sigma(0.0, 16.0, 0.0), std::invalid_argument);
}

TEST_CASE("column energies match the accounting rules") {
  // LDPC column energy is alpha^2 nu
  const auto a = SparseBinaryMatrix::sample_gallager({64, 16, 4, 16}, 2);
  const double alpha = 0.5;
  for (std::uint32_t j = 0; j < 8; ++j) {
    std::vector<double> e(64, 0.0);
    e[j] = 1.0;
    const auto col = measure(a, e, 0.0, alpha, 0).y;
    double energy = 0.0;
    for (const double v : col) energy += v * v;
    CHECK(energy == Catch::Approx(alpha * alpha * 4.0).epsilon(1e-12));
  }
}
