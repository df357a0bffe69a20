#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bcs/expansion.hpp"

using namespace bcs;

TEST_CASE("binary entropy endpoints") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(binary_entropy(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.1), std::invalid_argument);
}

TEST_CASE("expansion root for the paper-scale degrees") {
  const double tol = 1e-10;
  const double alpha = expansion_alpha_star(16, 128, tol);
  // root lies strictly inside (0, nu/s)
  CHECK(alpha > 0.0);
  CHECK(alpha < 16.0 / 128.0);
  // plugging the root back into the defining equation leaves a tiny residual
  const double res = detail::expansion_equation(alpha, 16, 128);
  CHECK(std::abs(res) < 10 * tol);
  // the bracket is verified: positive just below, negative just above
  CHECK(detail::expansion_equation(alpha - 1e-6, 16, 128) > 0.0);
  CHECK(detail::expansion_equation(alpha + 1e-6, 16, 128) < 0.0);
  // implied sparsity heuristic at M = 2^14
  const double kstar = expansion_k_star(16, 128, 16384.0, tol);
  CHECK(kstar == Catch::Approx(alpha * 1024.0));
  CHECK(kstar > 99.0);
  CHECK(kstar < 103.0);
}

TEST_CASE("expansion root across degree profiles stays inside its bracket") {
  for (const auto [nu, s] : {std::pair<unsigned, unsigned>{3, 6},
                             {4, 16},
                             {8, 64},
                             {16, 128}}) {
    const double alpha = expansion_alpha_star(nu, s);
    CHECK(alpha > 0.0);
    CHECK(alpha < double(nu) / s);
    CHECK(std::abs(detail::expansion_equation(alpha, nu, s)) < 1e-9);
  }
  // at nu = 2 the leading entropy term cancels and the equation stays
  // negative on the whole bracket; reported as a numerical error
  CHECK_THROWS_AS(expansion_alpha_star(2, 4), std::runtime_error);
}

TEST_CASE("expansion argument validation") {
  CHECK_THROWS_AS(expansion_alpha_star(1, 4), std::invalid_argument);
  CHECK_THROWS_AS(expansion_alpha_star(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(expansion_alpha_star(4, 16, -1.0), std::invalid_argument);
}
