#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <vector>

#include "bcs/ldpc_matrix.hpp"
#include "bcs/rng.hpp"

using namespace bcs;

namespace {

// Independent dense reference for the sparse products.
std::vector<std::vector<double>> dense_of(const SparseBinaryMatrix& a) {
  std::vector<std::vector<double>> d(a.num_factors(), std::vector<double>(a.num_vars(), 0.0));
  for (std::uint32_t f = 0; f < a.num_factors(); ++f)
    for (std::uint32_t v : a.vars_of(f)) d[f][v] += 1.0;
  return d;
}

}  // namespace

TEST_CASE("params validation") {
  CHECK_NOTHROW((LdpcParams{8, 4, 2, 4}).validate());
  CHECK_NOTHROW((LdpcParams{12, 4, 1, 3}).validate());
  // s does not divide M
  CHECK_THROWS_AS((LdpcParams{8, 4, 3, 6}).validate(), std::invalid_argument);
  // nu M != s n
  CHECK_THROWS_AS((LdpcParams{8, 4, 2, 5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((LdpcParams{0, 4, 2, 4}).validate(), std::invalid_argument);
}

TEST_CASE("sampled graphs are exactly biregular") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (const LdpcParams params :
         {LdpcParams{8, 4, 2, 4}, LdpcParams{12, 4, 1, 3}, LdpcParams{64, 16, 4, 16}}) {
      const auto a = SparseBinaryMatrix::sample_gallager(params, seed);
      std::vector<std::uint32_t> var_deg(params.num_vars, 0), fac_deg(params.num_factors, 0);
      for (std::uint32_t f = 0; f < params.num_factors; ++f)
        for (std::uint32_t v : a.vars_of(f)) {
          ++var_deg[v];
          ++fac_deg[f];
        }
      for (const auto d : var_deg) CHECK(d == params.var_degree);
      for (const auto d : fac_deg) CHECK(d == params.factor_degree);
    }
  }
}

TEST_CASE("within one round parts are disjoint and cover all variables") {
  const LdpcParams params{64, 32, 4, 8};
  const auto a = SparseBinaryMatrix::sample_gallager(params, 3);
  const std::uint32_t per_round = params.num_vars / params.factor_degree;
  for (std::uint32_t round = 0; round < params.var_degree; ++round) {
    std::vector<bool> seen(params.num_vars, false);
    for (std::uint32_t p = 0; p < per_round; ++p)
      for (std::uint32_t v : a.vars_of(round * per_round + p)) {
        CHECK_FALSE(seen[v]);
        seen[v] = true;
      }
    for (const bool s : seen) CHECK(s);
  }
}

TEST_CASE("paper-scale sample has the advertised shape") {
  const LdpcParams params{1u << 14, 1u << 11, 16, 128};
  const auto a = SparseBinaryMatrix::sample_gallager(params, 1);
  // 2^18 edges, checked through the stored factor adjacency lengths
  std::size_t edges = 0;
  for (std::uint32_t f = 0; f < a.num_factors(); ++f) edges += a.vars_of(f).size();
  CHECK(edges == std::size_t{1} << 18);
  CHECK(a.factors_of(0).size() == 16);
}

TEST_CASE("degree-1 biregular graph is a permutation") {
  const auto a = SparseBinaryMatrix::sample_gallager({4, 4, 1, 1}, 7);
  std::vector<bool> hit(4, false);
  for (std::uint32_t f = 0; f < 4; ++f) {
    REQUIRE(a.vars_of(f).size() == 1);
    hit[a.vars_of(f)[0]] = true;
  }
  for (const bool h : hit) CHECK(h);
  // permutation matvec maps e_j to e_{pi(j)}
  for (std::uint32_t j = 0; j < 4; ++j) {
    std::vector<double> e(4, 0.0);
    e[j] = 1.0;
    const auto y = a.matvec(e);
    CHECK(std::count(y.begin(), y.end(), 1.0) == 1);
    CHECK(y[a.factors_of(j)[0]] == 1.0);
    const auto back = a.matvec_transpose(y);
    CHECK(back == e);
  }
}

TEST_CASE("sampling is deterministic given the seed") {
  const LdpcParams params{8, 4, 2, 4};
  const auto a = SparseBinaryMatrix::sample_gallager(params, 0);
  const auto b = SparseBinaryMatrix::sample_gallager(params, 0);
  const auto c = SparseBinaryMatrix::sample_gallager(params, 1);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("matvec agrees with the dense reference") {
  std::mt19937_64 gen(99);
  const auto a = SparseBinaryMatrix::sample_gallager({8, 4, 2, 4}, 5);
  const auto dense = dense_of(a);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(8);
    for (auto& v : x) v = uniform01(gen) < 0.5 ? 1.0 : 0.0;
    const auto y = a.matvec(x);
    for (std::uint32_t f = 0; f < 4; ++f) {
      double ref = 0.0;
      for (std::uint32_t v = 0; v < 8; ++v) ref += dense[f][v] * x[v];
      CHECK(y[f] == ref);
    }
    std::vector<double> r(4);
    for (auto& v : r) v = uniform01(gen) - 0.5;
    const auto xt = a.matvec_transpose(r);
    for (std::uint32_t v = 0; v < 8; ++v) {
      double ref = 0.0;
      for (std::uint32_t f = 0; f < 4; ++f) ref += dense[f][v] * r[f];
      CHECK(xt[v] == Catch::Approx(ref).margin(1e-15));
    }
  }
}

TEST_CASE("matvec of zero and ones vectors") {
  const auto a = SparseBinaryMatrix::sample_gallager({12, 4, 1, 3}, 2);
  const std::vector<double> zero(12, 0.0), ones(12, 1.0);
  CHECK(a.matvec(zero) == std::vector<double>(4, 0.0));
  CHECK(a.matvec(ones) == std::vector<double>(4, 3.0));
  const std::vector<double> ones_n(4, 1.0);
  CHECK(a.matvec_transpose(ones_n) == std::vector<double>(12, 1.0));
  CHECK_THROWS_AS(a.matvec(ones_n), std::invalid_argument);
  CHECK_THROWS_AS(a.matvec_transpose(zero), std::invalid_argument);
}

TEST_CASE("serialize round-trips") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto a = SparseBinaryMatrix::sample_gallager({8, 4, 2, 4}, seed);
    std::stringstream ss;
    a.serialize(ss);
    const auto b = SparseBinaryMatrix::deserialize(ss);
    CHECK(a == b);
  }
}

TEST_CASE("deserialize rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return SparseBinaryMatrix::deserialize(in);
  };
  CHECK_THROWS_AS(parse(""), std::invalid_argument);                     // missing header
  CHECK_THROWS_AS(parse("8 4 2\n"), std::invalid_argument);              // short header
  CHECK_THROWS_AS(parse("8 4 2 5\n"), std::invalid_argument);            // nu M != s n
  CHECK_THROWS_AS(parse("8 4 2 4\n"), std::invalid_argument);            // empty edge section
  CHECK_THROWS_AS(parse("4 4 1 1\n0: 0\n1: 1\n2: 2\n3: 9\n"),
                  std::invalid_argument);                                // out-of-range index
  CHECK_THROWS_AS(parse("4 4 1 1\n0: 0\n1: 0\n2: 2\n3: 3\n"),
                  std::invalid_argument);                                // degree violation
  CHECK_THROWS_AS(parse("4 4 1 1\n0: 0 1\n1: 1\n2: 2\n3: 3\n"),
                  std::invalid_argument);                                // too many entries
  CHECK_NOTHROW(parse("4 4 1 1\n0: 0\n1: 1\n2: 2\n3: 3\n"));
}
