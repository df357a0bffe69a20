#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcs/rng.hpp"

namespace bcs {

// Degree profile of a biregular bipartite sensing matrix: M variables
// (columns) of degree nu, n factors (rows) of degree s.
struct LdpcParams {
  std::uint32_t num_vars = 0;       // M
  std::uint32_t num_factors = 0;    // n
  std::uint32_t var_degree = 0;     // nu
  std::uint32_t factor_degree = 0;  // s

  void validate() const {
    if (num_vars == 0 || num_factors == 0 || var_degree == 0 || factor_degree == 0)
      throw std::invalid_argument("LdpcParams: all fields must be positive");
    if (static_cast<std::uint64_t>(var_degree) * num_vars !=
        static_cast<std::uint64_t>(factor_degree) * num_factors)
      throw std::invalid_argument("LdpcParams: nu*M must equal s*n");
    if (num_vars % factor_degree != 0)
      throw std::invalid_argument("LdpcParams: s must divide M");
  }

  bool operator==(const LdpcParams&) const = default;
};

// Sparse {0,1} matrix stored as flat adjacency lists in both directions.
// Immutable after construction; safe to share across threads.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix(LdpcParams params, std::vector<std::uint32_t> var_adj,
                     std::vector<std::uint32_t> factor_adj)
      : params_(params), var_adj_(std::move(var_adj)), factor_adj_(std::move(factor_adj)) {
    params_.validate();
    check_consistency();
  }

  // Samples a matrix from the round-based biregular ensemble: nu rounds, each
  // introducing M/s fresh factors by partitioning the variables into M/s
  // blocks of size s (Fisher-Yates shuffle, then consecutive chunks).
  // Deterministic given the seed.
  static SparseBinaryMatrix sample_gallager(const LdpcParams& params, std::uint64_t seed) {
    params.validate();
    const std::uint32_t m = params.num_vars;
    const std::uint32_t nu = params.var_degree;
    const std::uint32_t s = params.factor_degree;
    const std::uint32_t factors_per_round = m / s;

    std::mt19937_64 gen(seed);
    std::vector<std::uint32_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0u);

    std::vector<std::uint32_t> var_adj(static_cast<std::size_t>(m) * nu);
    std::vector<std::uint32_t> factor_adj(static_cast<std::size_t>(params.num_factors) * s);

    for (std::uint32_t round = 0; round < nu; ++round) {
      for (std::uint32_t i = m - 1; i > 0; --i) {
        const auto j = static_cast<std::uint32_t>(uniform_below(gen, i + 1));
        std::swap(perm[i], perm[j]);
      }
      for (std::uint32_t part = 0; part < factors_per_round; ++part) {
        const std::uint32_t f = round * factors_per_round + part;
        auto* block = factor_adj.data() + static_cast<std::size_t>(f) * s;
        std::copy_n(perm.data() + static_cast<std::size_t>(part) * s, s, block);
        std::sort(block, block + s);
        for (std::uint32_t e = 0; e < s; ++e)
          var_adj[static_cast<std::size_t>(block[e]) * nu + round] = f;
      }
    }
    return SparseBinaryMatrix(params, std::move(var_adj), std::move(factor_adj));
  }

  const LdpcParams& params() const { return params_; }
  std::uint32_t num_vars() const { return params_.num_vars; }
  std::uint32_t num_factors() const { return params_.num_factors; }
  std::uint32_t var_degree() const { return params_.var_degree; }
  std::uint32_t factor_degree() const { return params_.factor_degree; }

  std::span<const std::uint32_t> factors_of(std::uint32_t var) const {
    return {var_adj_.data() + static_cast<std::size_t>(var) * params_.var_degree,
            params_.var_degree};
  }
  std::span<const std::uint32_t> vars_of(std::uint32_t factor) const {
    return {factor_adj_.data() + static_cast<std::size_t>(factor) * params_.factor_degree,
            params_.factor_degree};
  }

  // y = A x, accumulated over factor adjacency. Exact for integer-valued x.
  template <class Vec>
  void matvec(const Vec& x, std::vector<double>& y) const {
    if (x.size() != params_.num_vars)
      throw std::invalid_argument("matvec: dimension mismatch");
    y.assign(params_.num_factors, 0.0);
    for (std::uint32_t f = 0; f < params_.num_factors; ++f) {
      double acc = 0.0;
      for (std::uint32_t v : vars_of(f)) acc += static_cast<double>(x[v]);
      y[f] = acc;
    }
  }
  template <class Vec>
  std::vector<double> matvec(const Vec& x) const {
    std::vector<double> y;
    matvec(x, y);
    return y;
  }

  // x = A^T r, accumulated over variable adjacency.
  template <class Vec>
  void matvec_transpose(const Vec& r, std::vector<double>& x) const {
    if (r.size() != params_.num_factors)
      throw std::invalid_argument("matvec_transpose: dimension mismatch");
    x.assign(params_.num_vars, 0.0);
    for (std::uint32_t v = 0; v < params_.num_vars; ++v) {
      double acc = 0.0;
      for (std::uint32_t f : factors_of(v)) acc += static_cast<double>(r[f]);
      x[v] = acc;
    }
  }
  template <class Vec>
  std::vector<double> matvec_transpose(const Vec& r) const {
    std::vector<double> x;
    matvec_transpose(r, x);
    return x;
  }

  // Edge-list text format. Line 1: "M n nu s"; then one line per factor:
  // "f: v1 v2 ... vs" with 0-based indices, LF line endings.
  void serialize(std::ostream& out) const {
    out << params_.num_vars << ' ' << params_.num_factors << ' ' << params_.var_degree
        << ' ' << params_.factor_degree << '\n';
    for (std::uint32_t f = 0; f < params_.num_factors; ++f) {
      out << f << ':';
      for (std::uint32_t v : vars_of(f)) out << ' ' << v;
      out << '\n';
    }
  }

  static SparseBinaryMatrix deserialize(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
      throw std::invalid_argument("matrix parse: missing header");
    LdpcParams params;
    {
      std::istringstream hs(line);
      std::int64_t m = -1, n = -1, nu = -1, s = -1;
      if (!(hs >> m >> n >> nu >> s) || m <= 0 || n <= 0 || nu <= 0 || s <= 0)
        throw std::invalid_argument("matrix parse: malformed header");
      std::string trailing;
      if (hs >> trailing)
        throw std::invalid_argument("matrix parse: malformed header");
      params = {static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n),
                static_cast<std::uint32_t>(nu), static_cast<std::uint32_t>(s)};
      params.validate();
    }
    std::vector<std::uint32_t> factor_adj(
        static_cast<std::size_t>(params.num_factors) * params.factor_degree);
    for (std::uint32_t f = 0; f < params.num_factors; ++f) {
      if (!std::getline(in, line))
        throw std::invalid_argument("matrix parse: missing factor line " + std::to_string(f));
      std::istringstream ls(line);
      std::int64_t idx = -1;
      char colon = 0;
      if (!(ls >> idx >> colon) || colon != ':' || idx != static_cast<std::int64_t>(f))
        throw std::invalid_argument("matrix parse: bad factor label on line " +
                                    std::to_string(f));
      for (std::uint32_t e = 0; e < params.factor_degree; ++e) {
        std::int64_t v = -1;
        if (!(ls >> v))
          throw std::invalid_argument("matrix parse: factor " + std::to_string(f) +
                                      " has fewer than s entries");
        if (v < 0 || v >= static_cast<std::int64_t>(params.num_vars))
          throw std::invalid_argument("matrix parse: variable index out of range");
        factor_adj[static_cast<std::size_t>(f) * params.factor_degree + e] =
            static_cast<std::uint32_t>(v);
      }
      std::int64_t extra;
      if (ls >> extra)
        throw std::invalid_argument("matrix parse: factor " + std::to_string(f) +
                                    " has more than s entries");
    }
    // Rebuild the variable adjacency and let the constructor validate degrees.
    std::vector<std::uint32_t> var_adj;
    var_adj.reserve(static_cast<std::size_t>(params.num_vars) * params.var_degree);
    std::vector<std::uint32_t> fill(params.num_vars, 0);
    for (const std::uint32_t v : factor_adj) ++fill[v];
    for (std::uint32_t v = 0; v < params.num_vars; ++v)
      if (fill[v] != params.var_degree)
        throw std::invalid_argument("matrix parse: variable " + std::to_string(v) +
                                    " has degree " + std::to_string(fill[v]));
    var_adj.assign(static_cast<std::size_t>(params.num_vars) * params.var_degree, 0);
    std::fill(fill.begin(), fill.end(), 0u);
    for (std::uint32_t f = 0; f < params.num_factors; ++f)
      for (std::uint32_t e = 0; e < params.factor_degree; ++e) {
        const std::uint32_t v = factor_adj[static_cast<std::size_t>(f) * params.factor_degree + e];
        var_adj[static_cast<std::size_t>(v) * params.var_degree + fill[v]++] = f;
      }
    return SparseBinaryMatrix(params, std::move(var_adj), std::move(factor_adj));
  }

  bool operator==(const SparseBinaryMatrix& other) const {
    return params_ == other.params_ && var_adj_ == other.var_adj_ &&
           factor_adj_ == other.factor_adj_;
  }

 private:
  // Exact biregularity, sortedness, index ranges and transpose consistency.
  void check_consistency() const {
    const std::size_t m = params_.num_vars, n = params_.num_factors;
    if (var_adj_.size() != m * params_.var_degree ||
        factor_adj_.size() != n * params_.factor_degree)
      throw std::invalid_argument("SparseBinaryMatrix: adjacency size mismatch");
    for (std::uint32_t v = 0; v < m; ++v) {
      auto fs = factors_of(v);
      for (std::size_t e = 0; e < fs.size(); ++e) {
        if (fs[e] >= n) throw std::invalid_argument("SparseBinaryMatrix: factor index out of range");
        if (e > 0 && fs[e] <= fs[e - 1])
          throw std::invalid_argument("SparseBinaryMatrix: var adjacency not sorted/distinct");
      }
    }
    std::size_t edges = 0;
    for (std::uint32_t f = 0; f < n; ++f) {
      auto vs = vars_of(f);
      for (std::size_t e = 0; e < vs.size(); ++e) {
        if (vs[e] >= m) throw std::invalid_argument("SparseBinaryMatrix: variable index out of range");
        if (e > 0 && vs[e] <= vs[e - 1])
          throw std::invalid_argument("SparseBinaryMatrix: factor adjacency not sorted/distinct");
        bool found = false;
        for (std::uint32_t g : factors_of(vs[e])) found = found || g == f;
        if (!found)
          throw std::invalid_argument("SparseBinaryMatrix: adjacency lists are inconsistent");
        ++edges;
      }
    }
    if (edges != m * params_.var_degree)
      throw std::invalid_argument("SparseBinaryMatrix: edge count mismatch");
  }

  LdpcParams params_;
  std::vector<std::uint32_t> var_adj_;     // M * nu, sorted per variable
  std::vector<std::uint32_t> factor_adj_;  // n * s, sorted per factor
};

}  // namespace bcs
