#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gembed/abcd.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

using namespace gembed;

namespace {

// Exact moments of P(k) ~ k^(-exponent) on [lo, hi].
struct PowerLawMoments {
  double mean = 0.0;
  double variance = 0.0;
};

PowerLawMoments power_law_moments(double exponent, std::int64_t lo,
                                  std::int64_t hi) {
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double w = std::pow(static_cast<double>(k), -exponent);
    z += w;
    m1 += w * static_cast<double>(k);
    m2 += w * static_cast<double>(k) * static_cast<double>(k);
  }
  m1 /= z;
  m2 /= z;
  return {m1, m2 - m1 * m1};
}

}  // namespace

TEST_CASE("power-law sampler matches the exact mass function") {
  Rng rng(11);
  const std::int64_t lo = 1, hi = 10;
  const std::int64_t count = 50000;
  const auto draws = sample_power_law(count, 2.5, lo, hi, rng);

  REQUIRE(std::is_sorted(draws.begin(), draws.end(), std::greater<>()));
  std::vector<std::int64_t> hist(static_cast<std::size_t>(hi + 1), 0);
  for (std::int64_t v : draws) {
    REQUIRE(v >= lo);
    REQUIRE(v <= hi);
    ++hist[static_cast<std::size_t>(v)];
  }

  double z = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k)
    z += std::pow(static_cast<double>(k), -2.5);
  double chi_sq = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double expected =
        count * std::pow(static_cast<double>(k), -2.5) / z;
    const double diff = hist[static_cast<std::size_t>(k)] - expected;
    chi_sq += diff * diff / expected;
  }
  // 9 degrees of freedom, p = 0.001 cut-off
  REQUIRE(chi_sq < 27.88);
}

TEST_CASE("degree sequences are even, bounded and have the right mean") {
  AbcdParams params;
  params.n = 10000;
  params.gamma = 2.5;
  params.delta_min = 5;
  params.delta_max = 0;  // natural cut-off: round(10000^(2/3)) = 464
  REQUIRE(params.effective_max_degree() == 464);

  Rng rng(3);
  const auto degrees = build_degree_sequence(params, rng);
  REQUIRE(degrees.size() == 10000);
  REQUIRE(std::is_sorted(degrees.begin(), degrees.end(), std::greater<>()));

  std::int64_t sum = 0;
  for (std::int64_t d : degrees) {
    REQUIRE(d >= 5);
    REQUIRE(d <= 465);  // parity fix may raise one minimum entry
    sum += d;
  }
  REQUIRE(sum % 2 == 0);

  const auto mom = power_law_moments(2.5, 5, 464);
  const double mean = static_cast<double>(sum) / 10000.0;
  const double three_sigma = 3.0 * std::sqrt(mom.variance / 10000.0);
  REQUIRE(std::abs(mean - mom.mean) < three_sigma);
}

TEST_CASE("fixed fractions round by largest remainder") {
  const auto a = detail::sizes_from_fractions({0.5, 0.3, 0.2}, 7);
  REQUIRE(a == std::vector<std::int64_t>{4, 2, 1});

  const auto b = detail::sizes_from_fractions({0.3, 0.25, 0.2, 0.15, 0.1}, 10);
  REQUIRE(b == std::vector<std::int64_t>{3, 3, 2, 1, 1});

  const auto c = detail::sizes_from_fractions({0.3, 0.25, 0.2, 0.15, 0.1}, 10000);
  REQUIRE(c == std::vector<std::int64_t>{3000, 2500, 2000, 1500, 1000});

  REQUIRE_THROWS_AS(detail::sizes_from_fractions({0.999, 0.001}, 10),
                    ValidationError);
}

TEST_CASE("sampled community sizes partition n within bounds") {
  AbcdParams params;
  params.n = 1000;
  params.beta = 1.5;
  params.s_min = 50;
  params.s_max = 200;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const auto sizes = sample_community_sizes(params, rng);
    std::int64_t sum = 0;
    for (std::int64_t s : sizes) {
      REQUIRE(s >= 50);
      REQUIRE(s <= 200);
      sum += s;
    }
    REQUIRE(sum == 1000);
  }
}

TEST_CASE("assignment respects the internal-degree capacity rule") {
  // ceil((1-xi) d) <= s-1: at xi = 0.5 a degree-4 node needs s >= 3,
  // so with sizes {3, 2} it must land in the size-3 community.
  const std::vector<std::int64_t> degrees = {4, 1, 1, 1, 1};
  const std::vector<std::int64_t> sizes = {3, 2};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    std::int64_t warnings = -1;
    const Partition p = assign_nodes(degrees, sizes, 0.5, rng, &warnings);
    REQUIRE(warnings == 0);
    REQUIRE(p.num_communities() == 2);
    REQUIRE(p.community_size(p.label(0)) == 3);
    std::vector<std::int64_t> got(2, 0);
    for (NodeId v = 0; v < 5; ++v) ++got[p.label(v)];
    std::sort(got.begin(), got.end(), std::greater<>());
    REQUIRE(got == std::vector<std::int64_t>{3, 2});
  }
}

TEST_CASE("assignment falls back with a warning when nothing fits") {
  const std::vector<std::int64_t> degrees = {5, 1, 1, 1};
  const std::vector<std::int64_t> sizes = {2, 2};
  Rng rng(4);
  std::int64_t warnings = 0;
  const Partition p = assign_nodes(degrees, sizes, 0.5, rng, &warnings);
  REQUIRE(warnings >= 1);
  std::vector<std::int64_t> got(2, 0);
  for (NodeId v = 0; v < 4; ++v) ++got[p.label(v)];
  REQUIRE(got == std::vector<std::int64_t>{2, 2});
}

TEST_CASE("degree splits cover the extremes and keep parity") {
  const std::vector<std::int64_t> degrees = {6, 4, 4, 3, 2, 1};  // sum 20
  const Partition one = Partition::from_labels({0, 0, 0, 0, 0, 0});

  SECTION("xi = 0 puts everything inside") {
    Rng rng(1);
    const auto s = split_degrees(degrees, one, 0.0, AbcdParams::Variant::global,
                                 rng);
    REQUIRE(s.internal == degrees);
    for (std::int64_t z : s.background) REQUIRE(z == 0);
  }

  SECTION("xi = 1 puts everything in the background") {
    Rng rng(1);
    const auto s = split_degrees(degrees, one, 1.0, AbcdParams::Variant::global,
                                 rng);
    REQUIRE(s.background == degrees);
    for (std::int64_t y : s.internal) REQUIRE(y == 0);
  }

  SECTION("intermediate xi conserves degrees and keeps community sums even") {
    const Partition two = Partition::from_labels({0, 1, 0, 1, 0, 1});
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      Rng rng(seed);
      const auto s = split_degrees(degrees, two, 0.37,
                                   AbcdParams::Variant::global, rng);
      std::int64_t y0 = 0, y1 = 0;
      for (std::size_t v = 0; v < degrees.size(); ++v) {
        REQUIRE(s.internal[v] >= 0);
        REQUIRE(s.background[v] >= 0);
        REQUIRE(s.internal[v] + s.background[v] == degrees[v]);
        (two.label(static_cast<NodeId>(v)) == 0 ? y0 : y1) += s.internal[v];
      }
      REQUIRE(y0 % 2 == 0);
      REQUIRE(y1 % 2 == 0);
    }
  }

  SECTION("odd degree total is rejected") {
    Rng rng(1);
    const std::vector<std::int64_t> odd = {3, 2, 2};
    const Partition p3 = Partition::from_labels({0, 0, 0});
    REQUIRE_THROWS_AS(
        split_degrees(odd, p3, 0.5, AbcdParams::Variant::global, rng),
        ValidationError);
  }
}

TEST_CASE("local variant clamps dominant communities to pure background") {
  // community 0 holds 40/44 of the degree; 0.909 > 1 - 0.2 forces xi_0 = 1
  const std::vector<std::int64_t> degrees = {10, 10, 10, 10, 2, 2};
  const Partition p = Partition::from_labels({0, 0, 0, 0, 1, 1});
  Rng rng(9);
  const auto s =
      split_degrees(degrees, p, 0.2, AbcdParams::Variant::local, rng);
  REQUIRE(s.clamp_warnings == 1);
  for (NodeId v = 0; v < 4; ++v) REQUIRE(s.internal[v] == 0);
  std::int64_t y1 = s.internal[4] + s.internal[5];
  REQUIRE(y1 % 2 == 0);
  for (std::size_t v = 0; v < degrees.size(); ++v)
    REQUIRE(s.internal[v] + s.background[v] == degrees[v]);
}

TEST_CASE("single-member communities carry no internal stubs") {
  const std::vector<std::int64_t> degrees = {2, 2};
  const Partition p = Partition::from_labels({0, 1});
  Rng rng(2);
  const auto s =
      split_degrees(degrees, p, 0.0, AbcdParams::Variant::global, rng);
  REQUIRE(s.internal == std::vector<std::int64_t>{0, 0});
  REQUIRE(s.background == std::vector<std::int64_t>{2, 2});
}

TEST_CASE("rewiring turns a multigraph simple and preserves degrees") {
  Multigraph mg;
  mg.num_nodes = 4;
  mg.edges = {{0, 0}, {1, 2}, {1, 2}, {0, 3}};
  Rng rng(8);
  const Graph g = rewire_to_simple(mg, rng);
  // reaching here proves simplicity: the graph builder rejects loops and
  // duplicate edges outright
  REQUIRE(g.num_edges() == 4);
  REQUIRE(g.degree(0) == 3);
  REQUIRE(g.degree(1) == 2);
  REQUIRE(g.degree(2) == 2);
  REQUIRE(g.degree(3) == 1);
}

TEST_CASE("rewiring reports an impossible layer instead of spinning") {
  Multigraph mg;
  mg.num_nodes = 2;
  mg.edges = {{0, 1}, {0, 1}, {0, 1}};
  Rng rng(1);
  REQUIRE_THROWS_AS(rewire_to_simple(mg, rng), ConvergenceError);
}

TEST_CASE("generated benchmark graphs honor the advertised invariants") {
  AbcdParams params;
  params.n = 300;
  params.gamma = 2.5;
  params.delta_min = 5;
  params.delta_max = 20;
  params.beta = 1.5;
  params.s_min = 40;
  params.s_max = 100;
  params.xi = 0.3;
  params.seed = 7;

  const AbcdGraph out = generate_abcd(params);
  REQUIRE(out.graph.num_nodes() == 300);
  REQUIRE(out.ground_truth.num_nodes() == 300);
  REQUIRE(out.ground_truth.num_communities() >= 3);
  REQUIRE(static_cast<std::int64_t>(out.target_degrees.size()) == 300);

  // configuration model: dealt degrees are realized exactly
  for (NodeId v = 0; v < 300; ++v)
    REQUIRE(static_cast<std::int64_t>(out.graph.degree(v)) ==
            out.target_degrees[v]);

  REQUIRE(out.realized_xi > 0.05);
  REQUIRE(out.realized_xi < 0.40);

  // same parameters replay to the same graph
  const AbcdGraph again = generate_abcd(params);
  const auto e1 = out.graph.edges();
  const auto e2 = again.graph.edges();
  REQUIRE(e1.size() == e2.size());
  for (std::size_t i = 0; i < e1.size(); ++i) {
    REQUIRE(e1[i].u == e2[i].u);
    REQUIRE(e1[i].v == e2[i].v);
  }

  params.seed = 8;
  const AbcdGraph other = generate_abcd(params);
  const auto e3 = other.graph.edges();
  bool differs = e3.size() != e1.size();
  for (std::size_t i = 0; !differs && i < e1.size(); ++i)
    differs = e1[i].u != e3[i].u || e1[i].v != e3[i].v;
  REQUIRE(differs);
}

TEST_CASE("xi = 0 leaves every edge inside its community") {
  AbcdParams params;
  params.n = 300;
  params.delta_min = 3;
  params.delta_max = 20;
  params.s_min = 40;
  params.s_max = 100;
  params.xi = 0.0;
  params.seed = 5;
  const AbcdGraph out = generate_abcd(params);
  REQUIRE(out.realized_xi == 0.0);
  for (const Edge& e : out.graph.edges())
    REQUIRE(out.ground_truth.label(e.u) == out.ground_truth.label(e.v));
}

TEST_CASE("independent-pair community model builds plausible graphs") {
  AbcdParams params;
  params.n = 300;
  params.delta_min = 5;
  params.delta_max = 20;
  params.s_min = 40;
  params.s_max = 100;
  params.xi = 0.2;
  params.seed = 11;
  params.community_model = AbcdParams::CommunityModel::chung_lu;
  const AbcdGraph out = generate_abcd(params);
  REQUIRE(out.graph.num_nodes() == 300);
  REQUIRE(out.graph.num_edges() > 0);
  REQUIRE(out.realized_xi >= 0.0);
  REQUIRE(out.realized_xi <= 0.5);
}

TEST_CASE("fixed community fractions are honored end to end") {
  AbcdParams params;
  params.n = 500;
  params.delta_min = 5;
  params.delta_max = 25;
  params.xi = 0.2;
  params.seed = 13;
  params.fixed_community_fractions = {0.30, 0.25, 0.20, 0.15, 0.10};
  const AbcdGraph out = generate_abcd(params);
  REQUIRE(out.ground_truth.num_communities() == 5);
  std::vector<std::int64_t> sizes;
  for (NodeId c = 0; c < 5; ++c)
    sizes.push_back(out.ground_truth.community_size(c));
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  REQUIRE(sizes == std::vector<std::int64_t>{150, 125, 100, 75, 50});
}

TEST_CASE("parameter validation rejects malformed requests") {
  AbcdParams params;
  params.n = 1;
  REQUIRE_THROWS_AS(params.validate(), ValidationError);
  params = AbcdParams{};
  params.gamma = 1.0;
  REQUIRE_THROWS_AS(params.validate(), ValidationError);
  params = AbcdParams{};
  params.xi = 1.5;
  REQUIRE_THROWS_AS(params.validate(), ValidationError);
  params = AbcdParams{};
  params.s_min = 500;
  params.s_max = 100;
  REQUIRE_THROWS_AS(params.validate(), ValidationError);
  params = AbcdParams{};
  params.fixed_community_fractions = {0.5, 0.4};
  REQUIRE_THROWS_AS(params.validate(), ValidationError);
}
