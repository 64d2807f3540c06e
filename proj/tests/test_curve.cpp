#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "repaudit/curve.hpp"
#include "repaudit/error.hpp"
#include "support.hpp"

using namespace repaudit;
using testing::gaussian_rows;
using testing::make_set;

namespace {

struct Scenario {
  EmbeddingSet real;
  EmbeddingSet gen;
  std::vector<std::string> copies;  // gen ids that duplicate a real row
};

// Real rows live mostly in the first half of the coordinates, novel rows in
// the second half.
std::vector<float> half_weighted(std::mt19937_64& rng, std::size_t dim, bool first) {
  auto row = gaussian_rows(rng, 1, dim)[0];
  for (std::size_t k = 0; k < dim; ++k) {
    if ((k < dim / 2) != first) row[k] *= 0.1f;
  }
  return row;
}

// `copies` generated rows duplicate real rows exactly; the rest are drawn
// until their best cosine against the real set stays below 0.5.
Scenario duplicates_scenario(std::uint64_t seed, std::size_t n_real, std::size_t m,
                             std::size_t copies, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<float>> real_rows;
  for (std::size_t i = 0; i < n_real; ++i) real_rows.push_back(half_weighted(rng, dim, true));
  const auto real_d = testing::to_double(make_set("r", SetRole::kReal, real_rows, "r"));
  std::vector<std::vector<float>> gen_rows;
  std::vector<std::size_t> copy_slots(m);
  std::iota(copy_slots.begin(), copy_slots.end(), 0);
  std::shuffle(copy_slots.begin(), copy_slots.end(), rng);
  copy_slots.resize(copies);
  Scenario s;
  for (std::size_t j = 0; j < m; ++j) {
    if (std::find(copy_slots.begin(), copy_slots.end(), j) != copy_slots.end()) {
      gen_rows.push_back(real_rows[rng() % n_real]);
      continue;
    }
    for (;;) {
      auto cand = half_weighted(rng, dim, false);
      std::vector<double> c(cand.begin(), cand.end());
      double best = -1.0;
      for (const auto& r : real_d) best = std::max(best, testing::naive_cosine(r, c));
      if (best < 0.5) {
        gen_rows.push_back(cand);
        break;
      }
    }
  }
  s.real = make_set("real", SetRole::kReal, real_rows, "r");
  s.gen = make_set("gen", SetRole::kGenerated, gen_rows, "g");
  for (std::size_t j : copy_slots) s.copies.push_back(s.gen.ids[j]);
  std::sort(s.copies.begin(), s.copies.end());
  return s;
}

// Ranking computed from the scalar oracle: score descending, id ascending.
std::vector<std::size_t> oracle_ranking(const EmbeddingSet& real, const EmbeddingSet& gen) {
  const auto o = testing::naive_score(real, gen);
  std::vector<std::size_t> idx(gen.count());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (o.per_gen_top[a] != o.per_gen_top[b]) return o.per_gen_top[a] > o.per_gen_top[b];
    return gen.ids[a] < gen.ids[b];
  });
  return idx;
}

double oracle_point(const EmbeddingSet& real, const EmbeddingSet& gen,
                    const std::vector<std::size_t>& ranking, std::size_t removed) {
  std::vector<std::size_t> keep(ranking.begin() + static_cast<long>(removed), ranking.end());
  std::sort(keep.begin(), keep.end());
  return testing::oracle_fvd(real, gen.subset(keep));
}

SimilarityReport report_with_scores(const std::vector<std::pair<std::string, double>>& scores) {
  SimilarityReport r;
  for (const auto& [id, s] : scores) r.per_gen.push_back({id, "r000", s});
  return r;
}

}  // namespace

TEST_CASE("rank_by_replication examples") {
  CHECK(rank_by_replication(report_with_scores({{"a", 0.2}, {"b", 0.9}, {"c", 0.5}})) ==
        std::vector<std::string>{"b", "c", "a"});
  CHECK(rank_by_replication(report_with_scores({{"b", 0.7}, {"a", 0.7}})) ==
        std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(rank_by_replication(SimilarityReport{}), Error);
}

TEST_CASE("rank_by_replication matches a stable-sort oracle") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> level(0, 9);
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& id : testing::make_ids("g", 50)) scores.emplace_back(id, level(rng) / 10.0);
  auto shuffled = scores;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  auto expected = scores;  // already in id order
  std::stable_sort(expected.begin(), expected.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> ids;
  for (const auto& e : expected) ids.push_back(e.first);
  CHECK(rank_by_replication(report_with_scores(shuffled)) == ids);
}

TEST_CASE("removal_count") {
  CHECK(removal_count(1.0, 10) == 0);
  CHECK(removal_count(0.95, 10) == 1);
  CHECK(removal_count(0.9, 10) == 1);
  CHECK(removal_count(0.7, 10) == 3);
  CHECK(removal_count(0.5, 10) == 5);
  CHECK(removal_count(0.5, 7) == 4);
}

TEST_CASE("check_curve_steps") {
  CHECK_NOTHROW(check_curve_steps(default_curve_steps()));
  CHECK(default_curve_steps().size() == 11);
  CHECK_THROWS_AS(check_curve_steps({}), Error);
  CHECK_THROWS_AS(check_curve_steps({0.9, 0.5}), Error);
  CHECK_THROWS_AS(check_curve_steps({1.0, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(check_curve_steps({1.0, 0.0}), Error);
  CHECK_THROWS_AS(check_curve_steps({1.0, 1.2}), Error);
}

TEST_CASE("integrated_curve with a single full step equals plain fvd") {
  const auto s = duplicates_scenario(1, 30, 20, 4, 6);
  const auto rep = score(s.real, s.gen);
  const auto c = integrated_curve(s.real, s.gen, rep, {1.0});
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].fvd == fvd(s.real, s.gen).value);
  CHECK(c.points[0].removed_count == 0);
  CHECK(c.points[0].retained_fraction == 1.0);
  CHECK(c.removal_order.empty());
}

TEST_CASE("integrated_curve: half the set are copies") {
  const auto s = duplicates_scenario(2, 30, 20, 10, 6);
  const auto rep = score(s.real, s.gen);
  const auto c = integrated_curve(s.real, s.gen, rep, {1.0, 0.5});
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[1].removed_count == 10);
  auto removed = c.removal_order;
  std::sort(removed.begin(), removed.end());
  CHECK(removed == s.copies);
  CHECK(c.points[1].min_remaining_top_score < 0.5);
  CHECK(c.flagged_count == 10);
}

TEST_CASE("integrated_curve matches per-subset oracle fvd") {
  const auto s = duplicates_scenario(3, 40, 24, 6, 5);
  const auto rep = score(s.real, s.gen);
  const auto steps = default_curve_steps();
  const auto c = integrated_curve(s.real, s.gen, rep, steps);
  const auto ranking = oracle_ranking(s.real, s.gen);
  REQUIRE(c.points.size() == steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& p = c.points[k];
    const std::size_t expected_removed =
        static_cast<std::size_t>(std::ceil((1.0 - steps[k]) * 24 - 1e-9));
    CHECK(p.removed_count == expected_removed);
    CHECK(p.requested_step == steps[k]);
    CHECK(std::abs(p.fvd - oracle_point(s.real, s.gen, ranking, p.removed_count)) < 1e-6);
    CHECK(p.threshold == rep.threshold);
  }
  CHECK(c.baseline_fvd == c.points.front().fvd);
}

TEST_CASE("integrated_curve rejects steps that leave too few videos") {
  const auto s = duplicates_scenario(4, 10, 4, 1, 4);
  const auto rep = score(s.real, s.gen);
  try {
    integrated_curve(s.real, s.gen, rep, {1.0, 0.25});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientSamples);
  }
  CHECK_THROWS_AS(integrated_curve(s.real, s.gen, rep, {0.5}), Error);
}

TEST_CASE("integrated_curve rejects a report for a different set") {
  const auto s = duplicates_scenario(5, 10, 6, 1, 4);
  const auto other = duplicates_scenario(6, 10, 7, 1, 4);
  CHECK_THROWS_AS(integrated_curve(s.real, s.gen, score(other.real, other.gen), {1.0}), Error);
}

TEST_CASE("flagged_curve with nothing flagged is a single point") {
  const auto s = duplicates_scenario(7, 30, 12, 0, 6);
  const auto rep = score(s.real, s.gen);
  REQUIRE(rep.replicated_ids.empty());
  const auto c = flagged_curve(s.real, s.gen, rep);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].fvd == fvd(s.real, s.gen).value);
  CHECK(c.points[0].x_percent == 100.0);
  CHECK_FALSE(c.truncated);
}

TEST_CASE("flagged_curve with exact copies") {
  const std::size_t m = 20;
  const std::size_t k = 5;
  const auto s = duplicates_scenario(8, 30, m, k, 6);
  const auto rep = score(s.real, s.gen);
  auto flagged = rep.replicated_ids;
  std::sort(flagged.begin(), flagged.end());
  REQUIRE(flagged == s.copies);

  const auto c = flagged_curve(s.real, s.gen, rep);
  const auto ranking = oracle_ranking(s.real, s.gen);
  REQUIRE(c.points.size() == 11);
  CHECK(c.flagged_count == k);
  CHECK_FALSE(c.truncated);
  CHECK(std::abs(c.points[0].fvd - fvd(s.real, s.gen).value) < 1e-9);
  for (std::size_t j = 0; j < c.points.size(); ++j) {
    const auto& p = c.points[j];
    const std::size_t expected = (j * k * 2 + 10) / 20;  // round half up
    CHECK(p.removed_count == expected);
    CHECK(std::abs(p.fvd - oracle_point(s.real, s.gen, ranking, expected)) < 1e-6);
    CHECK(p.x_percent == doctest::Approx(100.0 * (m - k) / (m - expected)));
  }
  CHECK(c.points.back().x_percent == 100.0);
  auto removed = c.removal_order;
  std::sort(removed.begin(), removed.end());
  CHECK(removed == s.copies);
  CHECK(c.points.back().min_remaining_top_score < rep.threshold);
}

TEST_CASE("flagged_curve when everything is flagged is truncated") {
  std::mt19937_64 rng(9);
  const auto rows = gaussian_rows(rng, 6, 3);
  const auto real = make_set("r", SetRole::kReal, rows, "r");
  const auto gen = make_set("g", SetRole::kGenerated, rows, "g");
  const auto rep = score(real, gen);
  const auto c = flagged_curve(real, gen, rep);
  CHECK(c.truncated);
  for (const auto& p : c.points) CHECK(gen.count() - p.removed_count >= 2);
  CHECK(c.points.back().removed_count == 4);
  CHECK(c.points[0].x_percent == 0.0);
}

TEST_CASE("property: removal sets are nested and the curve is deterministic") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const auto s = duplicates_scenario(seed, 25, 16, 1 + seed % 7, 4);
    const auto rep = score(s.real, s.gen);
    const auto a = integrated_curve(s.real, s.gen, rep, default_curve_steps());
    const auto b = integrated_curve(s.real, s.gen, rep, default_curve_steps());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      CHECK(a.points[k].fvd == b.points[k].fvd);
      if (k > 0) CHECK(a.points[k].removed_count >= a.points[k - 1].removed_count);
      if (k > 0) {
        CHECK(a.points[k].min_remaining_top_score <= a.points[k - 1].min_remaining_top_score);
      }
    }
    CHECK(a.removal_order == b.removal_order);
    const auto ranked = rank_by_replication(rep);
    CHECK(std::equal(a.removal_order.begin(), a.removal_order.end(), ranked.begin()));

    const auto f = flagged_curve(s.real, s.gen, rep);
    CHECK(f.points.front().fvd == a.points.front().fvd);
    CHECK(std::equal(f.removal_order.begin(), f.removal_order.end(), ranked.begin()));
  }
}

TEST_CASE("flatness") {
  Curve c;
  c.baseline_fvd = 10.0;
  c.points = {CurvePoint{}, CurvePoint{}};
  c.points[0].fvd = 10.0;
  c.points[1].fvd = 11.5;
  CHECK(c.flatness().value() == doctest::Approx(0.15));
  c.baseline_fvd = 0.0;
  CHECK_FALSE(c.flatness().has_value());
}
