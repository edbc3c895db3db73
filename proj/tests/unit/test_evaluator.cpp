#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "../oracles.hpp"
#include "detaudit/evaluator.hpp"
#include "detaudit/score_file.hpp"

using namespace detaudit;

namespace {

std::pair<ScoreMap, TruthMap> from_sequence(const std::vector<bool>& ascending_truth) {
  ScoreMap s;
  TruthMap t;
  for (std::size_t i = 0; i < ascending_truth.size(); ++i) {
    const auto id = static_cast<ImageId>(100 + i);
    s[id] = 0.1 * static_cast<double>(i);
    t[id] = ascending_truth[i];
  }
  return {s, t};
}

}  // namespace

TEST_CASE("average precision examples") {
  {
    const auto [s, t] = from_sequence({true, true, false, false});
    CHECK(average_precision(s, t) == 1.0);
  }
  {
    const auto [s, t] = from_sequence({true, false, true, false});
    CHECK(average_precision(s, t) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));
  }
  {
    const auto [s, t] = from_sequence({true, true, true});
    CHECK(average_precision(s, t) == 1.0);
  }
}

TEST_CASE("AP on [1,0,1,0] over every score permutation matches the oracle") {
  TruthMap t{{1, true}, {2, false}, {3, true}, {4, false}};
  std::vector<double> values{0.1, 0.2, 0.3, 0.4};
  int permutations = 0;
  do {
    ScoreMap s;
    for (ImageId id = 1; id <= 4; ++id) s[id] = values[static_cast<std::size_t>(id - 1)];
    CHECK(average_precision(s, t) == oracle::average_precision(s, t));
    ++permutations;
  } while (std::next_permutation(values.begin(), values.end()));
  CHECK(permutations == 24);
}

TEST_CASE("constant scores fall back to image id order") {
  ScoreMap s;
  TruthMap t;
  for (ImageId id = 1; id <= 10; ++id) {
    s[id] = 0.5;
    t[id] = id % 3 == 0;
  }
  CHECK(average_precision(s, t) == oracle::average_precision(s, t));
  CHECK(precision_at_k(s, t, 10) == doctest::Approx(0.3));
  const auto ranked = rank_images(s, t);
  CHECK(std::is_sorted(ranked.order.begin(), ranked.order.end()));
}

TEST_CASE("precision at k") {
  const auto [s, t] = from_sequence({true, true, false, true, false});
  CHECK(precision_at_k(s, t, 1) == 1.0);
  CHECK(precision_at_k(s, t, 2) == 1.0);
  CHECK(precision_at_k(s, t, 5) == doctest::Approx(0.6));
  CHECK_THROWS_AS(precision_at_k(s, t, 0), EvaluationError);
  CHECK_THROWS_AS(precision_at_k(s, t, 6), EvaluationError);
}

TEST_CASE("evaluate report") {
  const auto [s, t] = from_sequence({true, false, true, false, false});
  const MetricsReport r = evaluate(s, t);
  CHECK(r.num_images == 5);
  CHECK(r.num_positives == 2);
  CHECK(r.precision_at_100_k == 5);
  CHECK(r.precision_at_100 == doctest::Approx(0.4));
  CHECK(r.precision_at_T == 0.5);
  CHECK(r.average_precision == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
  REQUIRE(r.precision_curve.size() == 5);
  const auto j = metrics_to_json(r);
  for (const char* key : {"average_precision", "precision_at_100", "precision_at_T"}) CHECK(j.contains(key));
  CHECK(metrics_table(r).find("precision@T") != std::string::npos);
}

TEST_CASE("evaluation errors") {
  SUBCASE("no positives") {
    const auto [s, t] = from_sequence({false, false});
    CHECK_THROWS_AS(average_precision(s, t), EvaluationError);
    CHECK_THROWS_AS(evaluate(s, t), EvaluationError);
  }
  SUBCASE("empty") { CHECK_THROWS_AS(evaluate({}, {}), EvaluationError); }
  SUBCASE("id mismatch lists both sides") {
    ScoreMap s{{1, 0.1}, {2, 0.2}, {5, 0.3}};
    TruthMap t{{1, true}, {3, false}, {5, false}};
    try {
      evaluate(s, t);
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      const std::string what = e.what();
      CHECK(what.find("only in scores: [2]") != std::string::npos);
      CHECK(what.find("only in ground truth: [3]") != std::string::npos);
    }
  }
  SUBCASE("NaN score") {
    ScoreMap s{{1, std::nan("")}};
    TruthMap t{{1, true}};
    CHECK_THROWS_AS(evaluate(s, t), EvaluationError);
  }
}

TEST_CASE("property: AP is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreMap s;
    TruthMap t;
    for (ImageId id = 0; id < 30; ++id) {
      s[id] = std::round(u(rng) * 10.0) / 10.0;  // coarse, so ties occur
      t[id] = u(rng) < 0.3;
    }
    t[0] = true;
    ScoreMap cubed, logged;
    for (const auto& [id, v] : s) {
      cubed[id] = v * v * v;
      logged[id] = std::log1p(v) * 7.0 - 2.0;
    }
    const double ap = average_precision(s, t);
    CHECK(average_precision(cubed, t) == ap);
    CHECK(average_precision(logged, t) == ap);
    CHECK(ap == doctest::Approx(oracle::average_precision(s, t)).epsilon(1e-15));
    CHECK(ap >= 0.0);
    CHECK(ap <= 1.0);
  }
}

TEST_CASE("property: AP is 1 exactly when positives come first") {
  for (unsigned mask = 1; mask < (1u << 6); ++mask) {
    std::vector<bool> seq;
    for (int i = 0; i < 6; ++i) seq.push_back((mask >> i) & 1u);
    const auto [s, t] = from_sequence(seq);
    const bool positives_first = std::is_sorted(seq.begin(), seq.end(), std::greater<bool>());
    CHECK((average_precision(s, t) == 1.0) == positives_first);
    if (positives_first) {
      const std::size_t T = static_cast<std::size_t>(std::count(seq.begin(), seq.end(), true));
      for (std::size_t k = 1; k <= T; ++k) CHECK(precision_at_k(s, t, k) == 1.0);
    }
  }
}

TEST_CASE("score file round trip") {
  std::vector<ImageScore> scores(3);
  scores[0] = {5, 0.9, 1.0, 0.9 * 0.9 * 0.9, 1.0, {1.0}, {0.729}, {1.0}};
  scores[1] = {2, 0.5, 0.125, 1.0, 1.0, {0.125}, {1.0}, {1.0}};
  scores[2] = {9, 0.5, 1.0, 1.0, 0.125, {}, {}, {0.125}};
  const std::string text = objectlab_scores_to_jsonl(scores, {{"tool", "x"}});
  const ScoreMap back = parse_score_file(text);
  CHECK(back == ScoreMap{{5, 0.9}, {2, 0.5}, {9, 0.5}});
  CHECK(parse_score_file(text, "<s>", "badloc").at(2) == 0.125);
  CHECK(parse_score_file(text, "<s>", "overlook").at(9) == 0.125);
  // Ascending by score, ties by id.
  const std::size_t start = text.find('\n') + 1;
  const auto first = nlohmann::json::parse(text.substr(start, text.find('\n', start) - start));
  CHECK(first["image_id"] == 2);
  const std::string csv = objectlab_scores_to_csv(scores);
  CHECK(csv.rfind("image_id,score,badloc,swap,overlook\n2,", 0) == 0);

  const std::string baseline = method_scores_to_jsonl("map", {{1, 0.3}, {4, 0.1}}, {{"tool", "x"}});
  CHECK(parse_score_file(baseline) == ScoreMap{{1, 0.3}, {4, 0.1}});
  CHECK_THROWS_AS(parse_score_file(baseline, "<s>", "badloc"), ParseError);
  CHECK_THROWS_AS(parse_score_file("{\"image_id\": 1}\n"), ParseError);
}
