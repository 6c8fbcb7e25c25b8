#include <doctest.h>

#include "hsf/lemmas.hpp"

using namespace hsf;

namespace {

SweepConfig small(std::size_t n) {
  SweepConfig c;
  c.samples = n;
  c.batches = 4;
  return c;
}

}  // namespace

TEST_SUITE("lemmas") {

TEST_CASE("per-sample streams depend only on seed and index") {
  auto a = sample_rng(7, 12), b = sample_rng(7, 12), c = sample_rng(7, 13), d = sample_rng(8, 12);
  auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("sweeps are reproducible") {
  auto r1 = run_lemma("chain", small(12));
  auto r2 = run_lemma("chain", small(12));
  REQUIRE(r1.rows.size() == r2.rows.size());
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].params == r2.rows[i].params);
    CHECK(r1.rows[i].lhs == r2.rows[i].lhs);
    CHECK(r1.rows[i].rhs == r2.rows[i].rhs);
  }
  // a prefix of a longer run reproduces the shorter run
  auto r3 = run_lemma("chain", small(20));
  for (std::size_t i = 0; i < r1.rows.size(); ++i) CHECK(r3.rows[i].lhs == r1.rows[i].lhs);
}

TEST_CASE("short sweeps show no violations") {
  for (const char* name : {"reduction", "ff-fusion", "tf-fusion", "chain", "testfn"}) {
    CAPTURE(name);
    auto r = run_lemma(name, small(8));
    CHECK(r.violations() == 0);
    CHECK(r.passed());
    CHECK_FALSE(r.checks.empty());
  }
}

TEST_CASE("chain sandwich ratios lie in [1, 2^v]") {
  auto r = run_lemma("chain", small(16));
  for (const auto& row : r.rows) {
    CHECK(row.ratio >= 1.0 - 1e-7);
    CHECK(row.ratio <= row.limit);
  }
}

TEST_CASE("forest-forest fusion holds with constant one") {
  auto r = run_lemma("ff-fusion", small(10));
  for (const auto& row : r.rows) CHECK(row.lhs <= row.rhs * (1 + 1e-9));
}

TEST_CASE("batch spread and constants") {
  SweepReport rep;
  rep.rows = {{"x", {}, 1.0, 1.0, 1.0, 0.0, true}};
  rep.checks["x"] = {1, 0, 1.0, 1.0, 1.0, 2e3};
  CHECK_FALSE(rep.passed());
  rep.checks["x"].batch_spread = 3.0;
  CHECK(rep.passed());
  rep.checks["x"].violations = 1;
  CHECK_FALSE(rep.passed());
}

TEST_CASE("preconditions") {
  CHECK_NOTHROW(check_two_variable_precondition(3.0, 1.0, 1));
  CHECK_THROWS_AS(check_two_variable_precondition(2.9, 1.0, 1), PreconditionError);
  CHECK_THROWS_AS(check_two_variable_precondition(3.0, 1.0, 2), PreconditionError);
  CHECK_THROWS_AS(run_lemma("fusion", small(1)), std::invalid_argument);
  SweepConfig bad = small(1);
  bad.s = 3;
  CHECK_THROWS_AS(check_reduction_lemma(bad), std::domain_error);
}

}  // TEST_SUITE
