#include <doctest.h>

#include <cmath>
#include <string>

#include "otb/bounds.hpp"
#include "otb/errors.hpp"

using otb::BoundParams;
using otb::TermBreakdown;
using otb::ValidationError;

namespace {

/// Round-number parameters for hand evaluation.
BoundParams hand_params() {
  BoundParams p;
  p.n = 100;
  p.tau = 4;
  p.delta = 0.1;
  p.eta = 0.1;
  p.g_h = 1.0;
  p.r_h = 1.0;
  p.g_z = 1.0;
  p.r_z = 1.0;
  p.b_ell = 2.0;
  p.kappa_sum = 10.0;
  p.beta_tau1 = 0.01;
  p.phi_tau1 = 0.01;
  p.kl_comparator = std::log(4.0);
  return p;
}

double term(const TermBreakdown& b, const std::string& name) {
  for (const auto& [key, value] : b.terms) {
    if (key == name) return value;
  }
  FAIL("no term named " << name);
  return std::nan("");
}

double term_sum(const TermBreakdown& b) {
  double s = 0.0;
  for (const auto& [key, value] : b.terms) s += value;
  return s;
}

}  // namespace

TEST_CASE("the lag schedule follows max(1, ceil(ln n) - 1)") {
  CHECK(otb::tau_auto(1) == 1);
  CHECK(otb::tau_auto(2) == 1);
  CHECK(otb::tau_auto(3) == 1);
  CHECK(otb::tau_auto(8) == 2);
  CHECK(otb::tau_auto(32) == 3);
  CHECK(otb::tau_auto(64) == 4);
  CHECK(otb::tau_auto(100) == 4);
  CHECK(otb::tau_auto(128) == 4);
  CHECK(otb::tau_auto(256) == 5);
  CHECK_THROWS_AS(otb::tau_auto(0), ValidationError);
}

TEST_CASE("expected-level bound on round numbers") {
  // regret 5/100 + (2*4/100)(10 + 2) + 4/100 + 2 * 0.01 = 1.07
  const TermBreakdown b = otb::bound_expected_terms(hand_params(), 5.0);
  CHECK(term(b, "regret") == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(term(b, "stability") == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(term(b, "shift_z") == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(term(b, "mixing") == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(b.total == doctest::Approx(1.07).epsilon(1e-14));
  CHECK(b.total == term_sum(b));
  CHECK_FALSE(b.clamped);
  CHECK(otb::bound_expected(hand_params(), 5.0) == b.total);
}

TEST_CASE("high-probability bound adds the deviation term") {
  const BoundParams p = hand_params();
  const TermBreakdown b = otb::bound_highprob_terms(p, 5.0);
  CHECK(b.terms.size() == 5);
  CHECK(term(b, "regret") == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(term(b, "stability") == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(term(b, "shift_z") == doctest::Approx(0.04).epsilon(1e-15));
  const double dev = 2.0 * std::sqrt(2.0 * 4.0 * std::log(4.0 / 0.1) / 100.0);
  CHECK(term(b, "sqrt") == doctest::Approx(dev).epsilon(1e-14));
  CHECK(term(b, "mixing") == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(b.total == term_sum(b));
  CHECK(otb::bound_highprob(p, 5.0) == b.total);

  SUBCASE("a larger regret only moves the regret term") {
    const TermBreakdown b2 = otb::bound_highprob_terms(p, 15.0);
    CHECK(term(b2, "regret") == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(term(b2, "stability") == term(b, "stability"));
    CHECK(b2.total == doctest::Approx(b.total + 0.1).epsilon(1e-14));
  }
}

TEST_CASE("learner-specific bound with a fixed-rate certificate") {
  BoundParams p = hand_params();
  p.cert_K = 2.0;
  p.cert_r = 1.5;
  const TermBreakdown b = otb::bound_ewa_terms(p);
  const double ln_n = std::log(100.0);
  CHECK(b.terms.size() == 6);
  CHECK(term(b, "kl") == doctest::Approx(std::log(4.0) / 10.0).epsilon(1e-14));
  CHECK(term(b, "quad") == doctest::Approx(0.05 * (4.0 + 4.0 * ln_n)).epsilon(1e-14));
  CHECK(term(b, "shift_h") == doctest::Approx(4.0 * ln_n / 100.0).epsilon(1e-14));
  CHECK(term(b, "shift_z") == doctest::Approx(ln_n / 100.0).epsilon(1e-14));
  CHECK(term(b, "sqrt") ==
        doctest::Approx(2.0 * std::sqrt(2.0 * ln_n * std::log(ln_n / 0.1) / 100.0))
            .epsilon(1e-14));
  CHECK(term(b, "mixing") == doctest::Approx(2.0 * 2.0 / 100.0).epsilon(1e-15));
  CHECK(b.total == term_sum(b));

  SUBCASE("the lag is baked into the schedule, not read from params") {
    BoundParams q = p;
    q.tau = 9;  // ignored by design: the bound fixes tau = ceil(ln n) - 1
    CHECK(otb::bound_ewa(q) == b.total);
  }
  SUBCASE("certificate is mandatory") {
    BoundParams q = p;
    q.cert_r = 1.0;  // too slow to collapse the tail
    CHECK_THROWS_AS(otb::bound_ewa_terms(q), ValidationError);
    q.cert_r = 0.0;
    CHECK_THROWS_AS(otb::bound_ewa_terms(q), ValidationError);
  }
}

TEST_CASE("step-size-free variant evaluates at eta = 1/sqrt(n)") {
  BoundParams p = hand_params();
  p.cert_K = 2.0;
  p.cert_r = 1.5;
  BoundParams at_root = p;
  at_root.eta = 1.0 / std::sqrt(100.0);
  CHECK(otb::bound_etaind(p) == otb::bound_ewa(at_root));
  // and the choice of p.eta is irrelevant
  p.eta = 17.0;
  CHECK(otb::bound_etaind(p) == otb::bound_ewa(at_root));
}

TEST_CASE("degenerate log factors clamp to zero instead of going imaginary") {
  BoundParams p = hand_params();
  p.n = 2;  // ln 2 < delta' for large delta: ln(ln n / delta) < 0
  p.delta = 0.9;
  p.cert_K = 1.0;
  p.cert_r = 2.0;
  const TermBreakdown b = otb::bound_ewa_terms(p);
  CHECK(b.clamped);
  CHECK(term(b, "sqrt") == 0.0);
  CHECK(std::isfinite(b.total));
}

TEST_CASE("parameter validation lists every offending field") {
  BoundParams p = hand_params();
  p.n = 0;
  p.delta = 1.5;
  p.kappa_sum = -1.0;
  try {
    p.validate();
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("n must be") != std::string::npos);
    CHECK(msg.find("delta") != std::string::npos);
    CHECK(msg.find("kappa_sum") != std::string::npos);
  }

  SUBCASE("certificate requirements only apply when requested") {
    BoundParams q = hand_params();
    q.cert_K = 0.0;
    q.cert_r = 0.0;
    CHECK_NOTHROW(q.validate(false));
    CHECK_THROWS_AS(q.validate(true), ValidationError);
  }
  SUBCASE("mixing coefficients must stay in [0, 2]") {
    BoundParams q = hand_params();
    q.phi_tau1 = 2.5;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    q.phi_tau1 = 0.5;
    q.beta_tau1 = -0.1;
    CHECK_THROWS_AS(q.validate(), ValidationError);
  }
}

TEST_CASE("coverage counts successes over consecutive seeds") {
  // gen = seed parity, bound = 0.5: even seeds are covered
  auto parity = [](std::uint64_t seed) {
    return std::make_pair(seed % 2 == 0 ? 0.0 : 1.0, 0.5);
  };
  const otb::CoverageResult r = otb::coverage(parity, 10, 0);
  CHECK(r.total == 10);
  CHECK(r.covered == 5);
  CHECK(r.fraction == doctest::Approx(0.5).epsilon(1e-15));

  // ties count as covered (gen <= bound + 1e-12)
  auto tie = [](std::uint64_t) { return std::make_pair(0.5, 0.5); };
  CHECK(otb::coverage(tie, 4, 100).covered == 4);

  CHECK_THROWS_AS(otb::coverage(tie, 0, 0), ValidationError);
}

TEST_CASE("the a-priori bound shrinks along the sweep") {
  // with the shipped fast-mixing constants the bound at eta = 1/sqrt(n)
  // decreases roughly like (ln n)/sqrt(n) across n = 32..256
  BoundParams p;
  p.delta = 0.1;
  p.eta = 1.0;  // ignored by the eta-free variant
  p.g_h = 1.0;
  p.r_h = 6.0;
  p.g_z = 1.0;
  p.r_z = 1.0;
  p.b_ell = 7.0;
  p.kl_comparator = std::log(4.0);
  p.cert_K = std::exp(1.0);
  p.cert_r = 2.0;
  p.tau = 1;
  p.kappa_sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {32, 64, 128, 256}) {
    p.n = n;
    const double value = otb::bound_etaind(p);
    CHECK(value < prev);
    prev = value;
  }
}
