#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mtp2/certify.hpp"
#include "mtp2/general_mle.hpp"

using namespace mtp2;
using testutil::example23_counts;
using testutil::example23_mle_182;
using testutil::moussouris_mle_table;
using testutil::moussouris_sample;

namespace {

std::vector<double> log_table(const ProbTable& p) {
  std::vector<double> theta(p.size(), 0.0);
  for (state_t s = 0; s < p.size(); ++s) theta[s] = std::log(p[s]) - std::log(p[0]);
  return theta;
}

}  // namespace

TEST_CASE("elementary imsets") {
  const Imset u = elementary_imset(2, 0, 1, 0);
  CHECK(u.entries.at(0b00) == 1);
  CHECK(u.entries.at(0b11) == 1);
  CHECK(u.entries.at(0b01) == -1);
  CHECK(u.entries.at(0b10) == -1);

  CHECK(elementary_imsets(3).size() == 6);
  for (const Imset& v : elementary_imsets(4)) {
    CHECK(v.entry_sum() == 0);
    CHECK(v.entries.size() == 4);
  }
}

TEST_CASE("cover-pair generators reduce to the elementary family on full support") {
  for (int d = 2; d <= 4; ++d) {
    StateSet full;
    full.dim = d;
    for (state_t s = 0; s < state_count(d); ++s) full.members.insert(s);
    const auto a = cover_pair_imsets(full);
    const auto b = elementary_imsets(d);
    REQUIRE(a.size() == b.size());
  }

  // the 4-point sublattice {0, {1,2}, {3}, {1,2,3}} has exactly one
  // incomparable cover pair and hence one generator
  StateSet l;
  l.dim = 3;
  l.members = {0b000, 0b011, 0b100, 0b111};
  const auto gens = cover_pair_imsets(l);
  REQUIRE(gens.size() == 1);
  CHECK(gens[0].entries.at(0b000) == 1);
  CHECK(gens[0].entries.at(0b111) == 1);
  CHECK(gens[0].entries.at(0b011) == -1);
  CHECK(gens[0].entries.at(0b100) == -1);
}

TEST_CASE("supermodularity values") {
  // product distributions are modular: every value vanishes
  const ProbTable ind = independence_table({0.3, -0.5, 0.1});
  for (double v : supermodularity_values(log_table(ind), 3)) CHECK(std::abs(v) < 1e-12);

  // the d=3 worked example: exactly two active constraints
  std::vector<double> sigma = example23_mle_182();
  ProbTable p3 = ProbTable::from_weights(3, std::move(sigma));
  const std::vector<double> vals = supermodularity_values(log_table(p3), 3);
  int zeros = 0, positives = 0;
  for (double v : vals) {
    if (std::abs(v) < 1e-12)
      ++zeros;
    else {
      CHECK(v > 0.0);
      ++positives;
    }
  }
  CHECK(zeros == 2);
  CHECK(positives == 4);

  // the 4-cycle example: 12 active of 24
  const std::vector<double> vals4 = supermodularity_values(log_table(moussouris_mle_table()), 4);
  zeros = 0;
  positives = 0;
  for (double v : vals4) {
    if (std::abs(v) < 1e-12)
      ++zeros;
    else {
      CHECK(v > 0.0);
      ++positives;
    }
  }
  CHECK(zeros == 12);
  CHECK(positives == 12);
}

TEST_CASE("supermodularity agrees with the table-level check") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 4);  // 2..5
    std::vector<double> theta(state_count(d));
    for (double& t : theta) t = u(rng);
    theta[0] = 0.0;
    std::vector<double> w(theta.size());
    for (std::size_t s = 0; s < w.size(); ++s) w[s] = std::exp(theta[s]);
    const ProbTable p = ProbTable::from_weights(d, std::move(w));
    const std::vector<double> vals = supermodularity_values(theta, d);
    const bool feasible = *std::min_element(vals.begin(), vals.end()) >= 0.0;
    CHECK(feasible == is_mtp2(p, 1e-12).ok);
  }
}

TEST_CASE("cone membership") {
  // zero vector: in the cone with zero coefficients
  CHECK(cone_membership(std::vector<double>(8, 0.0), 3).residual < 1e-12);

  // the published decomposition of the d=3 example:
  // 16/182 * u_{1,3|{2}} + 7/182 * u_{1,3|empty}
  std::vector<double> v(8, 0.0);
  const Imset a = elementary_imset(3, 0, 2, 0b010);
  const Imset b = elementary_imset(3, 0, 2, 0b000);
  for (const auto& [s, val] : a.entries) v[s] += 16.0 / 182.0 * val;
  for (const auto& [s, val] : b.entries) v[s] += 7.0 / 182.0 * val;
  const ConeFit fit3 = cone_membership(v, 3);
  CHECK(fit3.residual < 1e-10);
  // the recovered combination reproduces v
  std::vector<double> rec(8, 0.0);
  const auto gens = elementary_imsets(3);
  for (std::size_t k = 0; k < gens.size(); ++k)
    for (const auto& [s, val] : gens[k].entries) rec[s] += fit3.coefficients[k] * val;
  for (int s = 0; s < 8; ++s) CHECK(rec[s] == doctest::Approx(v[s]).epsilon(1e-9));

  // the negation of a generator is not in the cone; at d=2 the distance is
  // the generator norm itself
  std::vector<double> neg(4, 0.0);
  for (const auto& [s, val] : elementary_imset(2, 0, 1, 0).entries) neg[s] = -val;
  const ConeFit fit2 = cone_membership(neg, 2);
  CHECK(fit2.residual == doctest::Approx(2.0));
  CHECK(fit2.coefficients[0] == doctest::Approx(0.0));
}

TEST_CASE("random nonnegative combinations sit inside the cone") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 3);  // 2..4
    const auto gens = elementary_imsets(d);
    std::vector<double> v(state_count(d), 0.0);
    for (const Imset& g : gens) {
      const double c = u(rng) < 0.5 ? 0.0 : u(rng);
      for (const auto& [s, val] : g.entries) v[s] += c * val;
    }
    CHECK(cone_membership(v, d).residual < 1e-10);
  }
}

TEST_CASE("general certificate accepts the published estimates") {
  // d = 3 worked example
  {
    std::vector<double> sigma = example23_mle_182();
    const ProbTable p = ProbTable::from_weights(3, std::move(sigma));
    const KktCertificate cert = certify_general(p, example23_counts());
    CHECK(cert.pass);
    CHECK(cert.dual_residual < 1e-8);
    CHECK(cert.primal_residual >= -1e-12);
  }
  // 4-cycle example
  {
    const KktCertificate cert = certify_general(moussouris_mle_table(), moussouris_sample());
    CHECK(cert.pass);
  }
  // an empirical distribution that is itself totally positive with full
  // support is certified with a vanishing dual residual
  {
    const SampleCounts c = testutil::integer_ising_counts(3, {{0, 1}, {1, 2}}, {2, 3}, {1, 2, 1});
    const KktCertificate cert = certify_general(c.empirical(), c);
    CHECK(cert.pass);
    CHECK(cert.dual_residual < 1e-10);
  }
}

TEST_CASE("general certificate rejects non-optimal tables") {
  // uniform is not the MLE for the 8-point sample
  const KktCertificate cert = certify_general(ProbTable::uniform(4), moussouris_sample());
  CHECK_FALSE(cert.pass);

  // wrong support fails the support test
  const KktCertificate cert2 = certify_general(moussouris_sample().empirical(), moussouris_sample());
  CHECK_FALSE(cert2.pass);
  CHECK_FALSE(cert2.support_ok);
}

TEST_CASE("quadratic-family certificate") {
  // the cycle fit of the 8-point sample passes, with exact slackness on the
  // zeroed edge
  const SampleCounts c = moussouris_sample();
  const Graph g = testutil::four_cycle();
  const FitResult res = fit(c, g, 1e-10);
  const Moments data = moments_from_counts(c);
  const KktCertificate cert = certify_ising(res, data, g);
  CHECK(cert.pass);
  CHECK(res.params.j(0, 3) == 0.0);

  // independence data: trivial pass
  const SampleCounts ind = SampleCounts::from_observations(3, {0b001, 0b010, 0b100});
  const FitResult res2 = fit(ind, Graph::complete(3), 1e-10);
  const KktCertificate cert2 = certify_ising(res2, moments_from_counts(ind), Graph::complete(3));
  CHECK(cert2.pass);

  // data generated from an exact nonnegative-interaction family member
  const SampleCounts ex = testutil::integer_ising_counts(4, {{0, 1}, {0, 2}, {2, 3}}, {2, 4, 3},
                                                         {1, 1, 1, 1});
  const FitResult res3 = fit(ex, Graph::complete(4), 1e-11);
  const KktCertificate cert3 = certify_ising(res3, moments_from_counts(ex), Graph::complete(4));
  CHECK(cert3.pass);
  CHECK(cert3.moment_residual < 1e-8);

  // a deliberately wrong result is rejected: refit means but corrupt J
  FitResult bad = fit(ex, Graph::complete(4), 1e-11);
  bad.params.j(0, 1) = -0.2;
  bad.params.j(1, 0) = -0.2;
  CHECK_FALSE(certify_ising(bad, moments_from_counts(ex), Graph::complete(4)).pass);
}
