#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "beccert/bounds.hpp"
#include "beccert/certify.hpp"
#include "beccert/json_io.hpp"
#include "doctest.h"

using namespace beccert;

namespace {

ScanSettings short_general() {
  auto s = ScanSettings::general_defaults();
  s.eps_lo = 0.6;
  return s;
}

}  // namespace

TEST_SUITE("certify") {
  TEST_CASE("optimizer reaches the extremal values") {
    const auto g = optimize_params(General{0.5092}, 2.4852, 5.9508);
    CHECK(g.upper() <= 0.5606);
    CHECK(g.u0 <= g.u);
    const auto i = optimize_params(IidFinite{0.3536, 8}, 2.6157, 8.9115);
    CHECK(i.upper() <= 0.4785);
    CHECK(i.u0 <= i.u);
  }

  TEST_CASE("optimizer never ascends") {
    const BoundMode modes[] = {General{0.9}, IidFinite{0.5, 4}, IidTail{0.3, 30}};
    for (const auto& mode : modes) {
      for (auto [u0, u] : {std::pair{1.0, 2.0}, std::pair{2.5, 6.0}, std::pair{4.0, 4.0}}) {
        PrawitzParams p;
        p.u0 = u0;
        p.u = u;
        const double seed = prawitz_rhs(mode, p).upper();
        const auto r = optimize_params(mode, u0, u);
        CHECK(r.upper() <= seed);
        CHECK(r.u0 > 0.0);
        CHECK(r.u0 <= r.u);
      }
    }
  }

  TEST_CASE("optimizer is insensitive to the seed") {
    const auto a = optimize_params(General{0.5092}, 2.0, 5.0);
    const auto b = optimize_params(General{0.5092}, 3.0, 7.0);
    CHECK(std::abs(a.upper() - b.upper()) < 2e-4);
    CHECK(a.upper() <= 0.5606);
  }

  TEST_CASE("target 0.50 is not certifiable") {
    auto s = ScanSettings::general_defaults();
    s.target = 0.50;
    s.eps_hi = trivial_regime_start(0.50);
    bool failed = false;
    try {
      certified_scan_general(s);
    } catch (const CertificationFailure& f) {
      failed = true;
      // Steps shrink to nothing where D first reaches 0.50, well before the
      // 0.5605 peak at 0.5092.
      CHECK(f.entry().epsilon >= 0.5092);
      CHECK(f.entry().epsilon <= 1.0);
      CHECK(f.entry().upper() >= 0.50 * (1.0 - 1e-6));
    }
    CHECK(failed);
  }

  TEST_CASE("tiny segment gives a single entry") {
    auto s = ScanSettings::general_defaults();
    s.eps_lo = s.eps_hi - 0.01;
    const auto c = certified_scan_general(s);
    REQUIRE(c.entries.size() == 1);
    CHECK(c.entries[0].epsilon == s.eps_hi);
    CHECK(c.entries[0].bridged_to == s.eps_lo);
  }

  TEST_CASE("short general scan covers its segment soundly") {
    auto c = certified_scan_general(short_general());
    REQUIRE_FALSE(c.entries.empty());
    CHECK(c.entries.front().epsilon == c.eps_hi);
    CHECK(c.entries.back().bridged_to == c.eps_lo);
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
      const auto& e = c.entries[i];
      CHECK(e.bridged_to < e.epsilon);
      CHECK(e.bridged_bound() <= c.target);
      CHECK(e.bridge_upper <= c.target);
      CHECK(e.u0 <= e.u);
      if (i > 0) CHECK(e.epsilon == c.entries[i - 1].bridged_to);
    }
    const auto rep = stitch_regimes(c);
    CHECK(rep.coverage);
    CHECK(rep.soundness);
    CHECK(rep.large_eps);
    // The closed-form regime does not reach eps = 0.6.
    CHECK_FALSE(rep.small_eps);
    CHECK_FALSE(c.stitched);
  }

  TEST_CASE("stitching detects broken covers") {
    auto c = certified_scan_general(short_general());
    REQUIRE(c.entries.size() >= 2);
    auto gap = c;
    gap.entries[1].epsilon = std::nextafter(gap.entries[1].epsilon, 0.0);
    CHECK_FALSE(stitch_regimes(gap).coverage);
    auto low = c;
    low.target = 0.3;
    CHECK_FALSE(stitch_regimes(low).soundness);
  }

  TEST_CASE("scans are deterministic") {
    auto s = short_general();
    const auto a = certified_scan_general(s);
    s.parallelism = 4;
    const auto b = certified_scan_general(s);
    CHECK(certificate_to_json(a).dump() == certificate_to_json(b).dump());
    CHECK(a.fingerprint == fingerprint(a.config));
    CHECK(a.fingerprint.size() == 16);
    auto t = short_general();
    t.target = 0.57;
    CHECK(settings_config(t, "general") != a.config);
  }

  TEST_CASE("i.i.d. point at 1/sqrt(8) peaks at n = 8") {
    const auto e = evaluate_iid_point(0.3536, 30, {}, ScanSettings::iid_defaults());
    REQUIRE_FALSE(e.n_detail.empty());
    CHECK(e.n_detail.begin()->first == 8);
    const auto worst = std::max_element(e.n_detail.begin(), e.n_detail.end(), [](const auto& x, const auto& y) {
      return x.second.upper() < y.second.upper();
    });
    CHECK(worst->first == 8);
    CHECK(worst->second.upper() <= 0.4785);
    REQUIRE(e.tail.has_value());
    CHECK(e.tail->n >= 30);
    CHECK(e.upper() >= worst->second.upper());
  }

  TEST_CASE("i.i.d. sweep starts at n = 1 above eps = 1") {
    auto s = ScanSettings::iid_defaults();
    const auto e = evaluate_iid_point(1.5, 4, {}, s);
    REQUIRE_FALSE(e.n_detail.empty());
    CHECK(e.n_detail.begin()->first == 1);
    CHECK_THROWS_AS(evaluate_iid_point(0.0, 30, {}, s), DomainError);
  }

  TEST_CASE("i.i.d. scan rejects m < 2 and fails at target 0.40") {
    auto s = ScanSettings::iid_defaults();
    s.m = 1;
    CHECK_THROWS_AS(certified_scan_iid(s), DomainError);
    s = ScanSettings::iid_defaults();
    s.target = 0.40;
    s.eps_hi = trivial_regime_start(0.40);
    CHECK_THROWS_AS(certified_scan_iid(s), CertificationFailure);
    // The closed-form regime alone already exceeds 0.40.
    CHECK(*small_eps_bound_iid(0.037) > 0.40);
  }

  TEST_CASE("trivial regime starts where 1/eps <= target") {
    for (double target : {0.4, 0.4785, 0.5, 0.5606, 0.9}) {
      const double x = trivial_regime_start(target);
      CHECK(1.0 / x <= target);
      CHECK(1.0 / std::nextafter(x, 0.0) > target);
      CHECK(std::abs(x * target - 1.0) < 1e-15);
    }
    CHECK_THROWS_AS(trivial_regime_start(0.0), DomainError);
  }

  TEST_CASE("certificate JSON round trip and CSV") {
    auto c = certified_scan_general(short_general());
    stitch_regimes(c);
    const auto j = certificate_to_json(c);
    CHECK(j.at("schema") == "v1");
    CHECK(j.at("small_eps_witness").at("at_eps_lo").is_null());
    const auto back = certificate_from_json(j);
    CHECK(certificate_to_json(back).dump() == j.dump());
    CHECK(back.entries.size() == c.entries.size());
    CHECK(std::isinf(back.small_eps->at_eps_lo));

    std::istringstream csv(certificate_to_csv(c));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "epsilon,u0,u,dstar,margin,certified_from");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
      if (!line.empty()) ++rows;
    }
    CHECK(rows == c.entries.size());
  }
}
