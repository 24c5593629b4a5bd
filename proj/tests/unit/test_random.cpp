#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dynmcda/des/random.hpp"

using namespace dynmcda::des;
using Catch::Approx;

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

template <class Draw>
Moments moments(int n, Draw&& draw) {
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    ss += x * x;
  }
  const double m = s / n;
  return {m, std::sqrt((ss - n * m * m) / (n - 1))};
}

}  // namespace

TEST_CASE("streams are reproducible and distinct", "[random]") {
  RandomStream a(42, 1), b(42, 1), c(42, 2), d(43, 1);
  std::vector<std::uint64_t> xa, xb, xc, xd;
  for (int i = 0; i < 64; ++i) {
    xa.push_back(a.next_u64());
    xb.push_back(b.next_u64());
    xc.push_back(c.next_u64());
    xd.push_back(d.next_u64());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
  CHECK(xa != xd);
  CHECK(derive_seed(1, 2, 3) == derive_seed(derive_seed(1, 2), 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("uniform draws stay in range", "[random]") {
  RandomStream s(5, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = s.uniform(0.9, 1.1);
    REQUIRE(v >= 0.9);
    REQUIRE(v <= 1.1);
  }
}

TEST_CASE("truncated normal service times", "[random]") {
  RandomStream s(2024, 7);
  CHECK(sample_normal_positive(s, 80.0, 0.0) == 80.0);
  const auto lorry = moments(100000, [&] { return sample_normal_positive(s, 80.0, 2.0); });
  CHECK(lorry.mean == Approx(80.0).margin(0.05));
  const auto car = moments(100000, [&] { return sample_normal_positive(s, 27.0, 2.0); });
  CHECK(car.sd == Approx(2.0).margin(0.05));
  // Truncation at zero shifts the mean of N(0.5, 1) to 0.5 + phi(0.5)/Phi(0.5).
  const double phi = std::exp(-0.125) / std::sqrt(2.0 * M_PI);
  const double Phi = 0.5 * std::erfc(-0.5 / std::sqrt(2.0));
  const auto cut = moments(100000, [&] { return sample_normal_positive(s, 0.5, 1.0); });
  CHECK(cut.mean == Approx(0.5 + phi / Phi).margin(0.01));
}

TEST_CASE("normal sampler errors", "[random][errors]") {
  RandomStream s(1, 1);
  CHECK_THROWS_AS(sample_normal_positive(s, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_normal_positive(s, -5.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_normal_positive(s, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("exponential sampling", "[random]") {
  RandomStream s(99, 3);
  const auto arrivals = moments(100000, [&] { return sample_exponential(s, 4.57 / 60.0); });
  CHECK(arrivals.mean == Approx(60.0 / 4.57).margin(0.2));
  const auto unit = moments(100000, [&] { return sample_exponential(s, 1.0); });
  CHECK(unit.mean == Approx(1.0).margin(0.02));
  CHECK(exponential_quantile(0.0, 3.0) == 0.0);
  CHECK(exponential_quantile(1.0 - std::exp(-2.0), 1.0) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(sample_exponential(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_exponential(s, -1.0), std::invalid_argument);
}
