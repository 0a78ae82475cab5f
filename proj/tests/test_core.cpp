#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "spherimax/core.hpp"
#include "spherimax/detail/format.hpp"
#include "spherimax/detail/parallel.hpp"
#include "spherimax/detail/rng.hpp"

using namespace spherimax;

TEST_CASE("norm_sq sums squares and rejects non-finite coordinates") {
  Vector v(3);
  v << 1.0, -2.0, 2.0;
  CHECK(norm_sq(v) == doctest::Approx(9.0));
  v[1] = std::nan("");
  CHECK_THROWS_AS(norm_sq(v), Error);
  v[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(norm_sq(v), Error);
}

TEST_CASE("project_to_sphere lands on the squared-norm-r sphere") {
  Vector v(2);
  v << 3.0, 4.0;
  const Vector p = project_to_sphere(v, 4.0);
  CHECK(p.squaredNorm() == doctest::Approx(4.0));
  CHECK(p[0] / p[1] == doctest::Approx(0.75));

  Vector zero = Vector::Zero(2);
  CHECK_THROWS_AS(project_to_sphere(zero, 1.0), Error);
  CHECK_THROWS_AS(project_to_sphere(v, -1.0), Error);
}

TEST_CASE("lex_less orders coordinate by coordinate") {
  Vector a(2), b(2);
  a << 1.0, 5.0;
  b << 1.0, 6.0;
  CHECK(lex_less(a, b));
  CHECK(!lex_less(b, a));
  CHECK(!lex_less(a, a));
}

TEST_CASE("ExtendedReal orders finite values below infinity") {
  const ExtendedReal two = ExtendedReal::finite(2.0);
  const ExtendedReal inf = ExtendedReal::infinity();
  CHECK(two < inf);
  CHECK(!(inf < two));
  CHECK(!(inf < inf));
  CHECK(1.9 < two);
  CHECK(two < 2.1);
  CHECK(two.is_finite());
  CHECK(!inf.is_finite());
  CHECK(two.value() == 2.0);
  CHECK_THROWS_AS(inf.value(), Error);
  CHECK(inf.str() == "inf");
  CHECK(two.str() == "2");
}

TEST_CASE("Tolerances validation rejects nonpositive entries") {
  Tolerances good;
  CHECK_NOTHROW(good.validate());

  Tolerances bad = good;
  bad.tol_opt = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = good;
  bad.tol_res = -1e-6;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = good;
  bad.grid_points = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = good;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("error carries its code and a named prefix") {
  const Error e(Errc::out_of_range, "probe");
  CHECK(e.code() == Errc::out_of_range);
  CHECK(std::string(e.what()).find("probe") != std::string::npos);
  CHECK(std::string(e.what()).find(errc_name(Errc::out_of_range)) == 0);
}

TEST_CASE("derive_seed separates streams and indices deterministically") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 1; stream <= 8; ++stream) {
    for (std::uint64_t idx = 0; idx < 8; ++idx) {
      seen.insert(detail::derive_seed(42, stream, idx));
    }
  }
  CHECK(seen.size() == 64);
  CHECK(detail::derive_seed(42, 3, 5) == detail::derive_seed(42, 3, 5));
  CHECK(detail::derive_seed(42, 3, 5) != detail::derive_seed(43, 3, 5));
}

TEST_CASE("random sphere and ball points respect their constraints") {
  auto eng = detail::make_engine(7);
  for (int i = 0; i < 50; ++i) {
    const Vector s = detail::random_sphere_point(eng, 3, 2.5);
    CHECK(s.squaredNorm() == doctest::Approx(2.5));
    const Vector b = detail::random_ball_point(eng, 3, 2.5);
    CHECK(b.squaredNorm() <= 2.5 + 1e-12);
  }
}

TEST_CASE("parallel_for covers every index exactly once and rethrows") {
  std::vector<std::atomic<int>> hits(257);
  detail::parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(detail::parallel_for(
                      8,
                      [](std::size_t i) {
                        if (i == 3) throw Error(Errc::precondition, "boom");
                      }),
                  Error);
}

TEST_CASE("nested parallel_for runs serially without deadlock") {
  std::atomic<int> total{0};
  detail::parallel_for(4, [&](std::size_t) {
    detail::parallel_for(4, [&](std::size_t) { total.fetch_add(1); });
  });
  CHECK(total.load() == 16);
}

TEST_CASE("sig12 keeps 12 significant digits and round-trips") {
  CHECK(detail::sig12(1.0) == "1");
  CHECK(detail::sig12(0.25) == "0.25");
  CHECK(detail::sig12(4.0 - 2.0 * std::sqrt(3.0)) == "0.535898384862");
  const double x = 1.0 / 3.0;
  CHECK(std::abs(std::stod(detail::sig12(x)) - x) <= 1e-12 * std::abs(x));
}
