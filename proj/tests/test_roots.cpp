#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pvgrid/roots.hpp"

using namespace pvgrid::roots;
using Catch::Matchers::WithinAbs;

TEST_CASE("bisection finds sqrt 2", "[roots]") {
  const auto r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14, 0.0);
  CHECK(r.converged);
  CHECK_THAT(r.x, WithinAbs(std::sqrt(2.0), 1e-13));
}

TEST_CASE("bisection rejects an unbracketed interval", "[roots]") {
  const auto r = bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12, 0.0);
  CHECK_FALSE(r.converged);
}

TEST_CASE("newton with bisection fallback", "[roots]") {
  // atan drives plain Newton out of its basin from x0 = 3.
  auto f = [](double x) { return std::atan(x); };
  auto df = [](double x) { return 1.0 / (1.0 + x * x); };
  const auto r = newton_bisect(f, df, -5.0, 4.0, 3.0, 1e-14);
  CHECK(r.converged);
  CHECK_THAT(r.x, WithinAbs(0.0, 1e-12));
  CHECK(r.iterations <= 100);
}

TEST_CASE("golden section on a smooth peak", "[roots]") {
  const auto r = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-10);
  CHECK(r.converged);
  CHECK_THAT(r.x, WithinAbs(0.3, 1e-9));
}
