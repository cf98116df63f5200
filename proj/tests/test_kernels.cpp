#include "waist/cloud_index.hpp"
#include "waist/conical.hpp"
#include "waist/kernels.hpp"
#include "waist/rng.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>

using namespace waist;

namespace {

std::vector<double> gaussian_cloud(int d, std::size_t count, std::uint64_t seed) {
  std::vector<double> pts(count * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, 0, i);
    std::normal_distribution<double> normal;
    for (int c = 0; c < d; ++c) pts[i * d + c] = normal(rng);
  }
  return pts;
}

double brute_nearest(const Norm& norm, const std::vector<double>& cloud, std::span<const double> x) {
  const auto d = static_cast<std::size_t>(norm.dim());
  double best = INFINITY;
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < cloud.size() / d; ++i) {
    for (std::size_t c = 0; c < d; ++c) diff[c] = x[c] - cloud[i * d + c];
    best = std::min(best, norm(diff));
  }
  return best;
}

}  // namespace

TEST_CASE("counter rng is a pure function of its key") {
  CounterRng a(1, 2, 3), b(1, 2, 3), c(1, 2, 4), e(1, 3, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != e());
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    CHECK(a.uniform_open0() > 0.0);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("kd-tree queries agree with brute force") {
  const std::vector<Norm> norms{Norm::euclidean(3), Norm::lp(1.5, 3), Norm::lp(4.0, 3),
                                Norm::parse("reg:lp:4:3:w=0.1:d=0.01")};
  const auto cloud = gaussian_cloud(3, 700, 1);
  const auto probes = gaussian_cloud(3, 200, 2);
  for (const auto& norm : norms) {
    CAPTURE(norm.to_string());
    const CloudIndex index(norm, cloud);
    CHECK(index.size() == 700);
    for (std::size_t i = 0; i < 200; ++i) {
      const std::span<const double> x(probes.data() + 3 * i, 3);
      const double ref = brute_nearest(norm, cloud, x);
      CHECK(index.nearest_distance(x) == doctest::Approx(ref).epsilon(1e-12));
      CHECK(index.any_within(x, ref * 1.000001));
      CHECK_FALSE(index.any_within(x, ref * 0.999999));
    }
  }
}

TEST_CASE("kd-tree with duplicate points and a single point") {
  std::vector<double> pts(3 * 100, 0.5);
  const CloudIndex index(Norm::euclidean(3), pts);
  const double x[3] = {0.5, 0.5, 1.5};
  CHECK(index.nearest_distance(x) == doctest::Approx(1.0));
  const CloudIndex one(Norm::euclidean(3), {1.0, 0.0, 0.0});
  CHECK(one.any_within(std::span<const double>(x, 3), 2.0));
}

TEST_CASE("serial and OpenMP kernels return identical results for any thread count") {
  const Norm lp = Norm::lp(1.5, 4);
  const std::size_t count = 20000;
  std::vector<double> serial(count * 4), parallel(count * 4);
  kernels::serial::fill_conical(lp, ConicalMethod::exact, 11, streams::samples, 5, count, serial);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    kernels::omp::fill_conical(lp, ConicalMethod::exact, 11, streams::samples, 5, count, parallel);
    CHECK(serial == parallel);
  }
  kernels::serial::fill_conical(lp, ConicalMethod::rejection, 11, streams::samples, 0, 2000, serial);
  kernels::omp::fill_conical(lp, ConicalMethod::rejection, 11, streams::samples, 0, 2000, parallel);
  CHECK(std::equal(serial.begin(), serial.begin() + 8000, parallel.begin()));

  const Norm e = Norm::euclidean(4);
  const CloudIndex index(e, gaussian_cloud(4, 500, 3));
  const auto pts = gaussian_cloud(4, 5000, 4);
  const kernels::Indicator first_positive = [](std::span<const double> x) { return x[0] > 0.5; };
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    CHECK(kernels::omp::count_near(index, pts, 0.4) == kernels::serial::count_near(index, pts, 0.4));
    CHECK(kernels::omp::count_near(index, pts, 0.4, &first_positive) ==
          kernels::serial::count_near(index, pts, 0.4, &first_positive));
    CHECK(kernels::omp::count_conical_if(lp, ConicalMethod::exact, 2, 0, 30000, first_positive) ==
          kernels::serial::count_conical_if(lp, ConicalMethod::exact, 2, 0, 30000, first_positive));
  }
  omp_set_num_threads(saved);
}

TEST_CASE("ball-uniform draws stay inside the unit ball") {
  const Norm n = Norm::parse("reg:lp:1.5:3:w=0.05:d=0.01");
  std::vector<double> x(3);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    kernels::draw_ball_uniform(n, 1, streams::ball, i, x);
    CHECK(n(x) <= 1.0);
  }
}
