#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "qnet/kernels.hpp"
#include "qnet/rng.hpp"

using namespace qnet;
namespace kn = qnet::kernels;
using cplx = kn::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, Rng& rng) {
  std::vector<cplx> v(n);
  for (auto& z : v) z = rng.complex_gaussian();
  return v;
}

double rel_err(cplx a, cplx b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / scale;
}

} // namespace

TEST_CASE("scalar kernels match a direct formula") {
  Rng rng(1);
  const auto x = random_vec(37, rng);
  const auto y = random_vec(37, rng);
  const auto& s = kn::scalar_backend();
  cplx du = 0, dc = 0;
  double n2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    du += x[i] * y[i];
    dc += std::conj(x[i]) * y[i];
    n2 += std::norm(x[i]);
  }
  CHECK(rel_err(s.dotu(x.data(), y.data(), x.size()), du) < 1e-14);
  CHECK(rel_err(s.dotc(x.data(), y.data(), x.size()), dc) < 1e-14);
  CHECK(std::abs(s.sum_abs2(x.data(), x.size()) - n2) < 1e-12);
}

TEST_CASE("avx2 backend agrees with scalar on every op") {
  if (!kn::avx2_available()) {
    MESSAGE("AVX2 not available on this host; dispatch stays scalar");
    return;
  }
  const auto& sc = kn::scalar_backend();
  const auto& av = kn::avx2_backend();
  Rng rng(2);
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{3},
                        std::size_t{7}, std::size_t{64}, std::size_t{255}}) {
    const auto x = random_vec(n, rng);
    const auto y = random_vec(n, rng);
    const cplx alpha = rng.complex_gaussian();

    CHECK(rel_err(sc.dotu(x.data(), y.data(), n), av.dotu(x.data(), y.data(), n)) < 1e-13);
    CHECK(rel_err(sc.dotc(x.data(), y.data(), n), av.dotc(x.data(), y.data(), n)) < 1e-13);
    CHECK(std::abs(sc.sum_abs2(x.data(), n) - av.sum_abs2(x.data(), n)) <=
          1e-13 * (1.0 + std::abs(sc.sum_abs2(x.data(), n))));

    auto y1 = y, y2 = y;
    sc.axpy(alpha, x.data(), y1.data(), n);
    av.axpy(alpha, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(y1[i], y2[i]) < 1e-13);

    y1 = y;
    y2 = y;
    sc.axpy_conj(alpha, x.data(), y1.data(), n);
    av.axpy_conj(alpha, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(y1[i], y2[i]) < 1e-13);

    auto x1 = x, x2 = x;
    sc.scal(alpha, x1.data(), n);
    av.scal(alpha, x2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(x1[i], x2[i]) < 1e-13);
  }
}

TEST_CASE("runtime dispatch can be forced and reset") {
  const std::string active = kn::active().name;
  kn::force_backend(kn::scalar_backend());
  CHECK(std::string(kn::active().name) == "scalar");
  kn::reset_backend();
  CHECK(std::string(kn::active().name) == active);
}

TEST_CASE("dotc against itself is the squared norm") {
  Rng rng(3);
  const auto x = random_vec(129, rng);
  const cplx d = kn::dotc(x.data(), x.data(), x.size());
  CHECK(std::abs(d.imag()) < 1e-12);
  CHECK(std::abs(d.real() - kn::sum_abs2(x.data(), x.size())) < 1e-11);
}
