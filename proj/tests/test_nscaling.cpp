#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "phd/nscaling.hpp"

using namespace phd;
using cplx = std::complex<double>;

namespace {

// direct enumeration over all N^k emitter assignments
cplx brute_force(int k, int n, const MomentMap& moments) {
  cplx total = 0.0;
  std::vector<int> idx(k, 0);
  while (true) {
    cplx prod = 1.0;
    for (int e = 0; e < n; ++e) {
      std::vector<int> slots;
      for (int s = 0; s < k; ++s)
        if (idx[s] == e) slots.push_back(s);
      if (!slots.empty()) prod *= moments.at(slots);
    }
    total += prod;
    int j = k - 1;
    while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
    if (j < 0) break;
  }
  return total;
}

MomentMap random_moments(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MomentMap moments;
  for (const auto& p : slot_partitions(k))
    for (const auto& cls : p.classes)
      if (!moments.count(cls)) moments[cls] = {u(rng), u(rng)};
  return moments;
}

}  // namespace

TEST_CASE("falling factorial") {
  CHECK(falling_factorial(5, 2) == 20.0);
  CHECK(falling_factorial(7, 4) == 7.0 * 6 * 5 * 4);
  CHECK(falling_factorial(3, 4) == 0.0);
  CHECK(falling_factorial(1, 1) == 1.0);
}

TEST_CASE("two-slot expansion matches the counting-operator split") {
  const auto terms = expand_moment(2, 6.0);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].multiplicity == 6.0);
  REQUIRE(terms[0].partition.classes.size() == 1);
  CHECK(terms[0].partition.classes[0] == std::vector<int>{0, 1});
  CHECK(terms[1].multiplicity == 30.0);
  REQUIRE(terms[1].partition.classes.size() == 2);
}

TEST_CASE("four-slot partitions come in the 1/4/3/6/1 shape groups") {
  const auto parts = slot_partitions(4);
  REQUIRE(parts.size() == 15);  // Bell number B4
  auto shape = [](const MomentPartition& p) {
    std::vector<int> s;
    for (const auto& c : p.classes) s.push_back(static_cast<int>(c.size()));
    std::sort(s.rbegin(), s.rend());
    return s;
  };
  CHECK(shape(parts[0]) == std::vector<int>{4});
  for (int j = 1; j <= 4; ++j) CHECK(shape(parts[j]) == std::vector<int>{3, 1});
  for (int j = 5; j <= 7; ++j) CHECK(shape(parts[j]) == std::vector<int>{2, 2});
  for (int j = 8; j <= 13; ++j) CHECK(shape(parts[j]) == std::vector<int>{2, 1, 1});
  CHECK(shape(parts[14]) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("multiplicities sum to N^k") {
  for (int k = 2; k <= 4; ++k) {
    const double n = 7.0;
    double total = 0.0;
    for (const auto& t : expand_moment(k, n)) total += t.multiplicity;
    CHECK(total == doctest::Approx(std::pow(n, k)).epsilon(1e-14));
  }
}

TEST_CASE("expansion equals direct enumeration for random moments") {
  std::mt19937_64 rng(3);
  for (int k = 2; k <= 4; ++k)
    for (int n = 2; n <= 5; ++n)
      for (int draw = 0; draw < 25; ++draw) {
        const auto moments = random_moments(k, rng);
        const cplx fast = evaluate_moment(expand_moment(k, n), moments);
        const cplx brute = brute_force(k, n, moments);
        CHECK(std::abs(fast - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
      }
}

TEST_CASE("operator order inside an equality class is preserved") {
  // non-commuting random matrices as synthetic single-emitter operators
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  const int k = 4, dim = 3;
  std::vector<Eigen::MatrixXcd> ops(k);
  for (auto& a : ops) {
    a.resize(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
  v.normalize();

  MomentMap moments;
  for (const auto& p : slot_partitions(k))
    for (const auto& cls : p.classes)
      if (!moments.count(cls)) {
        Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(dim, dim);
        for (int s : cls) prod = prod * ops[s];
        moments[cls] = v.dot(prod * v);
      }

  for (int n = 2; n <= 4; ++n) {
    const cplx fast = evaluate_moment(expand_moment(k, n), moments);
    const cplx brute = brute_force(k, n, moments);
    CHECK(std::abs(fast - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
  }
}

TEST_CASE("N=1 keeps only the fully-equal class") {
  const auto moments = [] {
    MomentMap m;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& p : slot_partitions(4))
      for (const auto& cls : p.classes)
        if (!m.count(cls)) m[cls] = {u(rng), u(rng)};
    return m;
  }();
  const cplx value = evaluate_moment(expand_moment(4, 1.0), moments);
  CHECK(std::abs(value - moments.at({0, 1, 2, 3})) < 1e-15);
}

TEST_CASE("vanishing means leave only fully-connected classes") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MomentMap moments;
  for (const auto& p : slot_partitions(4))
    for (const auto& cls : p.classes)
      if (!moments.count(cls))
        moments[cls] = cls.size() == 1 ? cplx(0.0, 0.0) : cplx(u(rng), u(rng));

  const double n = 4.0;
  const cplx value = evaluate_moment(expand_moment(4, n), moments);
  // surviving pieces: the single 4-slot class and the three 2+2 pairings
  cplx expect = n * moments.at({0, 1, 2, 3});
  expect += n * (n - 1) *
            (moments.at({0, 1}) * moments.at({2, 3}) + moments.at({0, 2}) * moments.at({1, 3}) +
             moments.at({0, 3}) * moments.at({1, 2}));
  CHECK(std::abs(value - expect) < 1e-14);
}

TEST_CASE("missing tuple raises") {
  MomentMap empty;
  CHECK_THROWS(evaluate_moment(expand_moment(2, 2.0), empty));
  CHECK_THROWS(expand_moment(5, 2.0));
  CHECK_THROWS(expand_moment(1, 2.0));
}
