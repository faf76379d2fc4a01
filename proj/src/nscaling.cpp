#include "phd/nscaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phd {

double falling_factorial(double n, int c) {
  if (n < static_cast<double>(c) - 0.5) return 0.0;
  double r = 1.0;
  for (int j = 0; j < c; ++j) r *= (n - j);
  return r;
}

namespace {

// descending block sizes, for the case ordering
std::vector<int> shape_of(const MomentPartition& p) {
  std::vector<int> s;
  s.reserve(p.classes.size());
  for (const auto& c : p.classes) s.push_back(static_cast<int>(c.size()));
  std::sort(s.begin(), s.end(), std::greater<int>());
  return s;
}

}  // namespace

std::vector<MomentPartition> slot_partitions(int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("slot_partitions: k must be in 1..4");
  // enumerate restricted-growth strings
  std::vector<MomentPartition> out;
  std::vector<int> rgs(k, 0);
  while (true) {
    int n_classes = *std::max_element(rgs.begin(), rgs.end()) + 1;
    MomentPartition p;
    p.classes.assign(n_classes, {});
    for (int s = 0; s < k; ++s) p.classes[rgs[s]].push_back(s);
    out.push_back(std::move(p));

    // next RGS
    int j = k - 1;
    for (; j >= 1; --j) {
      int cap = *std::max_element(rgs.begin(), rgs.begin() + j) + 1;
      if (rgs[j] < cap) break;
    }
    if (j < 1) break;
    ++rgs[j];
    std::fill(rgs.begin() + j + 1, rgs.end(), 0);
  }
  std::stable_sort(out.begin(), out.end(), [](const MomentPartition& a, const MomentPartition& b) {
    if (a.class_count() != b.class_count()) return a.class_count() < b.class_count();
    return shape_of(a) > shape_of(b);
  });
  return out;
}

std::vector<MomentTerm> expand_moment(int k, double n_emitters) {
  if (k < 2 || k > 4) throw std::invalid_argument("expand_moment: k must be in 2..4");
  if (n_emitters < 1.0) throw std::invalid_argument("expand_moment: N must be >= 1");
  std::vector<MomentTerm> terms;
  for (auto& p : slot_partitions(k)) {
    MomentTerm t;
    t.multiplicity = falling_factorial(n_emitters, p.class_count());
    t.partition = std::move(p);
    terms.push_back(std::move(t));
  }
  return terms;
}

std::complex<double> evaluate_moment(const std::vector<MomentTerm>& expansion,
                                     const MomentMap& moments) {
  std::complex<double> total = 0.0;
  for (const auto& term : expansion) {
    if (term.multiplicity == 0.0) continue;
    std::complex<double> prod = 1.0;
    for (const auto& cls : term.partition.classes) {
      auto it = moments.find(cls);
      if (it == moments.end()) throw std::invalid_argument("evaluate_moment: missing moment tuple");
      prod *= it->second;
    }
    total += term.multiplicity * prod;
  }
  return total;
}

}  // namespace phd
