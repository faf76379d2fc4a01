#pragma once

#include <complex>
#include <map>
#include <vector>

namespace phd {

// Partition of k operator slots into equality classes (slots on the same
// emitter). Slot order inside a class is the operator order of the parent
// expression and must be preserved.
struct MomentPartition {
  std::vector<std::vector<int>> classes;
  int class_count() const { return static_cast<int>(classes.size()); }
};

// N (N-1) ... (N-c+1); zero when N is an integer < c
double falling_factorial(double n, int c);

// all partitions of k slots, ordered by class count, then by descending
// block-size signature (the ad-hoc case order used for the moment expansion)
std::vector<MomentPartition> slot_partitions(int k);

struct MomentTerm {
  double multiplicity;  // N!/(N-c)!
  MomentPartition partition;
};

// N-emitter moment of a k-fold operator product expanded over identical
// independent emitters; k in {2,3,4}
std::vector<MomentTerm> expand_moment(int k, double n_emitters);

// single-emitter moments keyed by the ordered slot tuple of a class
using MomentMap = std::map<std::vector<int>, std::complex<double>>;

// weighted sum over the expansion; throws if a required tuple is missing
std::complex<double> evaluate_moment(const std::vector<MomentTerm>& expansion,
                                     const MomentMap& moments);

}  // namespace phd
