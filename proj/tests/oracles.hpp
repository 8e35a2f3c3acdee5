#pragma once
// Independent brute-force oracles for the test binaries.
#include "mwc/indexalg.hpp"
#include "mwc/spectral.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using mwc::IndexSet;
using mwc::Rat;

// exponent -> largest log order present; only exponents <= hi are kept
using PointSet = std::map<Rat, int>;

PointSet closure(const IndexSet& e, const Rat& hi);
PointSet sum(const PointSet& a, const PointSet& b, const Rat& hi);
PointSet unite(const PointSet& a, const PointSet& b);
PointSet extended_union(const PointSet& a, const PointSet& b);
PointSet shift(const PointSet& a, const Rat& s, const Rat& hi);
std::optional<Rat> inf_re(const PointSet& a);

// membership of every (z,k) with z <= hi, k <= kmax agrees; empty string when equal
std::string compare(const IndexSet& lib, const PointSet& bf, const Rat& hi, int kmax);

// exponents in {0, +-1/2, +-1}, log orders <= 2, up to 3 generators
IndexSet random_set(std::mt19937& rng, bool allow_empty = true);

// One block of the Hodge indicial family: a harmonic form of degree q, or the span of a
// coexact eigenform of degree q (eigenvalue zeta of delta d) and its differential.
struct Block {
    int h = 1;
    int q = 0;
    std::optional<Rat> zeta;
};

// eigenvalues of -B^{-1} A where I(lambda) = A + lambda B on the block; sorted
std::vector<double> roots_oracle(const Block& b);

// same block as spectral data
mwc::SpectralData block_data(const Block& b);

} // namespace oracle
