#pragma once
#include "mwc/rational.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwc {

struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cohomology and nonzero spectra of d, delta on the flat bundle ker D_v -> Y.
struct SpectralData {
    std::string name;
    int h = 0;
    std::map<int, long long> betti;
    std::map<int, std::vector<Rat>> spec_d_delta; // nonzero Spec(d delta)_q
    std::map<int, std::vector<Rat>> spec_delta_d; // nonzero Spec(delta d)_q
    bool check_intertwining = false;
    std::optional<std::vector<Rat>> dirac_spec; // set for Dirac data files

    long long b(int q) const;
};

// first violated invariant, empty when valid
std::string validation_error(const SpectralData& d);
void validate(const SpectralData& d);
SpectralData parse_spectral(const nlohmann::json& j);
SpectralData load_spectral(const std::string& path);
nlohmann::json to_json(const SpectralData& d);

// offset + sign * sqrt(radicand); sign 0 (or a square radicand) means rational
class IndicialRoot {
public:
    static IndicialRoot rational(const Rat& v);
    static IndicialRoot surd(const Rat& offset, int sign, const Rat& radicand);

    const Rat& offset() const { return offset_; }
    int sign() const { return sign_; }
    const Rat& radicand() const { return radicand_; }
    bool is_rational() const { return sign_ == 0; }

    double approx() const;
    std::string str() const;
    // -1 - lambda
    IndicialRoot reflect() const;

private:
    Rat offset_{0};
    int sign_ = 0;
    Rat radicand_{0};
};

// exact three-way comparison
int compare(const IndicialRoot& a, const IndicialRoot& b);
int compare(const IndicialRoot& a, const Rat& b);
inline bool operator<(const IndicialRoot& a, const IndicialRoot& b) { return compare(a, b) < 0; }
inline bool operator==(const IndicialRoot& a, const IndicialRoot& b) { return compare(a, b) == 0; }

// sorted, deduplicated
std::vector<IndicialRoot> hodge_indicial_roots(const SpectralData& d);
// sorted with multiplicity: each harmonic form gives 2 roots, each listed eigenvalue 4
std::vector<IndicialRoot> hodge_root_multiset(const SpectralData& d);
std::vector<IndicialRoot> dirac_indicial_roots(const std::vector<Rat>& spec);

// no root in the open interval (-1-eps, eps)
bool critical_gap(const std::vector<IndicialRoot>& roots, const Rat& eps);
// largest eps = 2^-k (k <= max_halvings) with critical_gap true
std::optional<Rat> gap_epsilon(const std::vector<IndicialRoot>& roots, int max_halvings = 20);
// roots hit more than once in the multiset, with their counts
std::vector<std::pair<IndicialRoot, int>> root_collisions(const SpectralData& d);
// roots inside [lo, hi] (closed) or (lo, hi) (open)
std::vector<IndicialRoot> roots_in(const std::vector<IndicialRoot>& roots, const Rat& lo, const Rat& hi, bool closed);
bool symmetric_under_reflection(const std::vector<IndicialRoot>& roots);

struct ConditionResult {
    std::string label;
    bool pass = true;
    std::string detail;
};

struct Int12bVerdict {
    // cohomology_vanishes, laplacian_gap, d_delta_gap
    std::vector<ConditionResult> conditions;
    bool pass = false;
    std::optional<bool> no_root_in_closed_gap; // computed when pass
    std::string str() const;
};
Int12bVerdict check_int12b(const SpectralData& d);

struct GsReport {
    bool open_gap = false;          // (-1,0) free of roots
    bool equality_excluded = false; // 1-((h+1)/2-q)^2 not in Spec(d delta)_q near the middle degree
    bool int12b = false;
    bool implies_int12b = false; // (open_gap and equality_excluded) => int12b, pointwise on this data
    std::vector<ConditionResult> detail;
    std::string str() const;
};
GsReport check_gs_comparison(const SpectralData& d);

SpectralData scale_spectra(const SpectralData& d, const Rat& t);

struct ScaleSearch {
    bool possible = false;
    Rat t{1};
    std::string reason;
};
// minimal t = 2^k (k >= 0) making check_int12b pass
ScaleSearch scale_search(const SpectralData& d, int max_doublings = 40);

struct BesselProbe {
    double alpha = 0;
    double kappa_max = 20, kappa_min = 1e-3;
    double fitted_exponent = 0;
    std::string verdict; // not_in_L2b | inconclusive
    std::vector<std::pair<double, double>> samples; // (kappa, f), kappa increasing
};

// -(k d/dk)^2 f + (alpha^2 + k^2) f = 0, integrated from kappa_max down with seed e^{-kappa}
BesselProbe bessel_l2_probe(double alpha, double kappa_max = 20, double kappa_min = 1e-3,
                            const std::vector<double>& sample_at = {});

} // namespace mwc
