#pragma once
#include "mwc/corners.hpp"
#include "mwc/indexalg.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mwc {

class Catalog;

struct CalculusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrabilityViolation : CalculusError {
    using CalculusError::CalculusError;
};

// One summand: E_left + F_right + shift. An empty side is omitted (smooth contribution).
struct Clause {
    std::string left, right;
    HAffine shift;
    auto operator<=>(const Clause&) const = default;
};

// inf E_left + inf F_right + shift > 0 (strict) or, with one side only,
// inf Re >= -shift under the equality-case convention (non-strict).
struct Condition {
    std::string left, right;
    HAffine shift;
    bool strict = true;
    std::string str() const;
};

struct CalculusRule {
    std::string name;
    std::string provenance; // derived | stated | hand-coded
    std::string left_space, right_space, target_space;
    std::vector<std::string> target_faces;
    std::map<std::string, std::vector<Clause>> clauses;
    std::vector<Condition> integrability;
    std::vector<Condition> preconditions;
    std::set<std::string> diagonal_faces;
    std::vector<std::string> empty_faces; // both operands must vanish there
    std::map<std::string, std::vector<Condition>> normal_conditions;

    // adjoint and conjugation data on the double space
    std::string left_ideal = "x", right_ideal = "xp";
    std::map<std::string, std::string> adjoint_map;
    std::map<std::string, HAffine> adjoint_shift;
    std::map<std::string, int> conj_shift;
    std::map<std::string, int> v_left, v_right;
    std::map<std::string, HAffine> renorm;
};

using FaceMap = std::map<std::string, std::string>;

// Pushforward recipe: summand (left(H), right(H), weight(H) + renorm(target(H))) per source face H.
CalculusRule derive_rule(const std::string& name, const Space& src, const Space& tgt, const FaceMap& left,
                         const FaceMap& right, const FaceMap& target,
                         const std::map<std::string, HAffine>& weight,
                         const std::map<std::string, HAffine>& renorm);

// (h+1) v_G(xp) - w_G on a double space
std::map<std::string, HAffine> target_renorm(const Space& dbl);

CalculusRule derive_composition_rule(const Space& triple, const BFibration& L, const BFibration& C,
                                     const BFibration& R, const std::string& name = "derived");
// action on functions: operator kernels on `dbl`, pushed to the single space by L
CalculusRule derive_mapping_rule(const Space& dbl, const BFibration& L, const BFibration& R,
                                 const std::string& name = "derived");

// attach adjoint/conjugation data from the double space
void attach_double_space(CalculusRule& r, const Space& dbl, HAffine adjoint_unit,
                         const std::vector<std::pair<std::string, std::string>>& swaps);

// clause tables as TSV: "target left right shift", "@integrability left right shift"
std::string rule_table(const CalculusRule& r);
CalculusRule parse_rule_table(const std::string& text, const std::string& name);
bool same_clauses(const CalculusRule& a, const CalculusRule& b, std::string* diff = nullptr);

// catalog rule by name (catalog/rules/<name>.json)
CalculusRule load_rule(Catalog& cat, const std::string& name);

struct ConditionFailure {
    Condition cond;
    std::string margin;
};

std::optional<ConditionFailure> eval_condition(const Condition& c, const IndexFamily& e,
                                               const IndexFamily& f, long long h);

IndexFamily compose_families(const CalculusRule& r, const IndexFamily& e, const IndexFamily& f,
                             long long h);
IndexSet mapping_family(const CalculusRule& r, const IndexFamily& e, const IndexSet& f, long long h);
IndexFamily adjoint_family(const CalculusRule& r, const IndexFamily& e, long long h);
IndexFamily conjugate_family(const CalculusRule& r, const IndexFamily& e, const Rat& a);
IndexFamily mul_left(const CalculusRule& r, const IndexFamily& e, const Rat& a);
IndexFamily mul_right(const CalculusRule& r, const IndexFamily& e, const Rat& a);
std::vector<ConditionFailure> normal_restriction_check(const CalculusRule& r, const IndexFamily& e,
                                                       const IndexFamily& f, const std::string& face,
                                                       long long h);
IndexFamily small_calculus(const CalculusRule& r);

} // namespace mwc
