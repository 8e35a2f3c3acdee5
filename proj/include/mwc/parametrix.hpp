#pragma once
#include "mwc/calculus.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mwc {

struct ParametrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LoosenAttempt : ParametrixError {
    using ParametrixError::ParametrixError;
};
struct NoProgress : ParametrixError {
    using ParametrixError::ParametrixError;
};

using Params = std::map<std::string, Rat>;

// Rational arithmetic over named parameters: + - * / ( ) min(a,b) max(a,b).
Rat eval_expr(const std::string& expr, const Params& p);
// "N0", "N0+expr", "{(expr,k),...}", "{}"
IndexSet eval_set(const std::string& s, const Params& p);

// Order ledger entry for one operator.
struct OpSymbol {
    std::optional<Rat> order; // nullopt: -infinity
    IndexFamily family;
    std::set<std::string> flags; // smooth_small_calculus, very_residual, bounded
    std::map<std::string, Rat> pih; // face -> order of a leading term with A = Pi_h A Pi_h
};

std::string fmt_order(const std::optional<Rat>& o);
bool residual_face(const std::string& face);

OpSymbol compose_ops(const CalculusRule& r, const std::vector<const OpSymbol*>& ops, long long h);
OpSymbol add_ops(const std::vector<const OpSymbol*>& ops);

// Least fixed point of S = R + S∘R, each face truncated below inf_re(R|H) + cutoff.
IndexFamily neumann_closure(const CalculusRule& r, const IndexFamily& fam, const Rat& cutoff, long long h);
IndexFamily neumann_closure(const CalculusRule& r, const IndexFamily& fam,
                            const std::map<std::string, Rat>& windows, long long h);

struct ExpectLine {
    std::string scenario, step, face;
    bool pass = false;
    std::string detail;
};

struct ReplayOptions {
    Params overrides;
    bool assertions_enabled = true;
};

struct ReplayResult {
    std::string scenario;
    Params params;
    std::vector<ExpectLine> expects;
    std::vector<std::string> failed_asserts; // only filled with assertions disabled
    std::vector<std::string> documented_failures;
    std::vector<std::string> errors;
    std::map<std::string, OpSymbol> symbols;
    std::string report;

    bool all_pass() const;
    // with assertions disabled: failing assert labels equal the documented list
    bool failures_as_documented() const;
};

nlohmann::json load_scenario(Catalog& cat, const std::string& name);
std::vector<std::string> scenario_names(const Catalog& cat);
std::vector<long long> scenario_h_values(const nlohmann::json& sc);
ReplayResult replay(Catalog& cat, const std::string& name, const ReplayOptions& opt = {});
ReplayResult replay_json(Catalog& cat, const nlohmann::json& sc, const ReplayOptions& opt = {});

} // namespace mwc
