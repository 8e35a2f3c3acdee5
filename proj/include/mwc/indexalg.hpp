#pragma once
#include "mwc/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mwc {

struct Gen {
    Rat z;
    int k = 0;
    bool operator==(const Gen&) const = default;
};

// (z,k) lies in the closure of (z2,k2)
bool dominated(const Gen& a, const Gen& b);

// Finitely generated index set, kept in normal form (sorted, no dominated generator).
class IndexSet {
public:
    IndexSet() = default;
    static IndexSet normalize(std::vector<Gen> raw);
    static IndexSet single(Rat z, int k = 0) { return normalize({{z, k}}); }
    static IndexSet smooth() { return single(Rat(0)); }

    const std::vector<Gen>& gens() const { return g_; }
    bool empty() const { return g_.empty(); }
    bool operator==(const IndexSet&) const = default;

    std::optional<Rat> inf_re() const;
    bool contains(const Gen& x) const;
    std::string str() const;

private:
    std::vector<Gen> g_;
};

IndexSet sum(const IndexSet& e, const IndexSet& f);
IndexSet shift(const IndexSet& e, const Rat& a);
IndexSet unite(const IndexSet& e, const IndexSet& f);
IndexSet extended_union(const IndexSet& e, const IndexSet& f);
IndexSet intersect(const IndexSet& e, const IndexSet& f);
IndexSet truncate(const IndexSet& e, const Rat& cutoff);

// inf Re E >= a under the equality-case convention
bool satisfies_bound(const IndexSet& e, const Rat& a);
// inf Re E > a
bool gt(const IndexSet& e, const Rat& a);
// every generator dominated by (a, k) or strictly above a
bool ge_log(const IndexSet& e, const Rat& a, int k);
bool refines(const IndexSet& e, const IndexSet& f);

// "{(0,0),(1/2,1)}", "{}"; also accepts "N0", "N0+a" shorthands
IndexSet parse_index_set(const std::string& s);

class Space;

// Index family: one set per boundary hypersurface of a space.
struct IndexFamily {
    std::string space;
    std::map<std::string, IndexSet> sets;

    const IndexSet& at(const std::string& face) const;
    IndexSet& at(const std::string& face);
    bool operator==(const IndexFamily&) const = default;
    std::string str() const;
};

IndexFamily empty_family(const Space& s);

} // namespace mwc
