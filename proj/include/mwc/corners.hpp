#pragma once
#include "mwc/haffine.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwc {

using Mask = std::uint64_t;
inline constexpr int kMaxFaces = 64;

struct CornersError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class IdealKind { boundary, diagonal };

struct TrackedIdeal {
    std::string name;
    IdealKind kind = IdealKind::boundary;
};

enum class RelKind { disjoint, nested_sub, nested_super, transversal, normal_form };

std::string rel_name(RelKind k);
RelKind parse_rel(const std::string& s);

// One block of the normal-form chart: n coordinates, k of them boundary defining.
struct Block {
    HAffine n;
    int k = 0;
    bool pure_boundary() const { return n.is_const() && n.b == k; }
    bool operator==(const Block&) const = default;
};

// Relation of the owning psub to another. Blocks: common, self-only, other-only, rest.
struct Relation {
    RelKind kind = RelKind::disjoint;
    std::string along;
    std::array<Block, 4> blocks{};

    Relation inverse() const;
    bool operator==(const Relation&) const = default;
};

struct PSub {
    std::string name;
    Mask contains = 0;
    Mask meets = 0;
    std::vector<Mask> avoid;
    std::map<std::string, int> diag_profile;
    HAffine w;
    bool corner = false;
    std::map<std::string, Relation> rel;
};

struct PSubDecl {
    std::string name;
    std::vector<std::string> contains;
    std::vector<std::string> meets;
    std::map<std::string, int> profile;
    HAffine w;
    bool corner = false;
    std::map<std::string, Relation> rel;
};

class Space {
public:
    std::string name;
    std::vector<TrackedIdeal> ideals;
    std::vector<std::string> bhs;
    std::set<Mask> complex;
    std::vector<std::vector<int>> val; // [face][ideal]
    std::vector<HAffine> wacc;
    std::vector<std::string> history;
    std::vector<PSub> live;
    std::string default_relation; // empty: every pair must be declared

    // faces sharing a nonempty factor label are disjoint (two ends of one interval)
    struct BaseFace {
        std::string face, ideal, factor;
    };
    static Space base(const std::string& name, const std::vector<TrackedIdeal>& ideals,
                      const std::vector<BaseFace>& faces);

    int face_index(const std::string& f) const;
    bool has_face(const std::string& f) const;
    int ideal_index(const std::string& i) const;
    Mask mask_of(const std::vector<std::string>& faces) const;
    std::vector<std::string> names_of(Mask m) const;
    bool intersect(const std::vector<std::string>& faces) const;
    int valuation(const std::string& face, const std::string& ideal) const;

    const PSub* find_psub(const std::string& n) const;
    void declare(const PSubDecl& d);
    // blow up a declared psub, creating face `face`
    void blow(const std::string& psub, const std::string& face);
    void blow_corner(const std::string& face, const std::vector<std::string>& faces,
                     const std::map<std::string, Relation>& rel = {});
    void blow_inline(const PSubDecl& d, const std::string& face);
    void rename(const std::string& from, const std::string& to);

    // total lift of an ideal: face -> exponent (zero entries omitted)
    std::map<std::string, int> lift_ideal(const std::string& ideal) const;

private:
    void add_closed(Mask m);
    Relation auto_corner_relation(const PSub& a, const PSub& b) const;
    void refresh_corner_relations();
};

enum class WeightConvention { b, composition };

// per-face density multiweight, as a(h+1)-style affine values
std::map<std::string, HAffine> density_weight(const Space& s, WeightConvention c);

struct BFibration {
    std::string name;
    const Space* source = nullptr;
    const Space* target = nullptr;
    std::map<std::string, std::string> pullback; // target ideal -> source ideal
};

inline const std::string kWhole = "Whole";

// target face name or kWhole
std::string face_image(const BFibration& f, const std::string& face);
std::map<std::string, std::string> face_images(const BFibration& f);

struct IsoResult {
    bool ok = false;
    std::map<std::string, std::string> bijection;
    std::string mismatch;
};
IsoResult lattice_iso(const Space& a, const Space& b);

std::string emit_dot(const Space& s);

enum class CommuteReason { disjoint, nested, transversal, normal_form_with_Z, unknown };
std::string reason_name(CommuteReason r);

struct CommuteVerdict {
    CommuteReason reason = CommuteReason::unknown;
    std::optional<PSubDecl> z; // third center for the normal-form case
};
CommuteVerdict check_commutes(const Space& s, const std::string& x, const std::string& y);

} // namespace mwc
