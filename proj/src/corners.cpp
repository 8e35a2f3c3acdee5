#include "mwc/corners.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>

namespace mwc {

std::string rel_name(RelKind k)
{
    switch (k) {
    case RelKind::disjoint: return "disjoint";
    case RelKind::nested_sub: return "nested_sub";
    case RelKind::nested_super: return "nested_super";
    case RelKind::transversal: return "transversal";
    case RelKind::normal_form: return "normal_form";
    }
    return "?";
}

RelKind parse_rel(const std::string& s)
{
    if (s == "disjoint") return RelKind::disjoint;
    if (s == "nested_sub") return RelKind::nested_sub;
    if (s == "nested_super") return RelKind::nested_super;
    if (s == "transversal") return RelKind::transversal;
    if (s == "normal_form") return RelKind::normal_form;
    throw CornersError("unknown relation kind '" + s + "'");
}

Relation Relation::inverse() const
{
    Relation r = *this;
    if (kind == RelKind::nested_sub) r.kind = RelKind::nested_super;
    else if (kind == RelKind::nested_super) r.kind = RelKind::nested_sub;
    std::swap(r.blocks[1], r.blocks[2]);
    return r;
}

namespace {

template <class F>
void for_submasks(Mask m, F&& f)
{
    for (Mask s = m;; s = (s - 1) & m) {
        f(s);
        if (s == 0) break;
    }
}

bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

} // namespace

Space Space::base(const std::string& name, const std::vector<TrackedIdeal>& ideals,
                  const std::vector<BaseFace>& faces)
{
    Space s;
    s.name = name;
    s.ideals = ideals;
    std::set<std::string> seen;
    for (const auto& i : ideals)
        if (!seen.insert(i.name).second) throw CornersError("duplicate ideal '" + i.name + "'");
    if (faces.size() >= kMaxFaces) throw CornersError("too many faces");
    for (const auto& [face, ideal, factor] : faces) {
        if (!seen.insert(face).second) throw CornersError("duplicate name '" + face + "'");
        int ii = s.ideal_index(ideal);
        if (s.ideals[ii].kind != IdealKind::boundary)
            throw CornersError("base face '" + face + "' needs a boundary ideal");
        for (size_t j = 0; j < s.bhs.size(); ++j)
            if (s.val[j][ii]) throw CornersError("ideal '" + ideal + "' used by two base faces");
        s.bhs.push_back(face);
        std::vector<int> row(ideals.size(), 0);
        row[ii] = 1;
        s.val.push_back(row);
        s.wacc.push_back({});
    }
    Mask all = faces.empty() ? 0 : ((Mask(1) << faces.size()) - 1);
    for_submasks(all, [&](Mask m) {
        std::set<std::string> used;
        for (size_t i = 0; i < faces.size(); ++i) {
            if (!(m >> i & 1) || faces[i].factor.empty()) continue;
            if (!used.insert(faces[i].factor).second) return;
        }
        s.complex.insert(m);
    });
    return s;
}

void Space::add_closed(Mask m)
{
    for_submasks(m, [&](Mask x) { complex.insert(x); });
}

int Space::face_index(const std::string& f) const
{
    for (size_t i = 0; i < bhs.size(); ++i)
        if (bhs[i] == f) return static_cast<int>(i);
    throw CornersError("unknown face '" + f + "' in " + name);
}

bool Space::has_face(const std::string& f) const
{
    return std::find(bhs.begin(), bhs.end(), f) != bhs.end();
}

int Space::ideal_index(const std::string& i) const
{
    for (size_t j = 0; j < ideals.size(); ++j)
        if (ideals[j].name == i) return static_cast<int>(j);
    throw CornersError("unknown ideal '" + i + "' in " + name);
}

Mask Space::mask_of(const std::vector<std::string>& faces) const
{
    Mask m = 0;
    for (const auto& f : faces) m |= Mask(1) << face_index(f);
    return m;
}

std::vector<std::string> Space::names_of(Mask m) const
{
    std::vector<std::string> out;
    for (size_t i = 0; i < bhs.size(); ++i)
        if (m >> i & 1) out.push_back(bhs[i]);
    return out;
}

bool Space::intersect(const std::vector<std::string>& faces) const
{
    return complex.count(mask_of(faces)) > 0;
}

int Space::valuation(const std::string& face, const std::string& ideal) const
{
    return val[face_index(face)][ideal_index(ideal)];
}

const PSub* Space::find_psub(const std::string& n) const
{
    for (const auto& p : live)
        if (p.name == n) return &p;
    return nullptr;
}

Relation Space::auto_corner_relation(const PSub& a, const PSub& b) const
{
    Mask s1 = a.contains, s2 = b.contains;
    Relation r;
    if (!complex.count(s1 | s2)) return r;
    if (subset(s1, s2)) { r.kind = RelKind::nested_super; return r; }
    if (subset(s2, s1)) { r.kind = RelKind::nested_sub; return r; }
    if ((s1 & s2) == 0) { r.kind = RelKind::transversal; return r; }
    r.kind = RelKind::normal_form;
    auto blk = [](Mask m) {
        int c = std::popcount(m);
        return Block{{0, c}, c};
    };
    r.blocks = {blk(s1 & s2), blk(s1 & ~s2), blk(s2 & ~s1), Block{}};
    return r;
}

void Space::refresh_corner_relations()
{
    for (auto& a : live)
        for (auto& b : live)
            if (&a != &b && a.corner && b.corner) a.rel[b.name] = auto_corner_relation(a, b);
}

void Space::declare(const PSubDecl& d)
{
    if (find_psub(d.name) || has_face(d.name))
        throw CornersError("name '" + d.name + "' already in use in " + name);
    PSub p;
    p.name = d.name;
    p.contains = mask_of(d.contains);
    p.meets = mask_of(d.meets) & ~p.contains;
    p.w = d.w;
    p.corner = d.corner;
    if (p.contains == 0) throw CornersError("center '" + d.name + "' lies in no boundary face");
    if (!complex.count(p.contains))
        throw CornersError("center '" + d.name + "' contained in faces with empty intersection");
    if (!d.w.nonneg()) throw CornersError("center '" + d.name + "' has negative w");
    if (d.corner && !d.w.is_zero()) throw CornersError("corner '" + d.name + "' must have w = 0");
    if (!d.corner && d.w.is_zero()) throw CornersError("center '" + d.name + "' has w = 0 but is not a corner");

    for (const auto& [id, ord] : d.profile) ideal_index(id);
    for (size_t j = 0; j < ideals.size(); ++j) {
        int sum = 0;
        for (size_t f = 0; f < bhs.size(); ++f)
            if (p.contains >> f & 1) sum += val[f][j];
        auto it = d.profile.find(ideals[j].name);
        if (ideals[j].kind == IdealKind::boundary || d.corner) {
            if (it != d.profile.end() && it->second != sum)
                throw CornersError("profile of '" + d.name + "' at " + ideals[j].name + " is " +
                                   std::to_string(it->second) + ", faces give " + std::to_string(sum));
            if (ideals[j].kind == IdealKind::diagonal) p.diag_profile[ideals[j].name] = sum;
        } else {
            int v = it == d.profile.end() ? sum : it->second;
            if (v < sum)
                throw CornersError("profile of '" + d.name + "' at " + ideals[j].name +
                                   " below the containing faces");
            p.diag_profile[ideals[j].name] = v;
        }
    }

    for (const auto& [other, r] : d.rel)
        if (!find_psub(other)) throw CornersError("relation of '" + d.name + "' names unknown center '" + other + "'");
    for (auto& o : live) {
        Relation r;
        auto it = d.rel.find(o.name);
        if (it != d.rel.end()) r = it->second;
        else if (o.rel.count(d.name)) r = o.rel.at(d.name).inverse();
        else if (p.corner && o.corner) r = auto_corner_relation(p, o);
        else if (!default_relation.empty()) r.kind = parse_rel(default_relation);
        else throw CornersError("undeclared relation between '" + d.name + "' and '" + o.name + "'");
        p.rel[o.name] = r;
        o.rel[d.name] = r.inverse();
    }
    live.push_back(std::move(p));
}

void Space::blow(const std::string& pname, const std::string& face)
{
    auto pit = std::find_if(live.begin(), live.end(), [&](const PSub& q) { return q.name == pname; });
    if (pit == live.end()) throw CornersError("no live center '" + pname + "' in " + name);
    if (has_face(face)) throw CornersError("face '" + face + "' already exists in " + name);
    PSub p = *pit;
    live.erase(pit);
    if (bhs.size() + 1 >= kMaxFaces) throw CornersError("too many faces");

    const Mask S = p.contains;
    const int n = static_cast<int>(bhs.size());
    const Mask F = Mask(1) << n;

    if (p.corner && std::popcount(S) == 1) {
        // identity blow-up
        int i = std::countr_zero(S);
        history.push_back("identity " + bhs[i] + " -> " + face);
        bhs[i] = face;
        for (auto& q : live) q.rel.erase(pname);
        return;
    }

    std::set<Mask> nc;
    if (p.corner) {
        if (!complex.count(S)) throw CornersError("corner '" + pname + "' is empty");
        for (Mask t : complex) {
            if (subset(S, t)) continue;
            nc.insert(t);
            if (complex.count(t | S)) nc.insert(t | F);
        }
        complex = std::move(nc);
    } else {
        Mask free = p.meets & ~S;
        for_submasks(free, [&](Mask t) {
            if (!complex.count(t | S)) return;
            for (Mask a : p.avoid)
                if (a && subset(a, t)) return;
            add_closed(t | S | F);
        });
    }

    std::vector<int> row(ideals.size(), 0);
    HAffine w = p.w;
    for (int f = 0; f < n; ++f) {
        if (!(S >> f & 1)) continue;
        for (size_t j = 0; j < ideals.size(); ++j) row[j] += val[f][j];
        w = w + wacc[f];
    }
    for (size_t j = 0; j < ideals.size(); ++j)
        if (ideals[j].kind == IdealKind::diagonal) row[j] = p.diag_profile.at(ideals[j].name);
    bhs.push_back(face);
    val.push_back(row);
    wacc.push_back(w);
    history.push_back((p.corner ? "corner " : "blowup ") + face + " <- " + pname);

    std::map<std::string, Relation> to_p;
    for (auto& q : live) {
        Relation r = q.rel.at(pname);
        to_p[q.name] = r;
        if (q.corner && p.corner) {
            if (subset(S, q.contains)) q.contains = (q.contains & ~S) | F;
            continue;
        }
        switch (r.kind) {
        case RelKind::disjoint:
            break;
        case RelKind::nested_sub: {
            q.contains = (q.contains & ~S) | F;
            q.meets = (q.meets | S) & ~q.contains;
            HAffine nw = q.w - p.w;
            if (!nw.nonneg())
                throw CornersError("center '" + q.name + "' inside '" + pname + "' with smaller codimension");
            q.w = nw;
            if (nw.is_zero()) {
                q.corner = true;
                if (!complex.count(q.contains))
                    throw CornersError("lift of '" + q.name + "' is an empty corner");
            }
            break;
        }
        case RelKind::nested_super:
        case RelKind::transversal:
            if (!q.corner) q.meets |= F;
            break;
        case RelKind::normal_form:
            if (!q.corner) {
                q.meets |= F;
                Mask ex = S & ~q.contains;
                if (r.blocks[2].pure_boundary() && ex) q.avoid.push_back(ex);
            }
            break;
        }
    }

    for (auto& q1 : live) {
        for (auto& [oname, r] : q1.rel) {
            if (oname == pname) continue;
            if (r.kind == RelKind::transversal && r.along == pname) {
                r = Relation{};
                continue;
            }
            const Relation& a = to_p.at(q1.name);
            const Relation& b = to_p.at(oname);
            if (a.kind == RelKind::nested_sub && b.kind == RelKind::normal_form &&
                r.kind == RelKind::nested_sub) {
                // q2's view: common, q2-only, q1-only, rest
                Relation v;
                v.kind = RelKind::normal_form;
                v.blocks = {b.blocks[1], b.blocks[0], Block{{0, 1}, 1}, b.blocks[3]};
                r = v.inverse();
            } else if (a.kind == RelKind::normal_form && b.kind == RelKind::nested_sub &&
                       r.kind == RelKind::nested_super) {
                Relation v;
                v.kind = RelKind::normal_form;
                v.blocks = {a.blocks[1], a.blocks[0], Block{{0, 1}, 1}, a.blocks[3]};
                r = v;
            }
        }
        q1.rel.erase(pname);
    }
    refresh_corner_relations();
}

void Space::blow_corner(const std::string& face, const std::vector<std::string>& faces,
                        const std::map<std::string, Relation>& rel)
{
    PSubDecl d;
    d.name = face;
    d.contains = faces;
    d.corner = true;
    d.rel = rel;
    // the psub name must not clash with the face it creates
    d.name = "<" + face + ">";
    declare(d);
    blow(d.name, face);
}

void Space::blow_inline(const PSubDecl& d, const std::string& face)
{
    declare(d);
    blow(d.name, face);
}

void Space::rename(const std::string& from, const std::string& to)
{
    if (has_face(to)) throw CornersError("face '" + to + "' already exists");
    bhs[face_index(from)] = to;
    history.push_back("rename " + from + " -> " + to);
}

std::map<std::string, int> Space::lift_ideal(const std::string& ideal) const
{
    int j = ideal_index(ideal);
    std::map<std::string, int> out;
    for (size_t f = 0; f < bhs.size(); ++f)
        if (val[f][j]) out[bhs[f]] = val[f][j];
    return out;
}

std::map<std::string, HAffine> density_weight(const Space& s, WeightConvention c)
{
    std::map<std::string, HAffine> out;
    std::vector<int> right;
    if (c == WeightConvention::composition)
        for (const char* id : {"xp", "xpp"})
            for (size_t j = 0; j < s.ideals.size(); ++j)
                if (s.ideals[j].name == id) right.push_back(static_cast<int>(j));
    for (size_t f = 0; f < s.bhs.size(); ++f) {
        HAffine a = s.wacc[f];
        for (int j : right) a = a - HAffine::hp1(s.val[f][j]);
        out[s.bhs[f]] = a;
    }
    return out;
}

std::string face_image(const BFibration& fib, const std::string& face)
{
    const Space& src = *fib.source;
    const Space& tgt = *fib.target;
    int h = src.face_index(face);
    std::vector<int> v;
    bool zero = true;
    for (const auto& ti : tgt.ideals) {
        auto it = fib.pullback.find(ti.name);
        if (it == fib.pullback.end())
            throw CornersError(fib.name + ": no pullback for target ideal '" + ti.name + "'");
        int x = src.val[h][src.ideal_index(it->second)];
        v.push_back(x);
        if (x) zero = false;
    }
    if (zero) return kWhole;
    std::string hit;
    for (size_t g = 0; g < tgt.bhs.size(); ++g) {
        if (tgt.val[g] != v) continue;
        if (!hit.empty()) throw CornersError(fib.name + ": face '" + face + "' matches two target faces");
        hit = tgt.bhs[g];
    }
    if (hit.empty())
        throw CornersError(fib.name + ": b-fibration violation at '" + face + "' (maps into a corner)");
    return hit;
}

std::map<std::string, std::string> face_images(const BFibration& f)
{
    std::map<std::string, std::string> out;
    for (const auto& b : f.source->bhs) out[b] = face_image(f, b);
    return out;
}

IsoResult lattice_iso(const Space& a, const Space& b)
{
    IsoResult res;
    std::vector<std::string> ia, ib;
    for (const auto& i : a.ideals) ia.push_back(i.name);
    for (const auto& i : b.ideals) ib.push_back(i.name);
    std::sort(ia.begin(), ia.end());
    std::sort(ib.begin(), ib.end());
    if (ia != ib) {
        res.mismatch = "tracked ideals differ";
        return res;
    }
    auto vec = [&](const Space& s, int f) {
        std::vector<int> v;
        for (const auto& id : ia) v.push_back(s.val[f][s.ideal_index(id)]);
        return v;
    };
    const size_t n = a.bhs.size();
    std::vector<std::vector<int>> cand(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < b.bhs.size(); ++j)
            if (vec(a, i) == vec(b, j)) cand[i].push_back(static_cast<int>(j));
        if (cand[i].empty()) {
            res.mismatch = "face '" + a.bhs[i] + "' of " + a.name + " has no counterpart in " + b.name;
            return res;
        }
    }
    if (n != b.bhs.size()) {
        res.mismatch = "face counts differ: " + std::to_string(n) + " vs " + std::to_string(b.bhs.size());
        return res;
    }
    if (a.complex.size() != b.complex.size()) {
        res.mismatch = "face complexes differ in size: " + std::to_string(a.complex.size()) + " vs " +
                       std::to_string(b.complex.size());
        return res;
    }
    std::vector<int> perm(n, -1);
    std::vector<bool> used(b.bhs.size(), false);
    auto map_mask = [&](Mask m) {
        Mask r = 0;
        for (size_t i = 0; i < n; ++i)
            if (m >> i & 1) r |= Mask(1) << perm[i];
        return r;
    };
    std::function<bool(size_t)> go = [&](size_t i) -> bool {
        if (i == n) {
            for (Mask m : a.complex)
                if (!b.complex.count(map_mask(m))) return false;
            return true;
        }
        for (int j : cand[i]) {
            if (used[j]) continue;
            used[j] = true;
            perm[i] = j;
            if (go(i + 1)) return true;
            used[j] = false;
        }
        perm[i] = -1;
        return false;
    };
    if (!go(0)) {
        // name the first intersection that fails under the valuation matching
        std::fill(perm.begin(), perm.end(), -1);
        std::fill(used.begin(), used.end(), false);
        for (size_t i = 0; i < n; ++i)
            for (int j : cand[i])
                if (!used[j]) { perm[i] = j; used[j] = true; break; }
        for (Mask m : a.complex) {
            bool ok = true;
            for (size_t i = 0; i < n; ++i)
                if ((m >> i & 1) && perm[i] < 0) ok = false;
            if (ok && !b.complex.count(map_mask(m))) {
                std::string s;
                for (const auto& x : a.names_of(m)) s += (s.empty() ? "" : ",") + x;
                res.mismatch = "intersection {" + s + "} of " + a.name + " has no image in " + b.name;
                return res;
            }
        }
        res.mismatch = "no face bijection preserves the complex";
        return res;
    }
    res.ok = true;
    for (size_t i = 0; i < n; ++i) res.bijection[a.bhs[i]] = b.bhs[perm[i]];
    return res;
}

std::string emit_dot(const Space& s)
{
    std::vector<std::string> nodes = s.bhs;
    std::sort(nodes.begin(), nodes.end());
    std::vector<std::pair<std::string, std::string>> edges;
    for (size_t i = 0; i < s.bhs.size(); ++i)
        for (size_t j = i + 1; j < s.bhs.size(); ++j)
            if (s.complex.count((Mask(1) << i) | (Mask(1) << j))) {
                auto x = s.bhs[i], y = s.bhs[j];
                if (y < x) std::swap(x, y);
                edges.emplace_back(x, y);
            }
    std::sort(edges.begin(), edges.end());
    std::ostringstream os;
    for (const auto& v : nodes) os << "node " << v << "\n";
    for (const auto& [x, y] : edges) os << "edge " << x << " " << y << "\n";
    return os.str();
}

std::string reason_name(CommuteReason r)
{
    switch (r) {
    case CommuteReason::disjoint: return "disjoint";
    case CommuteReason::nested: return "nested";
    case CommuteReason::transversal: return "transversal";
    case CommuteReason::normal_form_with_Z: return "normal_form_with_Z";
    case CommuteReason::unknown: return "unknown";
    }
    return "?";
}

CommuteVerdict check_commutes(const Space& s, const std::string& xn, const std::string& yn)
{
    CommuteVerdict v;
    const PSub* x = s.find_psub(xn);
    const PSub* y = s.find_psub(yn);
    if (!x || !y || x == y) return v;
    auto it = x->rel.find(yn);
    if (it == x->rel.end()) return v;
    const Relation& r = it->second;
    switch (r.kind) {
    case RelKind::disjoint: v.reason = CommuteReason::disjoint; break;
    case RelKind::nested_sub:
    case RelKind::nested_super: v.reason = CommuteReason::nested; break;
    case RelKind::transversal: v.reason = CommuteReason::transversal; break;
    case RelKind::normal_form: {
        v.reason = CommuteReason::normal_form_with_Z;
        PSubDecl z;
        z.name = "Z(" + xn + "," + yn + ")";
        Mask S = x->contains | y->contains;
        z.contains = s.names_of(S);
        z.meets = s.names_of((x->meets | y->meets) & ~S);
        for (const auto& id : s.ideals)
            if (id.kind == IdealKind::diagonal)
                z.profile[id.name] = std::max(x->diag_profile.at(id.name), y->diag_profile.at(id.name));
        HAffine w;
        for (int i = 0; i < 3; ++i) w = w + r.blocks[i].n - HAffine{0, r.blocks[i].k};
        z.w = w;
        z.corner = w.is_zero();
        Relation sub;
        sub.kind = RelKind::nested_sub;
        z.rel[xn] = sub;
        z.rel[yn] = sub;
        v.z = z;
        break;
    }
    }
    return v;
}

} // namespace mwc
