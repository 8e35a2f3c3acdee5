#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

PointSet closure(const IndexSet& e, const Rat& hi)
{
    PointSet out;
    for (const auto& g : e.gens())
        for (Rat z = g.z; z <= hi; z += Rat(1)) {
            auto [it, fresh] = out.emplace(z, g.k);
            if (!fresh) it->second = std::max(it->second, g.k);
        }
    return out;
}

PointSet sum(const PointSet& a, const PointSet& b, const Rat& hi)
{
    PointSet out;
    for (const auto& [z1, k1] : a)
        for (const auto& [z2, k2] : b) {
            Rat z = z1 + z2;
            if (z > hi) continue;
            auto [it, fresh] = out.emplace(z, k1 + k2);
            if (!fresh) it->second = std::max(it->second, k1 + k2);
        }
    return out;
}

PointSet unite(const PointSet& a, const PointSet& b)
{
    PointSet out = a;
    for (const auto& [z, k] : b) out[z] = out.count(z) ? std::max(out[z], k) : k;
    return out;
}

PointSet extended_union(const PointSet& a, const PointSet& b)
{
    PointSet out = unite(a, b);
    for (const auto& [z, k] : a)
        if (auto it = b.find(z); it != b.end()) out[z] = k + it->second + 1;
    return out;
}

PointSet shift(const PointSet& a, const Rat& s, const Rat& hi)
{
    PointSet out;
    for (const auto& [z, k] : a)
        if (z + s <= hi) out[z + s] = k;
    return out;
}

std::optional<Rat> inf_re(const PointSet& a)
{
    if (a.empty()) return std::nullopt;
    return a.begin()->first;
}

std::string compare(const IndexSet& lib, const PointSet& bf, const Rat& hi, int kmax)
{
    std::vector<Rat> zs;
    for (const auto& [z, k] : bf) zs.push_back(z);
    for (const auto& [z, k] : closure(lib, hi)) zs.push_back(z);
    for (const auto& z : zs)
        for (int k = 0; k <= kmax; ++k) {
            auto it = bf.find(z);
            bool want = it != bf.end() && it->second >= k;
            if (lib.contains({z, k}) != want)
                return "(" + mwc::fmt_rat(z) + "," + std::to_string(k) + ") " + (want ? "missing from " : "extra in ") +
                       lib.str();
        }
    return {};
}

IndexSet random_set(std::mt19937& rng, bool allow_empty)
{
    static const Rat zs[] = {Rat(-1), Rat(-1, 2), Rat(0), Rat(1, 2), Rat(1)};
    std::uniform_int_distribution<int> n(allow_empty ? 0 : 1, 3), pick(0, 4), log(0, 2);
    std::vector<mwc::Gen> raw;
    for (int i = n(rng); i > 0; --i) raw.push_back({zs[pick(rng)], log(rng)});
    return IndexSet::normalize(raw);
}

std::vector<double> roots_oracle(const Block& b)
{
    using Eigen::MatrixXd;
    auto d = [](const Rat& r) { return mwc::to_double(r); };
    double lo = d(Rat(b.h - 1, 2)), hi = d(Rat(b.h + 1, 2));
    int n = b.zeta ? 2 : 1;
    // basis per component: harmonic form, or {phi (degree q), d phi (degree q+1)}
    MatrixXd D = MatrixXd::Zero(n, n), N = MatrixXd::Zero(n, n);
    N(0, 0) = b.q;
    if (b.zeta) {
        N(1, 1) = b.q + 1;
        D(1, 0) = 1;          // d phi
        D(0, 1) = d(*b.zeta); // delta d phi = zeta phi
    }
    MatrixXd I = MatrixXd::Identity(n, n);
    MatrixXd A(2 * n, 2 * n), B = MatrixXd::Zero(2 * n, 2 * n);
    A << D, lo * I - N, hi * I - N, -D;
    B.topRightCorner(n, n) = -I;
    B.bottomLeftCorner(n, n) = I;
    Eigen::FullPivLU<MatrixXd> lu(B);
    if (!lu.isInvertible()) throw std::runtime_error("singular B: malformed block");
    MatrixXd M = -lu.solve(A);
    Eigen::EigenSolver<MatrixXd> es(M);
    std::vector<double> out;
    for (int i = 0; i < M.rows(); ++i) {
        auto ev = es.eigenvalues()[i];
        if (std::abs(ev.imag()) > 1e-9) throw std::runtime_error("non-real indicial root");
        out.push_back(ev.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

mwc::SpectralData block_data(const Block& b)
{
    mwc::SpectralData d;
    d.name = "block";
    d.h = b.h;
    if (b.zeta) d.spec_delta_d[b.q] = {*b.zeta};
    else d.betti[b.q] = 1;
    return d;
}

} // namespace oracle
