#include "mwc/spectral.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace mwc {

namespace odeint = boost::numeric::odeint;

// With s = log kappa the equation reads f'' = (alpha^2 + e^{2s}) f.
BesselProbe bessel_l2_probe(double alpha, double kappa_max, double kappa_min, const std::vector<double>& sample_at)
{
    if (!(alpha > 0)) throw SpectralError("bessel probe needs alpha > 0");
    if (!(kappa_min > 0 && kappa_min < 1 && kappa_max > 1)) throw SpectralError("bessel probe needs kappa_min < 1 < kappa_max");

    BesselProbe p;
    p.alpha = alpha;
    p.kappa_max = kappa_max;
    p.kappa_min = kappa_min;

    using State = std::array<double, 2>;
    const double a2 = alpha * alpha;
    auto rhs = [a2](const State& x, State& dx, double s) {
        dx[0] = x[1];
        dx[1] = (a2 + std::exp(2 * s)) * x[0];
    };

    constexpr int fit_points = 41;
    std::vector<double> kappas;
    for (int i = 0; i < fit_points; ++i) kappas.push_back(kappa_min * std::pow(4.0, double(i) / (fit_points - 1)));
    for (double k : sample_at) {
        if (k < kappa_min || k > kappa_max) throw SpectralError("bessel sample point outside the grid");
        kappas.push_back(k);
    }
    std::sort(kappas.begin(), kappas.end());
    kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());

    std::vector<double> times{std::log(kappa_max)};
    for (auto it = kappas.rbegin(); it != kappas.rend(); ++it)
        if (std::log(*it) < times.back()) times.push_back(std::log(*it));

    State x{std::exp(-kappa_max), -kappa_max * std::exp(-kappa_max)};
    std::vector<std::pair<double, double>> got;
    try {
        auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
        odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), -1e-3,
                                [&](const State& y, double s) { got.emplace_back(std::exp(s), y[0]); });
    } catch (const std::exception& e) {
        throw SpectralError(std::string("bessel integration failed: ") + e.what());
    }
    for (const auto& [k, f] : got)
        if (!std::isfinite(f) || f <= 0) throw SpectralError("bessel integration produced a non-positive value");

    std::reverse(got.begin(), got.end());
    // first sample is the seed at kappa_max
    if (!got.empty() && std::find(kappas.begin(), kappas.end(), kappa_max) == kappas.end()) got.pop_back();
    p.samples = got;

    // least squares slope of log f against log kappa on [kappa_min, 4 kappa_min]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [k, f] : got) {
        if (k > 4 * kappa_min * (1 + 1e-12)) continue;
        double lx = std::log(k), ly = std::log(f);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        ++n;
    }
    p.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    p.verdict = p.fitted_exponent <= -alpha / 2 ? "not_in_L2b" : "inconclusive";
    return p;
}

} // namespace mwc
