#include "omi/analysis.hpp"

#include "omi/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace omi {

namespace {

// Normalized rate search range (rate * span).
constexpr double kMinNormRate = 1e-3;
constexpr double kMaxNormRate = 1e3;
constexpr int kScanPoints = 241;
constexpr int kBrentBits = 40;
constexpr std::uintmax_t kMaxIterations = 200;

struct Normalized {
    Eigen::VectorXd t;  // (t - origin) / span
    Eigen::VectorXd y;  // y / y_scale
    double span = 1.0;
    double y_scale = 1.0;
};

struct Profile {
    double a = 0.0;
    double b = 0.0;
    double cost = 0.0;
};

// Best (a, b) at fixed k and the residual cost: the fit is separable, so the
// rate is the only nonlinear unknown.
Profile profile(const Normalized& d, double k) {
    const Eigen::VectorXd e = (-k * d.t.array()).exp();
    Eigen::MatrixXd A(d.t.size(), 2);
    A.col(0).setOnes();
    A.col(1) = e;
    const Eigen::Vector2d ab = A.colPivHouseholderQr().solve(d.y);
    return {ab(0), ab(1), (d.y - A * ab).squaredNorm()};
}

}  // namespace

FitResult fit_exponential_points(std::span<const double> t, std::span<const double> y,
                                 std::size_t min_points, double t_origin) {
    if (t.size() != y.size()) throw DomainError("fit_exponential: t and y sizes differ");
    if (t.size() < min_points || t.size() < 3) {
        throw RankError("fit_exponential: need at least " + std::to_string(min_points) +
                        " samples, got " + std::to_string(t.size()));
    }
    const auto n = static_cast<Eigen::Index>(t.size());
    double ymax = 0.0;
    for (double v : y) {
        if (!std::isfinite(v)) throw DomainError("fit_exponential: non-finite data");
        ymax = std::max(ymax, std::abs(v));
    }
    for (double v : y) {
        if (v < -1e-12 * ymax) throw DomainError("fit_exponential: data must be non-negative");
    }
    const auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
    if (!(*tmax > *tmin)) throw RankError("fit_exponential: all samples at one time");

    Normalized d;
    d.span = *tmax - t_origin;
    if (!(d.span > 0.0)) d.span = *tmax - *tmin;
    d.y_scale = ymax;
    d.t.resize(n);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.t(i) = (t[i] - t_origin) / d.span;
        d.y(i) = ymax > 0.0 ? y[i] / ymax : 0.0;
    }
    if (!(d.y.maxCoeff() - d.y.minCoeff() > 1e-12)) {
        throw FitRejectedError("fit_exponential: data does not decay (constant)");
    }
    // b e^{-kt} with b, k > 0 always has a negative least-squares slope.
    const double t_mean = d.t.mean();
    if (!(((d.t.array() - t_mean) * (d.y.array() - d.y.mean())).sum() < 0.0)) {
        throw FitRejectedError("fit_exponential: data does not decay (non-negative trend)");
    }

    // Coarse scan in log k, then Brent between the neighbours of the best point.
    const double lmin = std::log(kMinNormRate);
    const double lmax = std::log(kMaxNormRate);
    const double h = (lmax - lmin) / (kScanPoints - 1);
    std::vector<double> history;
    history.reserve(kScanPoints + kMaxIterations);
    int best = 0;
    for (int i = 0; i < kScanPoints; ++i) {
        history.push_back(profile(d, std::exp(lmin + h * i)).cost);
        if (history.back() < history[best]) best = i;
    }
    if (best == 0 || best == kScanPoints - 1) {
        throw FitNotConvergedError("fit_exponential: rate outside the searchable range", history);
    }
    std::uintmax_t iters = kMaxIterations;
    const auto [lk, cost] = boost::math::tools::brent_find_minima(
        [&](double l) {
            const double c = profile(d, std::exp(l)).cost;
            history.push_back(c);
            return c;
        },
        lmin + h * (best - 1), lmin + h * (best + 1), kBrentBits, iters);
    if (iters >= kMaxIterations) {
        throw FitNotConvergedError("fit_exponential: no convergence after " +
                                       std::to_string(kMaxIterations) + " iterations",
                                   history);
    }
    const double k = std::exp(lk);
    const Profile pr = profile(d, k);

    FitResult fr;
    fr.rate = k / d.span;
    fr.amplitude = pr.b * d.y_scale;
    fr.baseline = pr.a * d.y_scale;
    fr.rms_residual = std::sqrt(cost / static_cast<double>(n)) * d.y_scale;
    fr.window = {t_origin, *tmax};
    fr.iterations = static_cast<int>(iters);
    if (!(fr.rate > 0.0) || !(fr.amplitude > 0.0)) {
        throw FitRejectedError("fit_exponential: fitted rate " + std::to_string(fr.rate) +
                               " rad/s is not a decay");
    }
    return fr;
}

FitResult fit_exponential(const RealTrace& trace, Window window) {
    if (!(window.t_end > window.t_start)) {
        throw RangeError("fit_exponential: empty or inverted window");
    }
    std::vector<double> t;
    std::vector<double> y;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double ti = trace.time(i);
        if (ti < window.t_start || ti > window.t_end) continue;
        t.push_back(ti);
        y.push_back(trace[i]);
    }
    FitResult fr = fit_exponential_points(t, y, kMinTraceFitSamples, window.t_start);
    fr.window = window;
    return fr;
}

FringeResult fit_fringe(std::span<const double> phis, std::span<const double> energies) {
    if (phis.size() != energies.size()) throw DomainError("fit_fringe: size mismatch");

    std::vector<double> wrapped;
    for (double p : phis) {
        double w = std::fmod(p, kTwoPi);
        if (w < 0) w += kTwoPi;
        wrapped.push_back(w);
    }
    std::sort(wrapped.begin(), wrapped.end());
    std::vector<double> distinct;
    for (double w : wrapped) {
        if (distinct.empty() || w - distinct.back() > 1e-9) distinct.push_back(w);
    }
    if (distinct.size() > 1 && kTwoPi - distinct.back() + distinct.front() <= 1e-9) {
        distinct.pop_back();
    }
    if (distinct.size() < 5) {
        throw RankError("fit_fringe: need at least 5 distinct phases, got " +
                        std::to_string(distinct.size()));
    }
    double max_gap = kTwoPi - distinct.back() + distinct.front();
    for (std::size_t i = 1; i < distinct.size(); ++i) {
        max_gap = std::max(max_gap, distinct[i] - distinct[i - 1]);
    }
    if (kTwoPi - max_gap < std::numbers::pi - 1e-12) {
        throw RankError("fit_fringe: phases must cover an arc of at least pi");
    }

    const auto n = static_cast<Eigen::Index>(phis.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd E(n);
    double emax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = std::cos(phis[i]);
        A(i, 2) = std::sin(phis[i]);
        E(i) = energies[i];
        emax = std::max(emax, std::abs(energies[i]));
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(E);

    FringeResult fr;
    fr.mean = c(0);
    fr.contrast = std::hypot(c(1), c(2));
    fr.rms_residual = std::sqrt((E - A * c).squaredNorm() / static_cast<double>(n));
    fr.phi0_defined = fr.contrast > 1e-12 * emax && fr.contrast > 0.0;
    if (fr.phi0_defined) {
        fr.phi0 = std::atan2(c(2), c(1));
        if (fr.phi0 < 0) fr.phi0 += kTwoPi;
    }
    fr.visibility = fr.mean > 0.0 ? fr.contrast / fr.mean : 0.0;
    return fr;
}

double suppression_metric(double gamma_B, double gamma_D, double gamma1, double gamma2) {
    const double mean = 0.5 * (gamma1 + gamma2);
    if (!(gamma_B > mean)) {
        throw DomainError("suppression_metric: gamma_B must exceed the mean bare damping");
    }
    return (gamma_B - gamma_D) / (gamma_B - mean);
}

namespace {

bool adiabatic_regime(const SystemParams& p) {
    double largest = std::max(p.gamma1, p.gamma2);
    for (int j = 0; j < 2; ++j) largest = std::max(largest, p.G[j][j]);
    return p.kappa >= 10.0 * largest;
}

}  // namespace

DampingPrediction predicted_total_damping(const SystemParams& params, int mode) {
    if (mode < 0 || mode > 1) throw DomainError("predicted_total_damping: mode must be 0 or 1");
    const double g = params.gamma(mode);
    return {g * (1.0 + cooperativity(params.G[mode][mode], g, params.kappa)),
            adiabatic_regime(params)};
}

DampingPrediction predicted_bright_damping(const SystemParams& params) {
    if (!(params.kappa > 0.0)) throw DomainError("predicted_bright_damping: kappa must be > 0");
    const double g11 = params.G[0][0];
    const double g22 = params.G[1][1];
    return {params.gamma_mean() + 4.0 * (g11 * g11 + g22 * g22) / params.kappa,
            adiabatic_regime(params)};
}

double effective_cooperativity(double fitted_rate, double gamma_ref) {
    if (!(gamma_ref > 0.0)) throw DomainError("effective_cooperativity: gamma_ref must be > 0");
    return fitted_rate / gamma_ref - 1.0;
}

std::vector<double> omit_spectrum(const SystemParams& params,
                                  std::span<const double> probe_shifts,
                                  std::array<double, 2> two_photon_offsets,
                                  cplx signal_amplitude) {
    const cplx I{0.0, 1.0};
    const cplx source = std::sqrt(params.kappa_ext) * signal_amplitude;
    std::vector<double> out;
    out.reserve(probe_shifts.size());
    for (double x : probe_shifts) {
        cplx den = I * (params.Delta - x) + 0.5 * params.kappa;
        for (int j = 0; j < 2; ++j) {
            const double g = params.G[j][j];
            if (g == 0.0) continue;
            const double dj = params.delta + x + two_photon_offsets[j];
            den += g * g / (0.5 * params.gamma(j) - I * dj);
        }
        out.push_back(std::norm(source / den));
    }
    return out;
}

}  // namespace omi
