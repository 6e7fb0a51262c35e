#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance binary. None of these call into the library's numerics.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ipid/model.hpp"
#include "ipid/periodic_mdp.hpp"

namespace ipid::oracle {

inline double normal_pdf(double x, double m, double sd) {
    const double z = (x - m) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * std::numbers::pi));
}

// Classical Shiryaev value function on a uniform grid: stop for
// lambda (1 - p), continue for p plus the expected interpolated value after
// one observation. Composite Simpson, same window convention.
inline std::vector<double> classical_shiryaev(double mf, double sf, double mg, double sg,
                                              double lambda, double rho, std::size_t M,
                                              std::size_t nodes, double tol) {
    const double lo = std::min(mf - 8 * sf, mg - 8 * sg);
    const double hi = std::max(mf + 8 * sf, mg + 8 * sg);
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    std::vector<double> x(nodes), w(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        x[k] = lo + h * static_cast<double>(k);
        w[k] = h / 3 * (k == 0 || k == nodes - 1 ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0));
    }
    x[nodes - 1] = hi;
    std::vector<double> V(M, 0.0), next(M);
    auto interp = [&](double p) {
        const double t = p * static_cast<double>(M - 1);
        std::size_t j = std::min(static_cast<std::size_t>(t), M - 2);
        return V[j] + (t - static_cast<double>(j)) * (V[j + 1] - V[j]);
    };
    for (int it = 0; it < 100000; ++it) {
        double diff = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double p = static_cast<double>(i) / static_cast<double>(M - 1);
            const double pt = p + (1 - p) * rho;
            double a = 0.0;
            for (std::size_t k = 0; k < nodes; ++k) {
                const double g = normal_pdf(x[k], mg, sg), f = normal_pdf(x[k], mf, sf);
                const double mix = pt * g + (1 - pt) * f;
                a += w[k] * mix * interp(pt * g / mix);
            }
            next[i] = std::min(lambda * (1 - p), p + a);
            diff = std::max(diff, std::abs(next[i] - V[i]));
        }
        V.swap(next);
        if (diff <= tol) break;
    }
    return V;
}

inline PeriodicMdp random_mdp(std::mt19937_64& rng, std::size_t S, std::size_t A, std::size_t T,
                              double discount) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PeriodicMdp mdp(S, A, T, discount);
    std::vector<double> row(S);
    for (std::size_t l = 0; l < T; ++l)
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                double sum = 0.0;
                for (double& p : row) sum += (p = u(rng) * u(rng));
                for (double& p : row) p /= sum;
                mdp.set_transition(l, s, a, row);
                mdp.set_cost(l, s, a, 5.0 * u(rng));
            }
    return mdp;
}

inline double log_sum_exp(const std::vector<double>& v) {
    double m = -INFINITY;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Posterior P(nu <= n | y_1..y_n) from the full mixture over change times,
// geometric prior pi_k = rho (1 - rho)^(k-1).
inline double direct_posterior(const IpidScenario& sc, double rho, const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t T = sc.period();
    std::vector<double> lf(n), lg(n);
    for (std::size_t i = 0; i < n; ++i) {
        lf[i] = sc.pre(i % T).log_pdf(y[i]);
        lg[i] = sc.post(i % T).log_pdf(y[i]);
    }
    std::vector<double> changed;
    for (std::size_t k = 1; k <= n; ++k) {
        double t = std::log(rho) + static_cast<double>(k - 1) * std::log1p(-rho);
        for (std::size_t i = 0; i + 1 < k; ++i) t += lf[i];
        for (std::size_t i = k - 1; i < n; ++i) t += lg[i];
        changed.push_back(t);
    }
    double none = static_cast<double>(n) * std::log1p(-rho);
    for (double v : lf) none += v;
    const double a = log_sum_exp(changed);
    return 1.0 / (1.0 + std::exp(none - a));
}

}  // namespace ipid::oracle
