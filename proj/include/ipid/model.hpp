#pragma once

// Laws of independent, periodically identically distributed observation
// processes with a single change point.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipid/random.hpp"

namespace ipid {

// One marginal law of the observation process. Gaussian is built in; other
// laws plug in through a log-pdf evaluator and a sampler.
class StageDensity {
public:
    using LogPdf = std::function<double(double)>;
    using Sampler = std::function<double(RandomSource&)>;

    static StageDensity gaussian(double mean, double variance);

    // `center` and `scale` locate the bulk of the mass; quadrature windows are
    // built from them as they would be from a Gaussian mean and deviation.
    static StageDensity custom(std::string name, LogPdf log_pdf, Sampler sampler,
                               double center, double scale);

    double log_pdf(double x) const;
    double pdf(double x) const;
    double sample(RandomSource& rng) const;

    bool is_gaussian() const { return !custom_; }
    double mean() const { return mean_; }
    double stddev() const { return scale_; }
    double variance() const { return scale_ * scale_; }
    const std::string& name() const { return name_; }

    // Parameter equality for Gaussians, identity of the evaluator otherwise.
    bool same_law(const StageDensity& other) const;

private:
    struct Custom {
        LogPdf log_pdf;
        Sampler sampler;
    };

    StageDensity() = default;

    std::string name_;
    double mean_ = 0.0;
    double scale_ = 1.0;
    double log_norm_ = 0.0;
    std::shared_ptr<const Custom> custom_;
};

class IpidScenario {
public:
    IpidScenario(std::vector<StageDensity> pre, std::vector<StageDensity> post);

    // Gaussian scenario from per-stage means and variances.
    static IpidScenario gaussian(const std::vector<double>& pre_means,
                                 const std::vector<double>& pre_variances,
                                 const std::vector<double>& post_means,
                                 const std::vector<double>& post_variances);

    std::size_t period() const { return pre_.size(); }
    // 0-based stage index.
    const StageDensity& pre(std::size_t stage) const { return pre_.at(stage); }
    const StageDensity& post(std::size_t stage) const { return post_.at(stage); }

    // True when every post-change law equals its pre-change law.
    bool is_degenerate() const;

private:
    std::vector<StageDensity> pre_;
    std::vector<StageDensity> post_;
};

// Prior on the change point nu >= 1.
class ChangePrior {
public:
    static ChangePrior geometric(double rho);
    // masses[i] = P(nu = i + 1). Any deficit of the total below one is mass
    // beyond the table.
    static ChangePrior explicit_masses(std::vector<double> masses);

    bool is_geometric() const { return geometric_; }
    double rho() const;

    double mass(std::int64_t n) const;       // P(nu = n)
    double log_mass(std::int64_t n) const;
    double tail(std::int64_t n) const;       // P(nu > n)
    double log_tail(std::int64_t n) const;

    // Number of tabulated masses (0 for geometric).
    std::size_t table_size() const { return masses_.size(); }
    double mass_beyond_table() const { return beyond_; }

    // Draws nu; nullopt when nu exceeds `horizon`.
    std::optional<std::int64_t> sample(RandomSource& rng, std::int64_t horizon) const;

private:
    ChangePrior() = default;

    bool geometric_ = true;
    double rho_ = 0.0;
    double log1m_rho_ = 0.0;
    std::vector<double> masses_;
    std::vector<double> tails_;  // tails_[n] = P(nu > n), n = 0..N
    double beyond_ = 0.0;
};

// Maps time index n >= 1 onto its 1-based stage ((n-1) mod T) + 1.
std::size_t stage_of(std::int64_t n, std::size_t period);
// Same map, 0-based.
inline std::size_t stage_index(std::int64_t n, std::size_t period) { return stage_of(n, period) - 1; }

// log g_stage(y) - log f_stage(y) for time index n.
double log_likelihood_ratio(const IpidScenario& scenario, std::int64_t n, double y);

struct SamplePath {
    std::optional<std::int64_t> change_point;  // nullopt: beyond the horizon
    std::vector<double> observations;          // y_1..y_H
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Lazily generated sample path. Draws are made in the same order as
// sample_path(), so the two agree value for value.
class PathStream {
public:
    PathStream(const IpidScenario& scenario, const ChangePrior& prior, std::int64_t horizon,
               std::uint64_t seed, std::uint64_t stream);

    std::optional<std::int64_t> change_point() const { return change_point_; }
    std::int64_t horizon() const { return horizon_; }
    // Index of the observation the next call to next() returns.
    std::int64_t next_time() const { return time_ + 1; }
    bool exhausted() const { return time_ >= horizon_; }
    double next();

private:
    const IpidScenario* scenario_;
    RandomSource rng_;
    std::optional<std::int64_t> change_point_;
    std::int64_t horizon_;
    std::int64_t time_ = 0;
};

SamplePath sample_path(const IpidScenario& scenario, const ChangePrior& prior, std::int64_t horizon,
                       std::uint64_t seed, std::uint64_t stream = 0);

// D(g || f) for one pair of laws; closed form when both are Gaussian.
double kl_divergence(const StageDensity& g, const StageDensity& f);
// Composite Simpson over [min mean - 10 sd, max mean + 10 sd].
double kl_divergence_quadrature(const StageDensity& g, const StageDensity& f,
                                std::size_t nodes = 4001);

// Period-averaged divergence I. Throws when I is zero or not finite.
double kl_information(const IpidScenario& scenario);

struct TailExponent {
    double value = 0.0;
    bool truncated_estimate = false;  // estimated from a finite table
    std::int64_t at_n = 0;            // index used by the estimate
};

TailExponent prior_tail_exponent(const ChangePrior& prior);

}  // namespace ipid
