#include "ipid/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ipid/common.hpp"
#include "ipid/quadrature.hpp"

namespace ipid {

// ---------------------------------------------------------------------------
// StageDensity

StageDensity StageDensity::gaussian(double mean, double variance) {
    require(std::isfinite(mean), "Gaussian mean must be finite");
    require(std::isfinite(variance) && variance > 0.0, "Gaussian variance must be finite and > 0");
    StageDensity d;
    d.name_ = "gaussian";
    d.mean_ = mean;
    d.scale_ = std::sqrt(variance);
    d.log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi * variance);
    return d;
}

StageDensity StageDensity::custom(std::string name, LogPdf log_pdf, Sampler sampler, double center,
                                  double scale) {
    require(static_cast<bool>(log_pdf) && static_cast<bool>(sampler),
            "custom density needs a log-pdf and a sampler");
    require(std::isfinite(center) && std::isfinite(scale) && scale > 0.0,
            "custom density needs a finite center and positive scale");
    StageDensity d;
    d.name_ = std::move(name);
    d.mean_ = center;
    d.scale_ = scale;
    d.custom_ = std::make_shared<const Custom>(Custom{std::move(log_pdf), std::move(sampler)});
    return d;
}

double StageDensity::log_pdf(double x) const {
    if (custom_) return custom_->log_pdf(x);
    const double z = (x - mean_) / scale_;
    return log_norm_ - 0.5 * z * z;
}

double StageDensity::pdf(double x) const { return std::exp(log_pdf(x)); }

double StageDensity::sample(RandomSource& rng) const {
    if (custom_) return custom_->sampler(rng);
    return mean_ + scale_ * rng.standard_normal();
}

bool StageDensity::same_law(const StageDensity& other) const {
    if (!custom_ && !other.custom_) return mean_ == other.mean_ && scale_ == other.scale_;
    return custom_ == other.custom_;
}

// ---------------------------------------------------------------------------
// IpidScenario

IpidScenario::IpidScenario(std::vector<StageDensity> pre, std::vector<StageDensity> post)
    : pre_(std::move(pre)), post_(std::move(post)) {
    require(!pre_.empty(), "scenario period must be >= 1");
    require(pre_.size() == post_.size(),
            "scenario needs as many post-change laws as pre-change laws (got " +
                std::to_string(pre_.size()) + " and " + std::to_string(post_.size()) + ")");
}

IpidScenario IpidScenario::gaussian(const std::vector<double>& pre_means,
                                    const std::vector<double>& pre_variances,
                                    const std::vector<double>& post_means,
                                    const std::vector<double>& post_variances) {
    const std::size_t T = pre_means.size();
    require(pre_variances.size() == T && post_means.size() == T && post_variances.size() == T,
            "Gaussian scenario lists must all have period entries");
    std::vector<StageDensity> pre, post;
    for (std::size_t i = 0; i < T; ++i) {
        pre.push_back(StageDensity::gaussian(pre_means[i], pre_variances[i]));
        post.push_back(StageDensity::gaussian(post_means[i], post_variances[i]));
    }
    return IpidScenario(std::move(pre), std::move(post));
}

bool IpidScenario::is_degenerate() const {
    for (std::size_t i = 0; i < period(); ++i)
        if (!pre_[i].same_law(post_[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// ChangePrior

ChangePrior ChangePrior::geometric(double rho) {
    require(rho > 0.0 && rho < 1.0, "geometric prior needs rho in (0, 1)");
    ChangePrior p;
    p.geometric_ = true;
    p.rho_ = rho;
    p.log1m_rho_ = std::log1p(-rho);
    return p;
}

ChangePrior ChangePrior::explicit_masses(std::vector<double> masses) {
    require(!masses.empty(), "explicit prior needs at least one mass");
    double total = 0.0;
    for (double m : masses) {
        require(std::isfinite(m) && m >= 0.0, "explicit prior masses must be finite and >= 0");
        total += m;
    }
    require(total <= 1.0 + 1e-9, "explicit prior masses sum to more than one");

    ChangePrior p;
    p.geometric_ = false;
    p.beyond_ = total < 1.0 - 1e-9 ? 1.0 - total : 0.0;
    p.masses_ = std::move(masses);
    const std::size_t N = p.masses_.size();
    // Suffix sums keep small tails accurate.
    p.tails_.assign(N + 1, 0.0);
    p.tails_[N] = p.beyond_;
    for (std::size_t n = N; n-- > 0;) p.tails_[n] = p.tails_[n + 1] + p.masses_[n];
    return p;
}

double ChangePrior::rho() const {
    require(geometric_, "rho() is only defined for a geometric prior");
    return rho_;
}

double ChangePrior::mass(std::int64_t n) const {
    if (n < 1) return 0.0;
    if (geometric_) return std::exp(log_mass(n));
    const auto idx = static_cast<std::size_t>(n - 1);
    return idx < masses_.size() ? masses_[idx] : 0.0;
}

double ChangePrior::log_mass(std::int64_t n) const {
    if (n < 1) return -INFINITY;
    if (geometric_) return static_cast<double>(n - 1) * log1m_rho_ + std::log(rho_);
    return std::log(mass(n));
}

double ChangePrior::tail(std::int64_t n) const {
    if (n <= 0) return 1.0;
    if (geometric_) return std::exp(log_tail(n));
    const auto idx = static_cast<std::size_t>(n);
    return idx < tails_.size() ? tails_[idx] : beyond_;
}

double ChangePrior::log_tail(std::int64_t n) const {
    if (n <= 0) return 0.0;
    if (geometric_) return static_cast<double>(n) * log1m_rho_;
    return std::log(tail(n));
}

std::optional<std::int64_t> ChangePrior::sample(RandomSource& rng, std::int64_t horizon) const {
    const double u = rng.uniform_open0();
    if (geometric_) {
        // Inverse CDF: P(nu > k) = (1 - rho)^k.
        const double k = std::floor(std::log(u) / log1m_rho_);
        if (!(k < static_cast<double>(horizon))) return std::nullopt;
        return static_cast<std::int64_t>(k) + 1;
    }
    // Walk the table from the top: nu > n iff u <= P(nu > n).
    const std::size_t N = masses_.size();
    for (std::size_t n = 1; n <= N; ++n) {
        if (u > tails_[n]) {
            const auto nu = static_cast<std::int64_t>(n);
            if (nu > horizon) return std::nullopt;
            return nu;
        }
    }
    if (static_cast<std::int64_t>(N) >= horizon) return std::nullopt;
    throw Error(ErrorKind::InvalidArgument,
                "explicit prior table ends before the simulation horizon while mass remains beyond it");
}

// ---------------------------------------------------------------------------
// Indexing and likelihood ratios

std::size_t stage_of(std::int64_t n, std::size_t period) {
    require(n >= 1, "time index must be >= 1");
    require(period >= 1, "period must be >= 1");
    return static_cast<std::size_t>((n - 1) % static_cast<std::int64_t>(period)) + 1;
}

double log_likelihood_ratio(const IpidScenario& scenario, std::int64_t n, double y) {
    const std::size_t s = stage_index(n, scenario.period());
    return scenario.post(s).log_pdf(y) - scenario.pre(s).log_pdf(y);
}

// ---------------------------------------------------------------------------
// Sampling

PathStream::PathStream(const IpidScenario& scenario, const ChangePrior& prior, std::int64_t horizon,
                       std::uint64_t seed, std::uint64_t stream)
    : scenario_(&scenario), rng_(seed, stream), horizon_(horizon) {
    require(horizon >= 1, "horizon must be >= 1");
    change_point_ = prior.sample(rng_, horizon);
}

double PathStream::next() {
    require(time_ < horizon_, "sample path exhausted at its horizon");
    ++time_;
    const std::size_t s = stage_index(time_, scenario_->period());
    const bool changed = change_point_ && time_ >= *change_point_;
    return changed ? scenario_->post(s).sample(rng_) : scenario_->pre(s).sample(rng_);
}

SamplePath sample_path(const IpidScenario& scenario, const ChangePrior& prior, std::int64_t horizon,
                       std::uint64_t seed, std::uint64_t stream) {
    PathStream stream_gen(scenario, prior, horizon, seed, stream);
    SamplePath path;
    path.change_point = stream_gen.change_point();
    path.horizon = horizon;
    path.seed = seed;
    path.stream = stream;
    path.observations.reserve(static_cast<std::size_t>(horizon));
    while (!stream_gen.exhausted()) path.observations.push_back(stream_gen.next());
    return path;
}

// ---------------------------------------------------------------------------
// Information quantities

double kl_divergence_quadrature(const StageDensity& g, const StageDensity& f, std::size_t nodes) {
    const double lo = std::min(g.mean() - 10.0 * g.stddev(), f.mean() - 10.0 * f.stddev());
    const double hi = std::max(g.mean() + 10.0 * g.stddev(), f.mean() + 10.0 * f.stddev());
    const SimpsonRule rule = make_simpson_rule(lo, hi, nodes);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double lg = g.log_pdf(rule.nodes[k]);
        if (lg == -INFINITY) continue;
        sum += rule.weights[k] * std::exp(lg) * (lg - f.log_pdf(rule.nodes[k]));
    }
    return sum;
}

double kl_divergence(const StageDensity& g, const StageDensity& f) {
    if (g.is_gaussian() && f.is_gaussian()) {
        const double vg = g.variance();
        const double vf = f.variance();
        const double dm = g.mean() - f.mean();
        return 0.5 * (std::log(vf / vg) + (vg + dm * dm) / vf - 1.0);
    }
    return kl_divergence_quadrature(g, f);
}

double kl_information(const IpidScenario& scenario) {
    double sum = 0.0;
    for (std::size_t i = 0; i < scenario.period(); ++i) {
        const double d = kl_divergence(scenario.post(i), scenario.pre(i));
        if (!std::isfinite(d))
            throw Error(ErrorKind::Numerical, "KL divergence of stage " + std::to_string(i + 1) +
                                                  " is not finite");
        sum += d;
    }
    const double info = sum / static_cast<double>(scenario.period());
    if (!(info > 0.0))
        throw Error(ErrorKind::InvalidArgument,
                    "information number is zero: post-change laws equal pre-change laws");
    return info;
}

TailExponent prior_tail_exponent(const ChangePrior& prior) {
    if (prior.is_geometric()) return {std::abs(std::log1p(-prior.rho())), false, 0};

    // Largest tabulated n whose tail is still a normal double.
    const auto N = static_cast<std::int64_t>(prior.table_size());
    for (std::int64_t n = N; n >= 1; --n) {
        const double t = prior.tail(n);
        if (t >= std::numeric_limits<double>::min() && t < 1.0)
            return {-std::log(t) / static_cast<double>(n), true, n};
    }
    return {0.0, true, 0};
}

}  // namespace ipid
