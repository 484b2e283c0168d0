#include "spo/dpo/dpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "spo/rng.hpp"

namespace spo::dpo {

double loss_from_margin(double z) {
    // softplus(-z): branch keeps exp() arguments non-positive
    if (z >= 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

double margin_from_logps(double lp_c_theta, double lp_c_ref, double lp_r_theta, double lp_r_ref,
                         double beta) {
    return beta * ((lp_c_theta - lp_c_ref) - (lp_r_theta - lp_r_ref));
}

namespace {

void check_dims(const policy::PolicyParams& a, const policy::PolicyParams& b) {
    if (a.w.size() != b.w.size())
        throw std::invalid_argument("policy/reference dimension mismatch: " + std::to_string(a.w.size()) +
                                    " vs " + std::to_string(b.w.size()));
}

double pair_margin(const policy::SequenceScorer& scorer, const policy::PolicyParams& theta,
                   const policy::PolicyParams& theta_ref, const pairbuilder::PreferencePair& pair,
                   double beta) {
    double lp_c = scorer.logprob(theta, pair.chosen);
    double lp_r = scorer.logprob(theta, pair.rejected);
    double lp_c_ref = scorer.logprob(theta_ref, pair.chosen);
    double lp_r_ref = scorer.logprob(theta_ref, pair.rejected);
    return margin_from_logps(lp_c, lp_c_ref, lp_r, lp_r_ref, beta);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

double dpo_loss(const policy::PolicyParams& theta, const policy::PolicyParams& theta_ref,
                const pairbuilder::PreferencePair& pair, double beta) {
    check_dims(theta, theta_ref);
    policy::SequenceScorer scorer(*pair.model, *pair.context);
    return loss_from_margin(pair_margin(scorer, theta, theta_ref, pair, beta));
}

std::vector<std::pair<std::uint32_t, double>> dpo_grad(const policy::PolicyParams& theta,
                                                       const policy::PolicyParams& theta_ref,
                                                       const pairbuilder::PreferencePair& pair,
                                                       double beta) {
    check_dims(theta, theta_ref);
    policy::SequenceScorer scorer(*pair.model, *pair.context);
    const double z = pair_margin(scorer, theta, theta_ref, pair, beta);
    const double coeff = -beta * sigmoid(-z);

    auto g_c = scorer.grad_logprob(theta, pair.chosen);
    auto g_r = scorer.grad_logprob(theta, pair.rejected);

    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& [idx, v] : g_c) acc[idx] += coeff * v;
    for (const auto& [idx, v] : g_r) acc[idx] -= coeff * v;

    std::vector<std::pair<std::uint32_t, double>> out;
    out.reserve(acc.size());
    for (const auto& [idx, v] : acc) {
        if (std::abs(v) > 1e-12) out.emplace_back(idx, v);  // drop cancelled coordinates
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<policy::PolicyParams, TrainStats> train(const policy::PolicyParams& theta0,
                                                  const policy::PolicyParams& theta_ref,
                                                  const pairbuilder::PreferenceDataset& data,
                                                  const DpoConfig& cfg) {
    check_dims(theta0, theta_ref);
    if (data.pairs.empty()) throw std::invalid_argument("train: empty preference dataset");
    if (cfg.beta <= 0.0 || cfg.learning_rate < 0.0 || cfg.epochs < 1 || cfg.batch_size < 1)
        throw std::invalid_argument("train: bad config");

    policy::PolicyParams theta = theta0;
    TrainStats stats;
    const std::size_t n = data.pairs.size();
    std::vector<std::size_t> order(n);

    // per-pair scorers built once; their feature caches are parameter-free
    std::vector<policy::SequenceScorer> scorers;
    scorers.reserve(n);
    for (const auto& pair : data.pairs) scorers.emplace_back(*pair.model, *pair.context);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0u);
        Rng rng(mix_seed(cfg.shuffle_seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        EpochStats es;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            std::unordered_map<std::uint32_t, double> batch_grad;
            for (std::size_t bi = start; bi < stop; ++bi) {
                const auto& pair = data.pairs[order[bi]];
                const auto& scorer = scorers[order[bi]];
                double z = pair_margin(scorer, theta, theta_ref, pair, cfg.beta);
                es.mean_loss += loss_from_margin(z);
                es.mean_margin += z;
                if (z > 0.0) es.pair_accuracy += 1.0;
                const double coeff = -cfg.beta * sigmoid(-z);
                for (const auto& [idx, v] : scorer.grad_logprob(theta, pair.chosen))
                    batch_grad[idx] += coeff * v;
                for (const auto& [idx, v] : scorer.grad_logprob(theta, pair.rejected))
                    batch_grad[idx] -= coeff * v;
            }
            const double scale = cfg.learning_rate / static_cast<double>(stop - start);
            // apply in index order for a reproducible float schedule
            std::vector<std::pair<std::uint32_t, double>> upd(batch_grad.begin(), batch_grad.end());
            std::sort(upd.begin(), upd.end());
            for (const auto& [idx, v] : upd) theta.w[idx] -= scale * v;
        }
        es.mean_loss /= static_cast<double>(n);
        es.mean_margin /= static_cast<double>(n);
        es.pair_accuracy /= static_cast<double>(n);
        stats.epochs.push_back(es);
    }
    return {std::move(theta), std::move(stats)};
}

GradCheckReport grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& x,
                           const std::vector<std::pair<std::uint32_t, double>>& analytic, double h,
                           double tolerance) {
    if (h <= 0.0) throw std::invalid_argument("grad_check: h must be positive");
    GradCheckReport report;
    std::vector<double> probe = x;
    for (const auto& [coord, grad] : analytic) {
        probe[coord] = x[coord] + h;
        double up = f(probe);
        probe[coord] = x[coord] - h;
        double down = f(probe);
        probe[coord] = x[coord];
        double fd = (up - down) / (2.0 * h);
        double rel = std::abs(grad - fd) / std::max({std::abs(grad), std::abs(fd), 1e-6});
        report.max_rel_err = std::max(report.max_rel_err, rel);
    }
    report.pass = report.max_rel_err < tolerance;
    return report;
}

}  // namespace spo::dpo
