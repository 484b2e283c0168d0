#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spo/pairbuilder/pairbuilder.hpp"
#include "spo/policy/policy.hpp"

namespace spo::dpo {

struct DpoConfig {
    double beta = 0.1;
    double learning_rate = 2e-5;
    int epochs = 3;
    std::uint64_t shuffle_seed = 0;
    int batch_size = 1;
};

struct EpochStats {
    double mean_loss = 0.0;
    double mean_margin = 0.0;     // mean of beta * (delta_chosen - delta_rejected)
    double pair_accuracy = 0.0;   // fraction of pairs with positive margin
};

struct TrainStats {
    std::vector<EpochStats> epochs;
};

// -ln sigmoid(z) in the overflow-safe softplus form.
double loss_from_margin(double z);

// The inner margin z = beta * [(lp_th(R+) - lp_ref(R+)) - (lp_th(R-) - lp_ref(R-))].
double margin_from_logps(double lp_c_theta, double lp_c_ref, double lp_r_theta, double lp_r_ref,
                         double beta);

double dpo_loss(const policy::PolicyParams& theta, const policy::PolicyParams& theta_ref,
                const pairbuilder::PreferencePair& pair, double beta);

// -beta * sigmoid(-z) * [grad lp(R+) - grad lp(R-)], sparse and sorted.
// The frozen reference contributes no gradient.
std::vector<std::pair<std::uint32_t, double>> dpo_grad(const policy::PolicyParams& theta,
                                                       const policy::PolicyParams& theta_ref,
                                                       const pairbuilder::PreferencePair& pair,
                                                       double beta);

// Plain shuffled per-pair SGD (mean gradient within a batch). theta_ref stays
// frozen; deterministic for a fixed shuffle seed.
std::pair<policy::PolicyParams, TrainStats> train(const policy::PolicyParams& theta0,
                                                  const policy::PolicyParams& theta_ref,
                                                  const pairbuilder::PreferenceDataset& data,
                                                  const DpoConfig& cfg);

struct GradCheckReport {
    double max_rel_err = 0.0;
    bool pass = false;
};

// Central finite differences on the active coordinates only. Reports rather
// than throws when the comparison fails.
GradCheckReport grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& x,
                           const std::vector<std::pair<std::uint32_t, double>>& analytic, double h,
                           double tolerance);

}  // namespace spo::dpo
