#pragma once

#include "equinet/nets.hpp"
#include "equinet/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace equinet {

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string &s);

struct TrainConfig {
  Optimizer optimizer = Optimizer::adam;
  double learning_rate = 0.01;
  int batch_size = 32;
  int max_epochs = 200;
  std::uint64_t seed = 1;
  /// Stop once the grid sup-error drops to this value (the approximation
  /// epsilon); 0 keeps training for the full epoch budget.
  double target_sup_error = 0.0;
  /// Epochs without a new best grid error before stopping; 0 disables.
  int patience = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct TargetFunction {
  std::string name;
  int input_dim = 0;
  int output_dim = 1;
  std::function<std::vector<double>(std::span<const double>)> eval;
};

/// Known names: "sum" and "prod_plus_sumsq" (scalar, permutation
/// invariant), "coord_sq_plus_sum" (vector, permutation equivariant:
/// F(x)_i = x_i^2 + sum_j x_j).
TargetFunction make_target(const std::string &name, int n);

struct Dataset {
  int input_dim = 0;
  int output_dim = 0;
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  std::string generator;
};

/// `count` uniform samples over [lo, hi]^n labeled by the target.
Dataset sample_dataset(const TargetFunction &target, int count, Rng &rng,
                       double lo = 0.0, double hi = 1.0);

struct BatchGradient {
  double mse = 0.0;
  std::vector<double> grad;
};

/// Mean-squared loss over the given sample rows and its gradient; shared
/// parameters accumulate over every placement. Throws std::runtime_error on
/// a non-finite network output.
BatchGradient backprop(const Network &net, const Dataset &data,
                       std::span<const int> rows);

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int points_per_dim = 21;
};

/// Max over the full grid of the max-norm residual |net(x) - target(x)|.
/// The grid has points_per_dim^n points, capped at 1e6.
double grid_sup_error(const Network &net, const TargetFunction &target,
                      const GridSpec &grid);

struct EpochStats {
  int epoch = 0; // 0 is the pre-training state
  double train_mse = 0.0;
  double grid_sup_error = 0.0;
  double symmetry_residual = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> log;
  double final_sup_error = 0.0; // equals best_sup_error; the net is restored
  double best_sup_error = 0.0;
  int best_epoch = 0;
  bool reached_target = false;
  bool aborted_nan = false;
  std::string target_name;
};

/// Initializes the parameters from config.seed, then runs shuffled
/// mini-batch gradient descent on the dataset MSE. Every run is bitwise
/// deterministic for a given (net spec, dataset, config). The network is
/// left at the parameters of its best grid-error epoch. Tying is
/// structural, so symmetry holds after every step.
TrainReport train(Network &net, const Dataset &data,
                  const TargetFunction &target, const GridSpec &grid,
                  const TrainConfig &config);

/// CSV rendering of the per-epoch log:
/// epoch,train_mse,grid_sup_error,equivariance_residual
std::string train_log_csv(const TrainReport &report);

} // namespace equinet
