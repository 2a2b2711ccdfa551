#include "equinet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace equinet {

namespace {

void check_config(const TrainConfig &config) {
  if (config.learning_rate <= 0.0)
    throw std::invalid_argument("train: learning_rate must be positive");
  if (config.batch_size <= 0)
    throw std::invalid_argument("train: batch_size must be positive");
  if (config.max_epochs < 0)
    throw std::invalid_argument("train: max_epochs must be non-negative");
  if (config.patience < 0)
    throw std::invalid_argument("train: patience must be non-negative");
}

void check_dataset(const Network &net, const Dataset &data) {
  if (data.input_dim != net.input_dim || data.output_dim != net.output_dim)
    throw std::invalid_argument("dataset does not match the network shape");
  if (data.inputs.size() != data.targets.size())
    throw std::invalid_argument("dataset: inputs and targets differ in length");
  for (const auto &row : data.inputs)
    if (static_cast<int>(row.size()) != data.input_dim)
      throw std::invalid_argument("dataset: bad input row length");
  for (const auto &row : data.targets)
    if (static_cast<int>(row.size()) != data.output_dim)
      throw std::invalid_argument("dataset: bad target row length");
}

void append_number(std::string &out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

} // namespace

std::string to_string(Optimizer opt) {
  return opt == Optimizer::sgd ? "sgd" : "adam";
}

Optimizer optimizer_from_string(const std::string &s) {
  if (s == "sgd")
    return Optimizer::sgd;
  if (s == "adam")
    return Optimizer::adam;
  throw std::invalid_argument("unknown optimizer: " + s);
}

TargetFunction make_target(const std::string &name, int n) {
  if (n <= 0)
    throw std::invalid_argument("target: dimension must be positive");
  TargetFunction t;
  t.name = name;
  t.input_dim = n;
  if (name == "sum") {
    t.output_dim = 1;
    t.eval = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x)
        s += v;
      return std::vector<double>{s};
    };
  } else if (name == "prod_plus_sumsq") {
    t.output_dim = 1;
    t.eval = [](std::span<const double> x) {
      double prod = 1.0;
      double sumsq = 0.0;
      for (double v : x) {
        prod *= v;
        sumsq += v * v;
      }
      return std::vector<double>{prod + sumsq};
    };
  } else if (name == "coord_sq_plus_sum") {
    t.output_dim = n;
    t.eval = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x)
        s += v;
      std::vector<double> out(x.size());
      for (size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] * x[i] + s;
      return out;
    };
  } else {
    throw std::invalid_argument("unknown target: " + name);
  }
  return t;
}

Dataset sample_dataset(const TargetFunction &target, int count, Rng &rng,
                       double lo, double hi) {
  if (count <= 0)
    throw std::invalid_argument("sample_dataset: count must be positive");
  if (!(lo < hi))
    throw std::invalid_argument("sample_dataset: need lo < hi");
  Dataset data;
  data.input_dim = target.input_dim;
  data.output_dim = target.output_dim;
  data.generator = target.name + ":uniform[" + std::to_string(lo) + "," +
                   std::to_string(hi) + "]";
  data.inputs.reserve(count);
  data.targets.reserve(count);
  for (int s = 0; s < count; ++s) {
    std::vector<double> x(target.input_dim);
    for (double &v : x)
      v = rng.uniform(lo, hi);
    data.targets.push_back(target.eval(x));
    data.inputs.push_back(std::move(x));
  }
  return data;
}

BatchGradient backprop(const Network &net, const Dataset &data,
                       std::span<const int> rows) {
  check_dataset(net, data);
  BatchGradient out;
  out.grad.assign(net.params.size(), 0.0);
  if (rows.empty())
    return out;
  const double denom = static_cast<double>(rows.size()) * net.output_dim;
  ForwardCache cache;
  std::vector<double> grad_output(net.output_dim);
  double total = 0.0;
  for (int row : rows) {
    if (row < 0 || row >= static_cast<int>(data.inputs.size()))
      throw std::invalid_argument("backprop: sample index out of range");
    const std::vector<double> &y = forward_cached(net, data.inputs[row], cache);
    const std::vector<double> &t = data.targets[row];
    for (int i = 0; i < net.output_dim; ++i) {
      double r = y[i] - t[i];
      if (!std::isfinite(r))
        throw std::runtime_error("backprop: non-finite network output");
      total += r * r;
      grad_output[i] = 2.0 * r / denom;
    }
    backward(net, cache, grad_output, out.grad);
  }
  out.mse = total / denom;
  return out;
}

double grid_sup_error(const Network &net, const TargetFunction &target,
                      const GridSpec &grid) {
  if (target.input_dim != net.input_dim || target.output_dim != net.output_dim)
    throw std::invalid_argument("grid_sup_error: target does not match net");
  if (grid.points_per_dim < 1)
    throw std::invalid_argument("grid_sup_error: need points_per_dim >= 1");
  const int n = net.input_dim;
  if (std::pow(static_cast<double>(grid.points_per_dim), n) > 1e6)
    throw std::invalid_argument("grid_sup_error: grid exceeds 1e6 points");
  const double step = grid.points_per_dim > 1
                          ? (grid.hi - grid.lo) / (grid.points_per_dim - 1)
                          : 0.0;
  std::vector<int> digit(n, 0);
  std::vector<double> x(n);
  double worst = 0.0;
  for (;;) {
    for (int i = 0; i < n; ++i)
      x[i] = grid.lo + step * digit[i];
    std::vector<double> y = forward(net, x);
    std::vector<double> t = target.eval(x);
    for (int i = 0; i < net.output_dim; ++i)
      worst = std::max(worst, std::abs(y[i] - t[i]));
    int pos = 0;
    while (pos < n && ++digit[pos] == grid.points_per_dim)
      digit[pos++] = 0;
    if (pos == n)
      break;
  }
  return worst;
}

TrainReport train(Network &net, const Dataset &data,
                  const TargetFunction &target, const GridSpec &grid,
                  const TrainConfig &config) {
  check_config(config);
  check_dataset(net, data);
  if (data.inputs.empty())
    throw std::invalid_argument("train: dataset is empty");

  Rng rng(config.seed);
  initialize_params(net, rng);

  TrainReport report;
  report.target_name = target.name;

  const int n_samples = static_cast<int>(data.inputs.size());
  std::vector<int> order(n_samples);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> m, v;
  if (config.optimizer == Optimizer::adam) {
    m.assign(net.params.size(), 0.0);
    v.assign(net.params.size(), 0.0);
  }
  int adam_step = 0;

  auto probe_residual = [&]() {
    double worst = 0.0;
    int probes = std::min(8, n_samples);
    for (int i = 0; i < probes; ++i)
      worst = std::max(worst, symmetry_residual(net, data.inputs[i]).max_abs);
    return worst;
  };
  auto full_mse = [&]() {
    double total = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      std::vector<double> y = forward(net, data.inputs[i]);
      for (int j = 0; j < net.output_dim; ++j) {
        double r = y[j] - data.targets[i][j];
        total += r * r;
      }
    }
    return total / (static_cast<double>(n_samples) * net.output_dim);
  };
  auto record = [&](int epoch) -> const EpochStats & {
    EpochStats s;
    s.epoch = epoch;
    s.train_mse = full_mse();
    s.grid_sup_error = grid_sup_error(net, target, grid);
    s.symmetry_residual = probe_residual();
    report.log.push_back(s);
    return report.log.back();
  };

  std::vector<double> best_params = net.params;
  {
    const EpochStats &s0 = record(0);
    report.best_sup_error = s0.grid_sup_error;
    report.best_epoch = 0;
    if (!std::isfinite(s0.train_mse) || !std::isfinite(s0.grid_sup_error))
      report.aborted_nan = true;
    else if (config.target_sup_error > 0.0 &&
             s0.grid_sup_error <= config.target_sup_error)
      report.reached_target = true;
  }

  int since_best = 0;
  for (int epoch = 1;
       epoch <= config.max_epochs && !report.reached_target &&
       !report.aborted_nan;
       ++epoch) {
    for (int i = n_samples - 1; i > 0; --i)
      std::swap(order[i], order[rng.index(i + 1)]);

    bool diverged = false;
    for (int start = 0; start < n_samples && !diverged;
         start += config.batch_size) {
      int len = std::min(config.batch_size, n_samples - start);
      BatchGradient bg;
      try {
        bg = backprop(net, data,
                      std::span<const int>(order).subspan(start, len));
      } catch (const std::runtime_error &) {
        diverged = true;
        break;
      }
      if (!std::isfinite(bg.mse)) {
        diverged = true;
        break;
      }
      if (config.optimizer == Optimizer::sgd) {
        for (size_t p = 0; p < net.params.size(); ++p)
          net.params[p] -= config.learning_rate * bg.grad[p];
      } else {
        ++adam_step;
        double c1 = 1.0 - std::pow(config.beta1, adam_step);
        double c2 = 1.0 - std::pow(config.beta2, adam_step);
        for (size_t p = 0; p < net.params.size(); ++p) {
          double g = bg.grad[p];
          m[p] = config.beta1 * m[p] + (1.0 - config.beta1) * g;
          v[p] = config.beta2 * v[p] + (1.0 - config.beta2) * g * g;
          net.params[p] -= config.learning_rate * (m[p] / c1) /
                           (std::sqrt(v[p] / c2) + config.adam_eps);
        }
      }
    }

    const EpochStats &s = record(epoch);
    if (diverged || !std::isfinite(s.train_mse) ||
        !std::isfinite(s.grid_sup_error)) {
      report.aborted_nan = true;
      break;
    }
    if (s.grid_sup_error < report.best_sup_error) {
      report.best_sup_error = s.grid_sup_error;
      report.best_epoch = epoch;
      best_params = net.params;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (config.target_sup_error > 0.0 &&
        s.grid_sup_error <= config.target_sup_error) {
      report.reached_target = true;
      break;
    }
    if (config.patience > 0 && since_best >= config.patience)
      break;
  }

  net.params = best_params;
  report.final_sup_error = report.best_sup_error;
  return report;
}

std::string train_log_csv(const TrainReport &report) {
  std::string out = "epoch,train_mse,grid_sup_error,equivariance_residual\n";
  for (const EpochStats &s : report.log) {
    out += std::to_string(s.epoch);
    out += ',';
    append_number(out, s.train_mse);
    out += ',';
    append_number(out, s.grid_sup_error);
    out += ',';
    append_number(out, s.symmetry_residual);
    out += '\n';
  }
  return out;
}

} // namespace equinet
