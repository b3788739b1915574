#include "manybody/completion.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "manybody/error.hpp"

namespace manybody {

namespace {

constexpr int kMinIterationsBeforeStop = 3;

struct InitVisitor {
  const MaskedTensor& m;
  std::vector<double>& values;

  void operator()(const ObservedMeanInit&) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (m.is_observed(i)) acc += m.values()[i];
    fill_missing([mean = acc / static_cast<double>(m.observed_count())] { return mean; });
  }
  void operator()(const GaussianInit& g) const {
    std::mt19937_64 rng(g.seed);
    std::normal_distribution<double> dist(g.mean, g.stddev);
    fill_missing([&] { return dist(rng); });
  }
  void operator()(const ConstantInit& c) const {
    fill_missing([v = c.value] { return v; });
  }

  template <typename Draw>
  void fill_missing(Draw&& draw) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = m.is_observed(i) ? m.values()[i] : std::max(draw(), kMinInitialValue);
    }
  }
};

double relative_change(std::span<const double> next, std::span<const double> prev) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double diff = next[i] - prev[i];
    num += diff * diff;
    den += prev[i] * prev[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

void CompletionOptions::validate() const {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  if (max_iterations < 1) throw Error(Errc::InvalidArgument, "max_iterations must be at least 1");
  if (const auto* g = std::get_if<GaussianInit>(&init); g && !(g->stddev >= 0.0)) {
    throw Error(Errc::InvalidArgument, "gaussian init needs std >= 0");
  }
  if (const auto* c = std::get_if<ConstantInit>(&init); c && !(c->value > 0.0)) {
    throw Error(Errc::InvalidArgument, "constant init must be positive");
  }
}

DenseTensor initial_completion(const MaskedTensor& m, const CompletionInit& init) {
  std::vector<double> values(m.shape().size());
  std::visit(InitVisitor{m, values}, init);
  return DenseTensor(m.shape(), std::move(values));
}

CompletionResult lbtc(const MaskedTensor& m, const InteractionSet& s, const SolverOptions& popts,
                      const CompletionOptions& copts) {
  copts.validate();
  popts.validate();
  if (m.observed_count() == 0) throw Error(Errc::EmptyObservation, "no observed entries");
  if (s.order() != m.shape().order()) throw Error(Errc::BadOrder, "interaction set order differs from tensor order");

  DenseTensor current = initial_completion(m, copts.init);
  CompletionResult result;
  bool all_projections_converged = true;
  bool stopped = false;

  for (int t = 1; t <= copts.max_iterations; ++t) {
    ProjectionResult step = project(current, s, popts);
    all_projections_converged = all_projections_converged && step.converged;

    std::vector<double> next(step.tensor.values().begin(), step.tensor.values().end());
    for (std::size_t i = 0; i < next.size(); ++i)
      if (m.is_observed(i)) next[i] = m.values()[i];

    const double res = relative_change(next, current.values());
    result.residual_trace.push_back(res);
    result.model = std::move(step.tensor);
    current = DenseTensor(m.shape(), std::move(next));
    result.iterations = t;

    const std::size_t n = result.residual_trace.size();
    if (t >= kMinIterationsBeforeStop &&
        std::abs(result.residual_trace[n - 1] - result.residual_trace[n - 2]) < copts.epsilon) {
      stopped = true;
      break;
    }
  }

  result.tensor = std::move(current);
  result.converged = stopped && all_projections_converged;
  return result;
}

}  // namespace manybody
