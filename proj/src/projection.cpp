#include "manybody/projection.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>

#include "manybody/error.hpp"

namespace manybody {

namespace {

constexpr int kDampingRetries = 5;
constexpr int kMaxStepHalvings = 20;

struct Iterate {
  std::vector<double> theta_b;
  DenseTensor q;
  CoordTensor eta;
  std::vector<double> eta_b;
  double log_normalizer = 0.0;
  double kl = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
};

class NewtonProjector {
public:
  NewtonProjector(const DenseTensor& normalized, const Basis& basis)
      : p_(normalized), basis_(basis) {
    std::vector<double> eta(p_.values().begin(), p_.values().end());
    detail::suffix_sum_all_modes(p_.shape(), eta);
    target_.resize(basis_.size());
    for (std::size_t b = 0; b < basis_.size(); ++b) target_[b] = eta[basis_.offsets[b]];
  }

  const std::vector<double>& target() const { return target_; }

  /// Decodes theta^B into Q; returns nullopt if the log-values overflow.
  std::optional<Iterate> evaluate(std::vector<double> theta_b) const {
    CoordTensor theta{CoordKind::Theta, p_.shape(), std::vector<double>(p_.size(), 0.0)};
    for (std::size_t b = 0; b < basis_.size(); ++b) theta.values[basis_.offsets[b]] = theta_b[b];
    Iterate it;
    try {
      auto decoded = decode_theta(theta);
      it.q = std::move(decoded.tensor);
      it.log_normalizer = decoded.log_normalizer;
    } catch (const Error& e) {
      if (e.code() == Errc::Overflow) return std::nullopt;
      throw;
    }
    it.eta = {CoordKind::Eta, p_.shape(), std::vector<double>(it.q.values().begin(), it.q.values().end())};
    detail::suffix_sum_all_modes(p_.shape(), it.eta.values);
    it.eta_b.resize(basis_.size());
    double sq = 0.0;
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      it.eta_b[b] = it.eta[basis_.offsets[b]];
      const double diff = it.eta_b[b] - target_[b];
      sq += diff * diff;
    }
    it.residual = std::sqrt(sq);
    it.theta_b = std::move(theta_b);
    try {
      it.kl = kl_divergence(p_, it.q);
    } catch (const Error& e) {
      // Q underflowed to zero where p has mass.
      if (e.code() != Errc::SupportViolation) throw;
      it.kl = std::numeric_limits<double>::infinity();
    }
    return it;
  }

  Eigen::VectorXd newton_direction(const Iterate& it, double initial_damping) const {
    const Eigen::MatrixXd g = fisher_matrix(it.eta, basis_);
    Eigen::VectorXd grad(basis_.size());
    for (std::size_t b = 0; b < basis_.size(); ++b) grad[b] = it.eta_b[b] - target_[b];

    const auto try_solve = [&](double lambda) -> std::optional<Eigen::VectorXd> {
      Eigen::MatrixXd shifted = g;
      shifted.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXd> llt(shifted);
      if (llt.info() != Eigen::Success) return std::nullopt;
      Eigen::VectorXd delta = llt.solve(grad);
      if (!delta.allFinite()) return std::nullopt;
      return delta;
    };

    if (auto delta = try_solve(initial_damping)) return *delta;
    const double g_inf = g.cwiseAbs().rowwise().sum().maxCoeff();
    double lambda = std::max(initial_damping, 1e-10 * g_inf);
    for (int retry = 0; retry < kDampingRetries && lambda > 0.0; ++retry, lambda *= 10.0) {
      if (auto delta = try_solve(lambda)) return *delta;
    }
    throw Error(Errc::SingularSystem, "Fisher matrix could not be factored after damping");
  }

private:
  const DenseTensor& p_;
  const Basis& basis_;
  std::vector<double> target_;
};

bool accept_step(double kl_new, double kl_old) {
  return kl_new <= kl_old + 1e-12 * std::max(1.0, std::abs(kl_old));
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  if (max_iterations < 1) throw Error(Errc::InvalidArgument, "max_iterations must be at least 1");
  if (damping < 0.0) throw Error(Errc::InvalidArgument, "damping must be non-negative");
}

CoordTensor ProjectionResult::theta() const {
  CoordTensor out{CoordKind::Theta, tensor.shape(), std::vector<double>(tensor.size(), 0.0)};
  out.values[0] = log_normalizer;
  for (std::size_t b = 0; b < basis.size(); ++b) out.values[basis.offsets[b]] = theta_b[b];
  return out;
}

Eigen::MatrixXd fisher_matrix(const CoordTensor& eta_full, const Basis& basis) {
  const Shape& shape = eta_full.shape;
  const std::size_t n = basis.size();
  Eigen::MatrixXd g(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    const Index& iu = basis.indices[u];
    const double eta_u = eta_full[basis.offsets[u]];
    for (std::size_t v = u; v < n; ++v) {
      const Index& iv = basis.indices[v];
      std::size_t joint = 0;
      for (std::size_t d = 0; d < iu.size(); ++d) joint += std::max(iu[d], iv[d]) * shape.stride(d);
      const double value = eta_full[joint] - eta_u * eta_full[basis.offsets[v]];
      g(u, v) = value;
      g(v, u) = value;
    }
  }
  return g;
}

ProjectionResult project(const DenseTensor& p, const InteractionSet& s, const SolverOptions& opts) {
  opts.validate();
  if (s.order() != p.order()) throw Error(Errc::BadOrder, "interaction set order differs from tensor order");
  const auto [normalized, scale] = normalize(p);
  Basis basis = enumerate_basis(s, p.shape());
  NewtonProjector solver(normalized, basis);

  std::vector<double> theta0(basis.size(), 0.0);
  if (opts.random_init_seed) {
    std::mt19937_64 rng(*opts.random_init_seed);
    std::uniform_real_distribution<double> dist(-opts.random_init_scale, opts.random_init_scale);
    for (double& t : theta0) t = dist(rng);
  }
  auto start = solver.evaluate(std::move(theta0));
  if (!start) throw Error(Errc::Overflow, "initial theta overflows");
  Iterate current = std::move(*start);
  Iterate best = current;

  ProjectionResult result;
  for (int t = 1; t <= opts.max_iterations; ++t) {
    result.iterations = t;
    if (current.residual < opts.tolerance) {
      result.converged = true;
      best = current;
      break;
    }
    if (t == opts.max_iterations) break;

    const Eigen::VectorXd delta = solver.newton_direction(current, opts.damping);
    double step = 1.0;
    std::optional<Iterate> accepted;
    std::optional<Iterate> fallback;
    for (int halving = 0; halving <= kMaxStepHalvings; ++halving, step *= 0.5) {
      std::vector<double> candidate = current.theta_b;
      for (std::size_t b = 0; b < candidate.size(); ++b) candidate[b] -= step * delta[static_cast<Eigen::Index>(b)];
      auto next = solver.evaluate(std::move(candidate));
      if (!next) continue;
      if (accept_step(next->kl, current.kl)) {
        accepted = std::move(next);
        break;
      }
      fallback = std::move(next);
    }
    if (!accepted && !fallback) throw Error(Errc::Overflow, "every damped Newton step overflowed");
    current = accepted ? std::move(*accepted) : std::move(*fallback);
    if (current.kl < best.kl) best = current;
  }

  result.tensor = best.q.scaled(scale);
  result.basis = std::move(basis);
  result.theta_b = std::move(best.theta_b);
  result.eta_b = std::move(best.eta_b);
  result.target_eta_b = solver.target();
  result.log_normalizer = best.log_normalizer;
  result.scale = scale;
  result.residual = best.residual;
  result.kl = kl_divergence(p, result.tensor);
  return result;
}

}  // namespace manybody
