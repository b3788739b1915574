#include "manybody/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "manybody/completion.hpp"
#include "manybody/error.hpp"
#include "manybody/factors.hpp"
#include "manybody/interactions.hpp"
#include "manybody/io.hpp"
#include "manybody/oracle.hpp"
#include "manybody/projection.hpp"

namespace manybody::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void emit_json(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(Errc::Io, "cannot write " + path);
  file << j.dump(2) << '\n';
}

Json subsets_json(const InteractionSet& s) {
  Json arr = Json::array();
  for (ModeSet subset : s.subsets()) {
    Json modes = Json::array();
    for (std::size_t m : subset.modes()) modes.push_back(m + 1);
    arr.push_back(modes);
  }
  return arr;
}

/// KL is undefined when the approximation misses support of the truth.
Json kl_or_null(const DenseTensor& p, const DenseTensor& q) {
  try {
    return kl_divergence(p, q);
  } catch (const Error& e) {
    if (e.code() == Errc::SupportViolation) return nullptr;
    throw;
  }
}

CompletionInit parse_init(const std::string& text) {
  if (text == "observed-mean") return ObservedMeanInit{};
  const auto parse_number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(Errc::InvalidArgument, "bad number in --init: '" + s + "'");
    return v;
  };
  if (text.starts_with("gaussian:")) {
    const std::string rest = text.substr(9);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw Error(Errc::InvalidArgument, "--init gaussian expects gaussian:MEAN,STD");
    GaussianInit g;
    g.mean = parse_number(rest.substr(0, comma));
    g.stddev = parse_number(rest.substr(comma + 1));
    return g;
  }
  if (text.starts_with("const:")) return ConstantInit{parse_number(text.substr(6))};
  throw Error(Errc::InvalidArgument, "--init must be observed-mean, gaussian:M,S or const:C");
}

struct ApproximateArgs {
  std::string input;
  std::string interactions;
  std::string output;
  std::string factors;
  std::string stats;
  double tolerance = SolverOptions{}.tolerance;
  int max_iter = SolverOptions{}.max_iterations;
};

int cmd_approximate(const ApproximateArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const DenseTensor input = io::read_tensor(a.input);
  const InteractionSet s = parse_spec(a.interactions, input.order());
  SolverOptions opts;
  opts.tolerance = a.tolerance;
  opts.max_iterations = a.max_iter;
  const ProjectionResult r = project(input, s, opts);
  io::write_tensor(a.output, r.tensor);

  if (!a.factors.empty()) {
    if (r.converged) {
      io::write_factor_set(a.factors, extract_factors(r, s));
    } else {
      err << "warning: projection did not converge; factors not written\n";
    }
  }

  Json stats;
  stats["kl"] = r.kl;
  stats["relative_error"] = relative_error(input, r.tensor);
  stats["iterations"] = r.iterations;
  stats["converged"] = r.converged;
  stats["parameter_count"] = count_parameters(s, input.dims());
  stats["interaction_spec"] = a.interactions;
  stats["residual"] = r.residual;
  stats["elapsed_ms"] = elapsed_ms(start);
  emit_json(stats, a.stats, out);

  if (!r.converged) {
    err << "error: projection did not converge in " << r.iterations << " iterations (residual "
        << r.residual << ")\n";
    return kNotConverged;
  }
  return kSuccess;
}

struct CompleteArgs {
  std::string input;
  std::string interactions;
  std::string output;
  std::string stats;
  std::string truth;
  std::string init = "observed-mean";
  int restarts = 1;
  std::uint64_t seed = 0;
  double tolerance = SolverOptions{}.tolerance;
  int max_iter = SolverOptions{}.max_iterations;
  double epsilon = CompletionOptions{}.epsilon;
  int completion_iter = CompletionOptions{}.max_iterations;
};

int cmd_complete(const CompleteArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  if (a.restarts < 1) throw Error(Errc::InvalidArgument, "--restarts must be at least 1");
  const MaskedTensor masked = io::read_masked_tensor(a.input);
  const InteractionSet s = parse_spec(a.interactions, masked.shape().order());
  const CompletionInit base_init = parse_init(a.init);

  Json stats;
  if (masked.missing_count() == 0) {
    err << "warning: input has no missing entries; writing it unchanged\n";
    const DenseTensor same(masked.shape(), std::vector<double>(masked.values().begin(), masked.values().end()));
    io::write_tensor(a.output, same);
    stats["kl"] = 0.0;
    stats["relative_error"] = 0.0;
    stats["iterations"] = 0;
    stats["converged"] = true;
    stats["parameter_count"] = count_parameters(s, masked.shape().dims());
    stats["interaction_spec"] = a.interactions;
    stats["elapsed_ms"] = elapsed_ms(start);
    stats["seed"] = a.seed;
    stats["residual_trace_length"] = 0;
    emit_json(stats, a.stats, out);
    return kSuccess;
  }

  int restarts = a.restarts;
  if (restarts > 1 && !std::holds_alternative<GaussianInit>(base_init)) {
    err << "warning: --restarts only varies gaussian initializations; running once\n";
    restarts = 1;
  }

  SolverOptions popts;
  popts.tolerance = a.tolerance;
  popts.max_iterations = a.max_iter;
  std::optional<CompletionResult> best;
  std::uint64_t best_seed = a.seed;
  for (int k = 0; k < restarts; ++k) {
    CompletionOptions copts;
    copts.epsilon = a.epsilon;
    copts.max_iterations = a.completion_iter;
    copts.init = base_init;
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
    if (auto* g = std::get_if<GaussianInit>(&copts.init)) g->seed = seed;
    CompletionResult r = lbtc(masked, s, popts, copts);
    if (!best || r.residual_trace.back() < best->residual_trace.back()) {
      best = std::move(r);
      best_seed = seed;
    }
  }

  io::write_tensor(a.output, best->tensor);
  stats["kl"] = kl_or_null(best->tensor, best->model);
  stats["relative_error"] = relative_error(best->tensor, best->model);
  stats["iterations"] = best->iterations;
  stats["converged"] = best->converged;
  stats["parameter_count"] = count_parameters(s, masked.shape().dims());
  stats["interaction_spec"] = a.interactions;
  stats["elapsed_ms"] = elapsed_ms(start);
  stats["seed"] = best_seed;
  stats["restarts"] = restarts;
  stats["residual_trace_length"] = best->residual_trace.size();
  stats["final_residual"] = best->residual_trace.back();
  if (!a.truth.empty()) {
    const DenseTensor truth = io::read_tensor(a.truth);
    std::vector<bool> missing(masked.shape().size());
    for (std::size_t i = 0; i < missing.size(); ++i) missing[i] = !masked.is_observed(i);
    stats["recovery_fit"] = recovery_fit(truth, best->tensor, missing);
  }
  emit_json(stats, a.stats, out);

  if (!best->converged) {
    err << "error: completion did not converge in " << best->iterations << " iterations\n";
    return kNotConverged;
  }
  return kSuccess;
}

struct SynthArgs {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> ranks;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_synth_ring(const SynthArgs& a) {
  io::write_tensor(a.output, random_ring_tensor(a.dims, a.ranks, a.seed));
  return kSuccess;
}

struct InfoArgs {
  std::string interactions;
  std::vector<std::size_t> dims;
};

int cmd_info(const InfoArgs& a, std::ostream& out) {
  const Shape shape(a.dims);
  const InteractionSet s = parse_spec(a.interactions, shape.order());
  const std::size_t count = count_parameters(s, a.dims);
  Json j;
  j["subsets"] = subsets_json(s);
  j["parameter_count"] = count;
  j["basis_size"] = count - 1;
  out << j.dump(2) << '\n';
  return kSuccess;
}

struct MetricsArgs {
  std::string truth;
  std::string approx;
  std::string mask;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const DenseTensor truth = io::read_tensor(a.truth);
  const DenseTensor approx = io::read_tensor(a.approx);
  Json j;
  j["relative_error"] = relative_error(truth, approx);
  if (!a.mask.empty()) {
    const DenseTensor mask = io::read_tensor(a.mask);
    if (!(mask.shape() == truth.shape())) throw Error(Errc::ShapeMismatch, "mask shape differs from truth");
    std::vector<bool> selected(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) selected[i] = mask[i] != 0.0;
    j["recovery_fit"] = recovery_fit(truth, approx, selected);
  }
  j["kl"] = kl_or_null(truth, approx);
  out << j.dump(2) << '\n';
  return kSuccess;
}

struct IpfArgs {
  std::string input;
  std::string interactions;
  std::string output;
  double tolerance = OracleOptions{}.tolerance;
  int max_sweeps = OracleOptions{}.max_sweeps;
};

int cmd_ipf(const IpfArgs& a) {
  const DenseTensor input = io::read_tensor(a.input);
  const InteractionSet s = parse_spec(a.interactions, input.order());
  const auto [p, scale] = normalize(input);
  const DenseTensor q = ipf_project(p, s, {a.tolerance, a.max_sweeps});
  io::write_tensor(a.output, q.scaled(scale));
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Many-body approximation of non-negative tensors"};
  app.require_subcommand(1);

  ApproximateArgs approx;
  auto* approximate = app.add_subcommand("approximate", "Project a tensor onto an interaction set");
  approximate->add_option("--input", approx.input, "Input tensor file")->required();
  approximate->add_option("--interactions", approx.interactions, "Interaction spec, e.g. body=2 or cyclic")->required();
  approximate->add_option("--output", approx.output, "Output tensor file")->required();
  approximate->add_option("--factors", approx.factors, "Directory for extracted factors");
  approximate->add_option("--stats", approx.stats, "Stats JSON path (stdout if omitted)");
  approximate->add_option("--tolerance", approx.tolerance, "Termination tolerance on eta")->capture_default_str();
  approximate->add_option("--max-iter", approx.max_iter, "Newton iteration limit")->capture_default_str();

  CompleteArgs comp;
  auto* complete = app.add_subcommand("complete", "Fill missing (nan) entries by low-body completion");
  complete->add_option("--input", comp.input, "Input tensor file with nan entries")->required();
  complete->add_option("--interactions", comp.interactions, "Interaction spec")->required();
  complete->add_option("--output", comp.output, "Output tensor file")->required();
  complete->add_option("--restarts", comp.restarts, "Number of seeded runs")->capture_default_str();
  complete->add_option("--seed", comp.seed, "Base seed")->capture_default_str();
  complete->add_option("--init", comp.init, "observed-mean | gaussian:M,S | const:C")->capture_default_str();
  complete->add_option("--stats", comp.stats, "Stats JSON path (stdout if omitted)");
  complete->add_option("--truth", comp.truth, "Ground truth; adds recovery_fit on missing entries");
  complete->add_option("--tolerance", comp.tolerance, "Projection tolerance")->capture_default_str();
  complete->add_option("--max-iter", comp.max_iter, "Projection iteration limit")->capture_default_str();
  complete->add_option("--epsilon", comp.epsilon, "Completion stopping threshold")->capture_default_str();
  complete->add_option("--completion-iter", comp.completion_iter, "Completion iteration limit")->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate synthetic tensors");
  synth->require_subcommand(1);
  auto* ring = synth->add_subcommand("ring", "Random tensor with a given tensor-ring rank");
  ring->add_option("--dims", synth_args.dims, "Mode sizes")->required()->delimiter(',');
  ring->add_option("--ranks", synth_args.ranks, "Ring ranks (R_1..R_D)")->required()->delimiter(',');
  ring->add_option("--seed", synth_args.seed, "Seed")->capture_default_str();
  ring->add_option("--output", synth_args.output, "Output tensor file")->required();

  InfoArgs info_args;
  auto* info = app.add_subcommand("info", "Show the closed interaction set and parameter count");
  info->add_option("--interactions", info_args.interactions, "Interaction spec")->required();
  info->add_option("--dims", info_args.dims, "Mode sizes")->required()->delimiter(',');

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "Compare two tensors");
  metrics->add_option("--truth", metrics_args.truth, "Reference tensor file")->required();
  metrics->add_option("--approx", metrics_args.approx, "Approximation tensor file")->required();
  metrics->add_option("--mask", metrics_args.mask, "Tensor file; nonzero entries select the recovery set");

  IpfArgs ipf_args;
  auto* ipf = app.add_subcommand("ipf", "Reference projection by iterative proportional fitting");
  ipf->group("");
  ipf->add_option("--input", ipf_args.input)->required();
  ipf->add_option("--interactions", ipf_args.interactions)->required();
  ipf->add_option("--output", ipf_args.output)->required();
  ipf->add_option("--tolerance", ipf_args.tolerance);
  ipf->add_option("--max-sweeps", ipf_args.max_sweeps);

  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*approximate) return cmd_approximate(approx, out, err);
    if (*complete) return cmd_complete(comp, out, err);
    if (*ring) return cmd_synth_ring(synth_args);
    if (*info) return cmd_info(info_args, out);
    if (*metrics) return cmd_metrics(metrics_args, out);
    if (*ipf) return cmd_ipf(ipf_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::NotConverged ? kNotConverged : kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace manybody::cli
