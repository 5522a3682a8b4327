// relu-forge: command line front end for building, checking and sizing
// ReLU network approximants.
//
// Exit codes: 0 success, 2 usage error, 3 input error, 4 certificate failed.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relu_forge/relu_forge.hpp"

namespace rf = relu_forge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitCertificate = 4;

rf::ApproxOptions options_from_env() {
  rf::ApproxOptions opts;
  if (const char* cap = std::getenv("RELU_FORGE_EVAL_CAP")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(cap, &used);
      if (used != std::string(cap).size() || v == 0) throw std::invalid_argument("");
      opts.eval_cap = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw rf::argument_error("RELU_FORGE_EVAL_CAP must be a positive integer");
    }
  }
  return opts;
}

rf::ReluNetwork load_network(const std::string& path) {
  return rf::deserialize(rf::read_file(path));
}

void save_network(const rf::ReluNetwork& net, const std::string& path) {
  rf::write_file_atomic(path, rf::serialize(net));
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    rf::write_file_atomic(out_path, text);
}

struct CommonBuild {
  std::string target;
  std::size_t dim = 0;
  std::size_t N = 1, L = 1;
  std::string norm = "inf";
  bool uniform = false;
};

rf::SamplePlan make_plan(bool grid, std::size_t samples, std::uint64_t seed, std::size_t d) {
  rf::SamplePlan plan;
  plan.kind = grid ? rf::SamplePlan::Kind::grid : rf::SamplePlan::Kind::monte_carlo;
  plan.count = samples ? samples : (d == 1 ? 10'000 : 100'000);
  plan.seed = seed;
  return plan;
}

std::string report_csv(const rf::ErrorReport& rep) {
  return rf::sweep_csv({rep});
}

int cmd_build(const CommonBuild& cb, const std::string& out) {
  const rf::TargetFunction f = rf::fixture(cb.target, cb.dim);
  const double p = rf::detail::parse_norm_label(cb.norm);
  const rf::Approximant ap =
      rf::build_approximant(f, cb.N, cb.L, p, cb.uniform, options_from_env());
  save_network(ap.network, out);
  std::cout << "built approximant for '" << f.name << "' (d=" << f.dim << ", N=" << cb.N
            << ", L=" << cb.L << ", K=" << ap.K << ")\n"
            << "  width " << ap.network.width() << ", depth " << ap.network.depth()
            << ", bound_outside " << rf::detail::format_real(ap.bound_outside)
            << ", bound_global " << rf::detail::format_real(ap.bound_global) << "\n"
            << "  wrote " << out << "\n";
  return kExitOk;
}

int cmd_certify(const std::string& net_path, std::string target, std::size_t dim,
                bool grid, std::size_t samples, std::uint64_t seed, const std::string& out) {
  const rf::ReluNetwork net = load_network(net_path);
  const rf::Approximant ap = rf::approximant_from_network(net);
  if (target.empty()) target = ap.target_name;
  const rf::TargetFunction f = rf::fixture(target, dim ? dim : ap.d);
  const rf::ErrorReport rep = rf::certify(ap, f, make_plan(grid, samples, seed, ap.d));
  emit(report_csv(rep), out);
  std::cerr << "measured_outside " << rf::detail::format_real(rep.measured_outside) << " vs "
            << rf::detail::format_real(rep.bound_outside) << "; measured_global "
            << rf::detail::format_real(rep.measured_global) << " vs "
            << rf::detail::format_real(rep.bound_global) << " -> "
            << (rep.pass ? "pass" : "FAIL") << "\n";
  return rep.pass ? kExitOk : kExitCertificate;
}

int cmd_sweep(const CommonBuild& cb, const std::vector<std::size_t>& Ns,
              const std::vector<std::size_t>& Ls, bool grid, std::size_t samples,
              std::uint64_t seed, const std::string& out) {
  const rf::TargetFunction f = rf::fixture(cb.target, cb.dim);
  const double p = rf::detail::parse_norm_label(cb.norm);
  std::vector<rf::SweepCell> cells;
  for (std::size_t N : Ns)
    for (std::size_t L : Ls) cells.push_back({N, L});
  if (cells.empty()) throw rf::argument_error("sweep: need at least one N and one L");
  const std::vector<rf::ErrorReport> rows =
      rf::rate_sweep(f, cells, p, cb.uniform, make_plan(grid, samples, seed, f.dim),
                     options_from_env());
  emit(rf::sweep_csv(rows), out);
  bool all_pass = true;
  for (const auto& r : rows) {
    if (!r.note.empty()) std::cerr << "N=" << r.N << " L=" << r.L << ": " << r.note << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitCertificate;
}

int cmd_extend(const std::string& domain_path, double R, double lambda, double alpha,
               std::size_t N, std::size_t L, double slack, const std::string& out) {
  const rf::SampledDomain domain = rf::read_domain_csv(domain_path, R);
  const rf::ModulusOfContinuity omega = rf::ModulusOfContinuity::holder(lambda, alpha);
  const rf::DomainApproximant da =
      rf::approximate_on_domain(domain, omega, N, L, slack, options_from_env());
  save_network(da.network, out);
  std::cout << "extended " << domain.points.size() << " samples on [-"
            << rf::detail::format_real(da.R) << ", " << rf::detail::format_real(da.R) << "]^"
            << da.d << "\n"
            << "  measured_sup " << rf::detail::format_real(da.measured_sup) << " vs bound "
            << rf::detail::format_real(da.bound) << " -> " << (da.pass ? "pass" : "FAIL") << "\n"
            << "  wrote " << out << "\n";
  return da.pass ? kExitOk : kExitCertificate;
}

int cmd_manifold(const std::string& cloud_path, std::size_t d_low, double distortion,
                 double epsilon, std::uint64_t seed, std::size_t N, std::size_t L,
                 const std::string& out) {
  const rf::PointCloud cloud = rf::read_cloud_csv(cloud_path);
  const rf::ProjectionMap proj = rf::find_projector(cloud, d_low, distortion, seed);
  // Until a user-defined target plugs in, value the cloud by its first
  // coordinate; it is 1-Lipschitz and exercises the full pipeline.
  rf::TargetFunction f;
  f.dim = cloud.dim();
  f.name = "coordinate_0";
  f.modulus = rf::ModulusOfContinuity::holder(1.0, 1.0);
  f.f = [](const std::vector<double>& x) { return x[0]; };
  const rf::ManifoldApproximant ma =
      rf::build_manifold_approximant(f, cloud, proj, epsilon, N, L, options_from_env());
  save_network(ma.network, out);
  std::cout << "projected " << cloud.points.size() << " points to " << d_low
            << " coordinates (seed " << proj.seed << ")\n"
            << "  measured_sup " << rf::detail::format_real(ma.measured_sup) << " vs bound "
            << rf::detail::format_real(ma.bound) << " -> " << (ma.pass ? "pass" : "FAIL") << "\n"
            << "  wrote " << out << "\n";
  return ma.pass ? kExitOk : kExitCertificate;
}

int cmd_plan(double epsilon, double alpha, std::size_t dim, double lanes, double threshold,
             const std::string& out) {
  rf::SizingQuery q;
  q.epsilon = epsilon;
  q.alpha = alpha;
  q.d = dim;
  q.p = lanes;
  q.serial_threshold = threshold;
  const rf::SizingPlan plan = rf::plan_sizes(q);
  std::string csv = "epsilon,alpha,d,p,regime,N_opt,L_opt,cost\n";
  csv += rf::detail::format_real(epsilon) + ',' + rf::detail::format_real(alpha) + ',' +
         std::to_string(dim) + ',' + rf::detail::format_real(lanes) + ',' + plan.regime + ',' +
         std::to_string(plan.N) + ',' + std::to_string(plan.L) + ',' +
         rf::detail::format_real(plan.cost) + '\n';
  emit(csv, out);
  return kExitOk;
}

int cmd_inspect(const std::string& net_path, const std::vector<double>& at) {
  const rf::ReluNetwork net = load_network(net_path);
  std::cout << "input_dim " << net.input_dim << "\n"
            << "output_dim " << net.output_dim() << "\n"
            << "depth " << net.depth() << "\n"
            << "width " << net.width() << "\n";
  std::cout << "hidden";
  for (std::size_t w : net.hidden_widths()) std::cout << ' ' << w;
  std::cout << "\n";
  for (const auto& [k, v] : net.metadata) std::cout << "meta " << k << " = " << v << "\n";
  if (!at.empty()) {
    const std::vector<double> y = rf::evaluate(net, at);
    std::cout << "value";
    for (double v : y) std::cout << ' ' << rf::detail::format_real(v);
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructive ReLU network synthesis and certification"};
  app.require_subcommand(1);

  CommonBuild cb;
  std::string out_path, net_path, domain_path, cloud_path, target;
  std::vector<std::size_t> Ns{1}, Ls{1};
  std::vector<double> at;
  std::size_t dim = 0, samples = 0, d_low = 1;
  std::uint64_t seed = 1;
  bool grid = false;
  double R = 0.0, lambda = 1.0, alpha = 1.0, slack = 0.0;
  double epsilon = 0.1, lanes = 1.0, threshold = 8.0, distortion = 0.5;

  CLI::App* build = app.add_subcommand("build", "build an approximant for a named target");
  build->add_option("--target", cb.target, "target name (see fixtures)")->required();
  build->add_option("--dim", cb.dim, "input dimension (for dimension-flexible targets)");
  build->add_option("--N", cb.N, "width parameter")->check(CLI::PositiveNumber);
  build->add_option("--L", cb.L, "depth parameter")->check(CLI::PositiveNumber);
  build->add_option("--norm", cb.norm, "error norm: 1, 2, ... or inf");
  build->add_flag("--uniform", cb.uniform, "repair trifling strips (sup-norm bound)");
  build->add_option("--out", out_path, "output network file")->required();

  CLI::App* certify = app.add_subcommand("certify", "measure a stored approximant");
  certify->add_option("--net", net_path, "network file")->required();
  certify->add_option("--target", target, "target name (default: stored)");
  certify->add_option("--dim", dim, "target dimension override");
  certify->add_flag("--grid", grid, "sample on a grid instead of Monte Carlo");
  certify->add_option("--samples", samples, "sample count");
  certify->add_option("--seed", seed, "Monte Carlo seed");
  certify->add_option("--out", out_path, "CSV output (default: stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "certify a grid of (N, L) sizes");
  sweep->add_option("--target", cb.target, "target name")->required();
  sweep->add_option("--dim", cb.dim, "input dimension");
  sweep->add_option("--N", Ns, "width parameters (comma separated)")->delimiter(',');
  sweep->add_option("--L", Ls, "depth parameters (comma separated)")->delimiter(',');
  sweep->add_option("--norm", cb.norm, "error norm: 1, 2, ... or inf");
  sweep->add_flag("--uniform", cb.uniform, "repair trifling strips");
  sweep->add_flag("--grid", grid, "sample on a grid instead of Monte Carlo");
  sweep->add_option("--samples", samples, "sample count");
  sweep->add_option("--seed", seed, "Monte Carlo seed");
  sweep->add_option("--out", out_path, "CSV output (default: stdout)");

  CLI::App* extend = app.add_subcommand("extend", "approximate a sampled domain");
  extend->add_option("--domain", domain_path, "CSV with x1..xd,value")->required();
  extend->add_option("--R", R, "box radius (default: from data)");
  extend->add_option("--lambda", lambda, "Holder constant of the samples");
  extend->add_option("--alpha", alpha, "Holder exponent of the samples");
  extend->add_option("--N", cb.N, "width parameter")->check(CLI::PositiveNumber);
  extend->add_option("--L", cb.L, "depth parameter")->check(CLI::PositiveNumber);
  extend->add_option("--slack", slack, "sample-site slack added inside the modulus");
  extend->add_option("--out", out_path, "output network file")->required();

  CLI::App* manifold = app.add_subcommand("manifold", "approximate near a low-dimensional set");
  manifold->add_option("--cloud", cloud_path, "CSV with x1..xd[,tag]")->required();
  manifold->add_option("--dlow", d_low, "projected dimension")->required();
  manifold->add_option("--distortion", distortion, "allowed pairwise distortion in [0,1)");
  manifold->add_option("--epsilon", epsilon, "neighborhood radius")->required();
  manifold->add_option("--seed", seed, "projector seed");
  manifold->add_option("--N", cb.N, "width parameter")->check(CLI::PositiveNumber);
  manifold->add_option("--L", cb.L, "depth parameter")->check(CLI::PositiveNumber);
  manifold->add_option("--out", out_path, "output network file")->required();

  CLI::App* plan = app.add_subcommand("plan", "pick (N, L) for an accuracy/parallelism budget");
  plan->add_option("--epsilon", epsilon, "target accuracy in (0,1)")->required();
  plan->add_option("--alpha", alpha, "smoothness exponent in (0,1]");
  plan->add_option("--dim", dim, "input dimension")->required();
  plan->add_option("--lanes", lanes, "parallel lanes")->required();
  plan->add_option("--threshold", threshold, "lane count below which depth is free");
  plan->add_option("--out", out_path, "CSV output (default: stdout)");

  CLI::App* inspect = app.add_subcommand("inspect", "describe a stored network");
  inspect->add_option("--net", net_path, "network file")->required();
  inspect->add_option("--at", at, "evaluate at a point (comma separated)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (build->parsed()) return cmd_build(cb, out_path);
    if (certify->parsed())
      return cmd_certify(net_path, target, dim, grid, samples, seed, out_path);
    if (sweep->parsed()) return cmd_sweep(cb, Ns, Ls, grid, samples, seed, out_path);
    if (extend->parsed())
      return cmd_extend(domain_path, R, lambda, alpha, cb.N, cb.L, slack, out_path);
    if (manifold->parsed())
      return cmd_manifold(cloud_path, d_low, distortion, epsilon, seed, cb.N, cb.L, out_path);
    if (plan->parsed()) return cmd_plan(epsilon, alpha, dim, lanes, threshold, out_path);
    if (inspect->parsed()) return cmd_inspect(net_path, at);
    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const rf::argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rf::capability_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rf::capacity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rf::lookup_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rf::error& e) {  // parse, version, precondition, shape, numeric
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitInput;
  }
}
