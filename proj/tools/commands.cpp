#include "commands.hpp"

#include "admmrate/admm.hpp"
#include "admmrate/certificate.hpp"
#include "admmrate/config.hpp"
#include "admmrate/csv.hpp"
#include "admmrate/errors.hpp"
#include "admmrate/lower_bound.hpp"
#include "admmrate/sdp_search.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace admmrate::cli {

namespace {

// A flag that can also be supplied through the flat JSON config file.
struct Binding {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const Json&)> assign;
};

class Bindings {
 public:
  explicit Bindings(CLI::App* app) : app_(app) {}

  CLI::Option* number(const std::string& flag, double& target, const std::string& help) {
    CLI::Option* o = app_->add_option(flag, target, help);
    add(flag, o, [&target, flag](const Json& v) {
      if (!v.is_number()) throw ConfigError("config: " + flag + " must be numeric");
      target = v.get<double>();
    });
    return o;
  }

  CLI::Option* list(const std::string& flag, std::vector<double>& target,
                    const std::string& help) {
    CLI::Option* o = app_->add_option(flag, target, help)->delimiter(',');
    add(flag, o, [&target, flag](const Json& v) { target = number_list(v, "config " + flag); });
    return o;
  }

  CLI::Option* text(const std::string& flag, std::string& target, const std::string& help) {
    CLI::Option* o = app_->add_option(flag, target, help);
    add(flag, o, [&target, flag](const Json& v) {
      if (!v.is_string()) throw ConfigError("config: " + flag + " must be a string");
      target = v.get<std::string>();
    });
    return o;
  }

  template <typename Int>
  CLI::Option* integer(const std::string& flag, Int& target, const std::string& help) {
    CLI::Option* o = app_->add_option(flag, target, help);
    add(flag, o, [&target, flag](const Json& v) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("config: " + flag + " must be a nonnegative integer");
      target = v.get<Int>();
    });
    return o;
  }

  // Fills options not given on the command line from the config object.
  void apply(const Json& config) const {
    if (!config.is_object()) throw ConfigError("config: expected a flat JSON object");
    for (auto it = config.begin(); it != config.end(); ++it) {
      bool known = false;
      for (const auto& b : bindings_) {
        if (b.key != it.key()) continue;
        known = true;
        if (b.option->count() == 0) b.assign(it.value());
      }
      if (!known) throw ConfigError("config: unknown key \"" + it.key() + "\"");
    }
  }

 private:
  void add(const std::string& flag, CLI::Option* o, std::function<void(const Json&)> assign) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    for (char& c : key)
      if (c == '-') c = '_';
    bindings_.push_back({key, o, std::move(assign)});
  }

  CLI::App* app_;
  std::vector<Binding> bindings_;
};

// Writes to --out when given, otherwise to the command's output stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write " + path);
    }
  }
  std::ostream& data() { return file_ ? *file_ : fallback_; }
  bool to_file() const { return static_cast<bool>(file_); }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::fixed << x;
  return os.str();
}

struct CommonGrid {
  std::vector<double> alpha, rho0, kappa, kappa_f;
  std::string grid_file;

  void fill_from_grid_file() {
    if (grid_file.empty()) return;
    const GridSpec g = parse_grid(load_json_file(grid_file));
    if (alpha.empty()) alpha = g.alpha;
    if (rho0.empty()) rho0 = g.rho0;
    if (kappa.empty()) kappa = g.kappa;
    if (kappa_f.empty()) kappa_f = g.kappa_f;
  }
};

void require_nonempty(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw DomainError(std::string("empty ") + what + " grid");
}

BisectionOptions bisection_options(double tol_bisect, double tol_feas) {
  BisectionOptions o;
  o.bisect_tol = tol_bisect;
  o.solver.tolerance = tol_feas;
  return o;
}

// certify ----------------------------------------------------------------

struct CertifyArgs {
  double alpha = 0.0, rho0 = 0.0, kappa = 0.0, kappa_b = 1.0, tol_feas = 1e-9;
  std::string out;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const Certificate cert = explicit_certificate(a.alpha, a.rho0, a.kappa);
  const FeasibilityVerdict v = check_certificate(cert, a.tol_feas);

  out << "tau            " << fixed(cert.tau) << '\n'
      << "xi             " << fixed(cert.xi) << '\n'
      << "P              [[" << fixed(cert.p(0, 0)) << ", " << fixed(cert.p(0, 1)) << "], ["
      << fixed(cert.p(1, 0)) << ", " << fixed(cert.p(1, 1)) << "]]\n"
      << "lambda1        " << fixed(cert.lambda1) << '\n'
      << "lambda2        " << fixed(cert.lambda2) << '\n';
  try {
    const ContractionBound b = contraction_bound(a.alpha, a.rho0, a.kappa, a.kappa_b);
    out << "eta            " << fixed(b.eta) << '\n';
    if (b.constant)
      out << "bound_constant " << fixed(*b.constant) << '\n';
    else
      out << "bound_constant unavailable (eta = 0)\n";
  } catch (const DomainError&) {
    out << "eta            unavailable (alpha = 2)\n"
        << "bound_constant unavailable (requires alpha < 2)\n";
  }
  out << "lambda_max     " << csv_number(v.lambda_max) << '\n'
      << "tolerance      " << csv_number(v.tolerance_abs) << '\n'
      << "feasible       " << (v.feasible ? "yes" : "no") << '\n';

  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw ConfigError("cannot write " + a.out);
    f << certificate_to_json(cert) << '\n';
  }
  return v.feasible ? kOk : kCheckFailed;
}

// sweep ------------------------------------------------------------------

struct SweepArgs {
  CommonGrid grid;
  std::string out;
  double tol_bisect = 1e-5, tol_feas = 1e-9;
  unsigned workers = 0;
  std::uint64_t seed = 0;
};

int cmd_sweep(SweepArgs a, std::ostream& out, std::ostream& err) {
  a.grid.fill_from_grid_file();
  require_nonempty(a.grid.alpha, "alpha");
  require_nonempty(a.grid.rho0, "rho0");
  require_nonempty(a.grid.kappa, "kappa");

  SweepOptions o;
  o.bisection = bisection_options(a.tol_bisect, a.tol_feas);
  o.feasibility_tol = a.tol_feas;
  o.workers = a.workers;
  const std::vector<SweepRow> rows = sweep(a.grid.alpha, a.grid.rho0, a.grid.kappa, o);

  Sink sink(a.out, out);
  write_sweep_csv(sink.data(), rows);
  std::ostream& log = sink.to_file() ? out : err;

  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failed ? 1 : 0;
  const auto gap = max_discrepancy(rows);
  const bool gap_ok = !gap || *gap <= 2.0 * a.tol_bisect;
  log << "rows " << rows.size() << ", failed cells " << failed << ", max |tau_formula - tau_bisect| "
      << (gap ? csv_number(*gap) : std::string("n/a")) << " (limit " << csv_number(2.0 * a.tol_bisect)
      << ")\n";
  return failed == 0 && gap_ok ? kOk : kCheckFailed;
}

// frontier ---------------------------------------------------------------

struct FrontierArgs {
  CommonGrid grid;
  double alpha = 0.0, rho0 = 1.0, kappa_max = 30.0;
  std::string out;
  double tol_bisect = 1e-5, tol_feas = 1e-9;
  unsigned workers = 0;
};

std::vector<double> default_kappa_grid(double kappa_max) {
  constexpr int kPoints = 30;
  constexpr double kFirst = 1.1;
  if (!(kappa_max > kFirst)) throw DomainError("frontier: kappa-max must exceed 1.1");
  std::vector<double> g;
  for (int i = 0; i < kPoints; ++i)
    g.push_back(kFirst * std::pow(kappa_max / kFirst, i / (kPoints - 1.0)));
  return g;
}

int cmd_frontier(FrontierArgs a, std::ostream& out, std::ostream& err) {
  a.grid.fill_from_grid_file();
  std::vector<double> kappas = a.grid.kappa.empty() ? default_kappa_grid(a.kappa_max) : a.grid.kappa;
  std::sort(kappas.begin(), kappas.end());

  const FrontierResult r = feasibility_frontier(
      a.alpha, a.rho0, kappas, bisection_options(a.tol_bisect, a.tol_feas), a.workers);
  Sink sink(a.out, out);
  write_frontier_csv(sink.data(), r);
  std::ostream& log = sink.to_file() ? out : err;
  log << "largest feasible kappa on grid: "
      << (r.largest_feasible_kappa ? csv_number(*r.largest_feasible_kappa) : std::string("none"))
      << "\nrefined kappa*: "
      << (r.kappa_star ? csv_number(*r.kappa_star) : std::string("not bracketed by the grid"))
      << "\nfeasible set is an initial interval: " << (r.interval_ok ? "yes" : "no") << '\n';
  return r.interval_ok ? kOk : kCheckFailed;
}

// demo -------------------------------------------------------------------

struct DemoArgs {
  std::string problem, out;
  std::uint64_t seed = 0;
  double kappa_b = 0.0;  // 0: use the instance's own kappa_B
};

int cmd_demo(const DemoArgs& a, std::ostream& out, std::ostream& err) {
  Json spec = a.problem.empty() ? Json{{"kind", "random"}} : load_json_file(a.problem);
  const DemoSetup setup = parse_demo(spec, a.seed);

  const AssumptionReport report = validate_assumption(setup.instance);
  if (!report.passed()) {
    err << "problem violates the standing assumptions:\n" << report.summary();
    return kUsageError;
  }
  const DerivedParams d = derive_params(setup.instance, setup.params.rho);
  const Trajectory traj = run(setup.instance, setup.params, setup.initial, setup.phi_star);

  std::optional<ContractionBound> bound;
  if (setup.params.alpha < 2.0)
    bound = contraction_bound(setup.params.alpha, d.rho0, d.kappa,
                              a.kappa_b > 0.0 ? a.kappa_b : d.kappa_B);

  std::vector<double> curve;
  std::size_t violations = 0;
  const double e0 = traj.error_norms.front();
  if (bound && bound->constant) {
    // Floor for the accuracy of the fixed-point estimate.
    const double floor = 1e-10 * std::max(1.0, e0);
    for (std::size_t t = 0; t < traj.error_norms.size(); ++t) {
      curve.push_back(*bound->at(static_cast<int>(t)) * e0);
      if (traj.error_norms[t] > curve.back() * (1.0 + 1e-9) + floor) ++violations;
    }
  }

  Sink sink(a.out, out);
  write_trajectory_csv(sink.data(), traj, curve.empty() ? nullptr : &curve);
  std::ostream& log = sink.to_file() ? out : err;
  log << "problem " << setup.kind << ": kappa " << csv_number(d.kappa) << ", rho0 "
      << csv_number(d.rho0) << ", kappa_B " << csv_number(d.kappa_B) << ", alpha "
      << csv_number(setup.params.alpha) << '\n'
      << "iterations " << traj.states.size() - 1 << (traj.converged ? " (converged)" : "")
      << '\n';
  if (bound) {
    log << "certified tau " << csv_number(bound->tau) << ", eta " << csv_number(bound->eta)
        << ", constant "
        << (bound->constant ? csv_number(*bound->constant) : std::string("unbounded")) << '\n';
  } else {
    log << "bound unavailable (requires alpha < 2)\n";
  }
  try {
    log << "observed rate " << csv_number(observed_rate(traj, 20)) << '\n';
  } catch (const InsufficientDataError&) {
    log << "observed rate n/a\n";
  }
  log << "bound violations " << violations << '\n';
  return violations == 0 ? kOk : kCheckFailed;
}

// compare ----------------------------------------------------------------

struct CompareArgs {
  CommonGrid grid;
  std::string out;
  double tol_rate = 1e-6;
};

int cmd_compare(CompareArgs a, std::ostream& out, std::ostream& err) {
  a.grid.fill_from_grid_file();
  require_nonempty(a.grid.kappa, "kappa");
  require_nonempty(a.grid.kappa_f, "kappa_f");

  std::vector<GdComparison> rows;
  std::size_t skipped = 0;
  for (double k : a.grid.kappa)
    for (double kf : a.grid.kappa_f) {
      if (kf < k) {
        ++skipped;
        continue;
      }
      rows.push_back(admm_vs_gd(k, kf));
    }
  if (rows.empty())
    throw DomainError("compare: no pair satisfies kappa_F >= kappa (" + std::to_string(skipped) +
                      " rejected)");

  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (!r.admm_not_slower || !r.inequality_holds) ++failures;
    if (r.kappa_F == r.kappa && std::abs(r.slack) > kComparisonSlack) ++failures;
  }
  double worst_rate_gap = 0.0;
  for (double kf : a.grid.kappa_f) {
    if (!(kf >= 1.0)) throw DomainError("compare: kappa_F must be >= 1");
    const double gap =
        std::abs(gd_witness_rate(GdSetting::optimal(1.0, kf)) - gd_optimal_rate(kf));
    worst_rate_gap = std::max(worst_rate_gap, gap);
    if (gap > a.tol_rate) ++failures;
  }

  Sink sink(a.out, out);
  write_compare_csv(sink.data(), rows);
  std::ostream& log = sink.to_file() ? out : err;
  log << "pairs " << rows.size() << ", rejected (kappa_F < kappa) " << skipped
      << ", failed checks " << failures << ", worst GD witness rate gap "
      << csv_number(worst_rate_gap) << '\n';
  return failures == 0 ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convergence-rate certificates for over-relaxed ADMM", "admmrate"};
  app.require_subcommand(1);

  CertifyArgs certify;
  SweepArgs sweep_args;
  FrontierArgs frontier;
  DemoArgs demo;
  CompareArgs compare;

  struct Sub {
    CLI::App* app;
    std::unique_ptr<Bindings> bindings;
    std::string config;
  };
  std::deque<Sub> subs;  // stable addresses: options bind to Sub::config
  auto make = [&](const char* name, const char* help) -> Sub& {
    CLI::App* s = app.add_subcommand(name, help);
    subs.push_back({s, std::make_unique<Bindings>(s), ""});
    s->add_option("--config", subs.back().config, "flat JSON file of flag values (flags win)");
    return subs.back();
  };

  {
    Sub& s = make("certify", "closed-form certificate, feasibility check and bound");
    Bindings& b = *s.bindings;
    b.number("--alpha", certify.alpha, "relaxation, 0 < alpha <= 2");
    b.number("--rho0", certify.rho0, "normalized step size");
    b.number("--kappa", certify.kappa, "condition number, > 1");
    b.number("--kappa-b", certify.kappa_b, "condition number of B (default 1)");
    b.number("--tol-feas", certify.tol_feas, "relative feasibility tolerance (default 1e-9)");
    b.text("--out", certify.out, "write the certificate as JSON");
  }
  {
    Sub& s = make("sweep", "closed form vs. bisection over a grid; CSV");
    Bindings& b = *s.bindings;
    b.list("--alpha", sweep_args.grid.alpha, "alpha values (comma separated)");
    b.list("--rho0", sweep_args.grid.rho0, "rho0 values");
    b.list("--kappa", sweep_args.grid.kappa, "kappa values");
    b.text("--grid-file", sweep_args.grid.grid_file, "JSON grid {alpha, rho0, kappa}");
    b.text("--out", sweep_args.out, "CSV output path (default stdout)");
    b.number("--tol-bisect", sweep_args.tol_bisect, "bisection tolerance (default 1e-5)");
    b.number("--tol-feas", sweep_args.tol_feas, "feasibility tolerance (default 1e-9)");
    b.integer("--workers", sweep_args.workers, "worker threads (default: all cores)");
    b.integer("--seed", sweep_args.seed, "seed (the sweep is deterministic)");
  }
  {
    Sub& s = make("frontier", "feasible kappa range for alpha >= 2; CSV");
    Bindings& b = *s.bindings;
    b.number("--alpha", frontier.alpha, "relaxation, >= 2");
    b.number("--rho0", frontier.rho0, "normalized step size (default 1)");
    b.list("--kappa", frontier.grid.kappa, "explicit kappa grid");
    b.number("--kappa-max", frontier.kappa_max, "upper end of the default log grid (default 30)");
    b.text("--grid-file", frontier.grid.grid_file, "JSON grid {kappa}");
    b.text("--out", frontier.out, "CSV output path (default stdout)");
    b.number("--tol-bisect", frontier.tol_bisect, "bisection tolerance (default 1e-5)");
    b.number("--tol-feas", frontier.tol_feas, "feasibility tolerance (default 1e-9)");
    b.integer("--workers", frontier.workers, "worker threads (default: all cores)");
  }
  {
    Sub& s = make("demo", "run ADMM on a problem and overlay the certified bound; CSV");
    Bindings& b = *s.bindings;
    b.text("--problem", demo.problem, "problem JSON (default: random quadratic + l1)");
    b.text("--out", demo.out, "CSV output path (default stdout)");
    b.integer("--seed", demo.seed, "seed for random problems (default 0)");
    b.number("--kappa-b", demo.kappa_b, "override the instance's kappa_B");
  }
  {
    Sub& s = make("compare", "ADMM vs. gradient descent optimal rates; CSV");
    Bindings& b = *s.bindings;
    b.list("--kappa", compare.grid.kappa, "kappa values");
    b.list("--kappa-f", compare.grid.kappa_f, "kappa_F values");
    b.text("--grid-file", compare.grid.grid_file, "JSON grid {kappa, kappa_f}");
    b.text("--out", compare.out, "CSV output path (default stdout)");
    b.number("--tol-rate", compare.tol_rate, "GD witness rate tolerance (default 1e-6)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsageError;
  }

  try {
    for (const Sub& s : subs) {
      if (!s.app->parsed()) continue;
      if (!s.config.empty()) s.bindings->apply(load_json_file(s.config));
      const std::string name = s.app->get_name();
      if (name == "certify") return cmd_certify(certify, out);
      if (name == "sweep") return cmd_sweep(sweep_args, out, err);
      if (name == "frontier") return cmd_frontier(frontier, out, err);
      if (name == "demo") return cmd_demo(demo, out, err);
      if (name == "compare") return cmd_compare(compare, out, err);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConditioningError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsageError;
}

}  // namespace admmrate::cli
