// hclab: experiment runner for the disordered attractive hard-core chain.
// Subcommands build configuration spaces, spectra and correlators, run the
// disorder-averaged estimators, and verify the deterministic bounds.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hcl/bounds.hpp"
#include "hcl/config_space.hpp"
#include "hcl/disorder.hpp"
#include "hcl/io.hpp"
#include "hcl/mc.hpp"
#include "hcl/operators.hpp"
#include "hcl/rng.hpp"
#include "hcl/spectral.hpp"
#include "hcl/xxz.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

std::string default_out_dir() {
  if (const char* env = std::getenv("HCLAB_OUT_DIR")) return env;
  return ".";
}

class Run {
 public:
  Run(std::string subcommand, fs::path dir)
      : subcommand_(std::move(subcommand)), dir_(std::move(dir)), started_(hcl::timestamp_utc()) {
    fs::create_directories(dir_);
  }

  void emit(const std::string& name, const hcl::CsvWriter& csv) {
    const fs::path p = dir_ / name;
    csv.write(p);
    const std::string body = csv.body();
    entries_.push_back({name, body.size(), hcl::fnv1a64_hex(body)});
  }

  void emit_text(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    os << body;
    entries_.push_back({name, body.size(), hcl::fnv1a64_hex(body)});
  }

  void echo(const std::string& key, const std::string& value) { plan_echo_[key] = value; }
  void echo(const std::string& key, double value) { plan_echo_[key] = hcl::format_double(value); }
  void echo(const std::string& key, long long value) { plan_echo_[key] = std::to_string(value); }

  void finish(std::uint64_t seed_root) {
    hcl::write_manifest(dir_ / "run_manifest.json", subcommand_, plan_echo_, seed_root,
                        entries_, started_, hcl::timestamp_utc());
  }

 private:
  std::string subcommand_;
  fs::path dir_;
  std::string started_;
  std::vector<hcl::ManifestEntry> entries_;
  std::map<std::string, std::string> plan_echo_;
};

struct PlanOptions {
  hcl::McPlan plan;
  std::string config_path;
  std::string out_dir = default_out_dir();

  void add_common(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value plan file");
    cmd->add_option("--L", plan.L, "half-width of the lattice [-L, L]");
    cmd->add_option("--n", plan.n, "particle number");
    cmd->add_option("--g", plan.params.g, "interaction strength, > 1");
    cmd->add_option("--lambda", plan.params.lambda, "disorder strength, >= 0");
    cmd->add_option("--omega-max", plan.omega_max, "upper edge of the field support");
    cmd->add_option("--realizations", plan.realizations, "number of disorder realizations");
    cmd->add_option("--seed", plan.seed_root, "seed root for the realization streams");
    cmd->add_option("--s", plan.s, "fractional moment exponent in (0,1)");
    cmd->add_option("--mu", plan.mu, "decay rate, 0 < mu < mu_T");
    cmd->add_option("--mu-T", plan.mu_T, "Combes-Thomas rate");
    cmd->add_option("--energy", plan.energy, "Green-function probe energy");
    cmd->add_option("--window", window_spec, "energy window lo:hi");
    cmd->add_option("--distribution", plan.distribution, "registered disorder law");
    cmd->add_option("--out-dir", out_dir, "output directory (env HCLAB_OUT_DIR)");
  }

  // config file first, then command-line overrides
  void resolve(const CLI::App* cmd) {
    if (!config_path.empty()) {
      const auto kv = hcl::read_config_file(config_path);
      hcl::reject_unknown_keys(kv);
      auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
      };
      auto overridden = [&](const char* flag) { return cmd->count(flag) > 0; };
      if (const auto* v = get("L"); v && !overridden("--L")) plan.L = std::stoi(*v);
      if (const auto* v = get("n"); v && !overridden("--n")) plan.n = std::stoi(*v);
      if (const auto* v = get("g"); v && !overridden("--g")) plan.params.g = std::stod(*v);
      if (const auto* v = get("lambda"); v && !overridden("--lambda"))
        plan.params.lambda = std::stod(*v);
      if (const auto* v = get("omega_max"); v && !overridden("--omega-max"))
        plan.omega_max = std::stod(*v);
      if (const auto* v = get("distribution"); v && !overridden("--distribution"))
        plan.distribution = *v;
      if (const auto* v = get("realizations"); v && !overridden("--realizations"))
        plan.realizations = std::stoi(*v);
      if (const auto* v = get("seed_root"); v && !overridden("--seed"))
        plan.seed_root = std::stoull(*v);
      if (const auto* v = get("window_lo"); v) plan.window.lo = std::stod(*v);
      if (const auto* v = get("window_hi"); v) plan.window.hi = std::stod(*v);
      if (const auto* v = get("s"); v && !overridden("--s")) plan.s = std::stod(*v);
      if (const auto* v = get("mu"); v && !overridden("--mu")) plan.mu = std::stod(*v);
      if (const auto* v = get("mu_T"); v && !overridden("--mu-T")) plan.mu_T = std::stod(*v);
      if (const auto* v = get("energy"); v && !overridden("--energy"))
        plan.energy = std::stod(*v);
    }
    if (!window_spec.empty()) {
      const auto colon = window_spec.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("--window expects lo:hi");
      plan.window.lo = std::stod(window_spec.substr(0, colon));
      plan.window.hi = std::stod(window_spec.substr(colon + 1));
    }
  }

  void echo_into(Run& run) const {
    run.echo("L", static_cast<long long>(plan.L));
    run.echo("n", static_cast<long long>(plan.n));
    run.echo("g", plan.params.g);
    run.echo("lambda", plan.params.lambda);
    run.echo("omega_max", plan.omega_max);
    run.echo("distribution", plan.distribution);
    run.echo("realizations", static_cast<long long>(plan.realizations));
    run.echo("seed_root", static_cast<long long>(plan.seed_root));
    run.echo("window_lo", plan.window.lo);
    run.echo("window_hi", plan.window.hi);
    run.echo("s", plan.s);
    run.echo("mu", plan.mu);
    run.echo("mu_T", plan.mu_T);
    run.echo("energy", plan.energy);
  }

  std::string window_spec;
};

int cmd_enumerate(const PlanOptions& opt) {
  const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
  std::cout << "configurations: " << space.size() << "\n";
  hcl::CsvWriter csv({"k", "size"});
  for (int k = 1; k <= space.max_clusters(); ++k) {
    std::cout << "sector k=" << k << ": " << space.sector_members(k).size() << "\n";
    csv.add_row({std::to_string(k), std::to_string(space.sector_members(k).size())});
  }
  Run run("enumerate", opt.out_dir);
  opt.echo_into(run);
  run.emit("sectors.csv", csv);
  run.finish(opt.plan.seed_root);
  return kExitOk;
}

int cmd_spectrum(const PlanOptions& opt, const std::string& band_edge_ns, bool export_op) {
  const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
  const auto w = hcl::sample_disorder(opt.plan.L, opt.plan.distribution,
                                      hcl::derive_seed(opt.plan.seed_root, 0),
                                      opt.plan.omega_max);
  const auto H = hcl::build_hamiltonian(space, opt.plan.params, w);
  const auto sd = hcl::diagonalize(H);

  Run run("spectrum", opt.out_dir);
  opt.echo_into(run);

  hcl::CsvWriter csv({"index", "eigenvalue"});
  for (int i = 0; i < sd.dim(); ++i)
    csv.add_row({std::to_string(i), hcl::format_double(sd.eigenvalues()(i))});
  run.emit("eigenvalues.csv", csv);

  if (!band_edge_ns.empty()) {
    hcl::CsvWriter band({"g", "n", "band_lo", "band_hi"});
    std::stringstream ss(band_edge_ns);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const int n = std::stoi(tok);
      const auto b = hcl::droplet_band(opt.plan.params.g, n);
      band.add_row({hcl::format_double(opt.plan.params.g), std::to_string(n),
                    hcl::format_double(b.lo), hcl::format_double(b.hi)});
    }
    run.emit("band_edges.csv", band);
  }
  if (export_op) {
    std::ostringstream os;
    hcl::export_triplets(H, os);
    run.emit_text("hamiltonian.triplets", os.str());
  }
  run.finish(opt.plan.seed_root);
  std::cout << "dim " << sd.dim() << ", min " << sd.eigenvalues()(0) << ", max "
            << sd.eigenvalues()(sd.dim() - 1) << "\n";
  return kExitOk;
}

int cmd_correlator(const PlanOptions& opt) {
  const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
  const std::uint64_t seed = hcl::derive_seed(opt.plan.seed_root, 0);
  const auto w =
      hcl::sample_disorder(opt.plan.L, opt.plan.distribution, seed, opt.plan.omega_max);
  const auto sd = hcl::diagonalize(hcl::build_hamiltonian(space, opt.plan.params, w));

  Run run("correlator", opt.out_dir);
  opt.echo_into(run);
  hcl::CsvWriter csv({"seed", "x_index", "y_index", "window_lo", "window_hi", "value"});
  const auto& cl = space.clustered();
  for (int a : cl)
    for (int b : cl)
      csv.add_row({std::to_string(seed), std::to_string(a), std::to_string(b),
                   hcl::format_double(opt.plan.window.lo), hcl::format_double(opt.plan.window.hi),
                   hcl::format_double(hcl::eigenfunction_correlator(sd, a, b, opt.plan.window))});
  run.emit("correlator.csv", csv);
  run.finish(opt.plan.seed_root);
  return kExitOk;
}

int cmd_mc_run(const PlanOptions& opt, const std::string& fm_lambdas, bool with_sums) {
  const auto table = hcl::estimate_correlator_decay(opt.plan);

  Run run("mc-run", opt.out_dir);
  opt.echo_into(run);

  hcl::CsvWriter decay({"separation", "mean", "stderr", "count"});
  for (const auto& row : table.per_separation)
    decay.add_row({std::to_string(row.separation), hcl::format_double(row.est.mean),
                   hcl::format_double(row.est.stderr_), std::to_string(row.est.count)});
  run.emit("decay_curve.csv", decay);

  hcl::CsvWriter fit({"mu_fit", "mu_fit_se", "log_c_fit", "c_envelope", "violations",
                      "realizations_with_weight"});
  fit.add_row({hcl::format_double(table.mu_fit), hcl::format_double(table.mu_fit_se),
               hcl::format_double(table.log_c_fit), hcl::format_double(table.c_envelope),
               std::to_string(table.violations),
               std::to_string(table.realizations_with_weight)});
  run.emit("decay_fit.csv", fit);

  if (!fm_lambdas.empty()) {
    std::vector<double> lams;
    std::stringstream ss(fm_lambdas);
    std::string tok;
    while (std::getline(ss, tok, ',')) lams.push_back(std::stod(tok));
    std::sort(lams.begin(), lams.end());
    const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
    const hcl::Configuration x = space.config(space.clustered()[space.clustered().size() / 2]);
    hcl::CsvWriter sweep({"lambda", "mean", "stderr", "count"});
    for (double lam : lams) {
      hcl::McPlan p = opt.plan;
      p.params.lambda = lam;
      const auto est = hcl::fractional_moment_probe(p, x, x);
      sweep.add_row({hcl::format_double(lam), hcl::format_double(est.mean),
                     hcl::format_double(est.stderr_), std::to_string(est.count)});
    }
    run.emit("fm_sweep.csv", sweep);
  }

  if (with_sums) {
    const auto sums = hcl::sum_S1_S2(opt.plan);
    hcl::CsvWriter s12({"quantity", "subinterval_lo", "subinterval_hi", "x_ordinal", "mean",
                        "stderr", "count"});
    for (const auto& [name, cell] :
         {std::pair{"S1", sums.s1}, std::pair{"S2", sums.s2}}) {
      s12.add_row({name, std::to_string(cell.subinterval.a), std::to_string(cell.subinterval.b),
                   std::to_string(cell.x_ordinal), hcl::format_double(cell.est.mean),
                   hcl::format_double(cell.est.stderr_), std::to_string(cell.est.count)});
    }
    run.emit("sums.csv", s12);
  }

  run.finish(opt.plan.seed_root);
  std::cout << "mu_fit " << table.mu_fit << " +- " << table.mu_fit_se << ", violations "
            << table.violations << "\n";
  return kExitOk;
}

int cmd_ct_verify(const PlanOptions& opt, double E) {
  const hcl::CtParams p{opt.plan.params.g, opt.plan.mu_T, E};
  p.require_admissible();  // exits with code 1 through the usage handler

  const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
  Run run("ct-verify", opt.out_dir);
  opt.echo_into(run);
  run.echo("E", E);

  hcl::CsvWriter csv({"realization", "seed", "worst_ratio", "c_t", "x_index", "y_index",
                      "pass"});
  bool all_pass = true;
  for (int r = 0; r < opt.plan.realizations; ++r) {
    const auto seed = hcl::derive_seed(opt.plan.seed_root, r);
    const auto w =
        hcl::sample_disorder(opt.plan.L, opt.plan.distribution, seed, opt.plan.omega_max);
    const auto rep = hcl::ct_verify(space, opt.plan.params, w, p);
    all_pass = all_pass && rep.pass;
    csv.add_row({std::to_string(r), std::to_string(seed), hcl::format_double(rep.worst_ratio),
                 hcl::format_double(rep.c_t), std::to_string(rep.x_ordinal),
                 std::to_string(rep.y_ordinal), rep.pass ? "1" : "0"});
  }
  run.emit("ct_report.csv", csv);
  run.finish(opt.plan.seed_root);
  if (!all_pass) {
    std::cerr << "Combes-Thomas bound violated; see ct_report.csv\n";
    return kExitViolation;
  }
  std::cout << "all " << opt.plan.realizations << " realizations within C_T\n";
  return kExitOk;
}

int cmd_xxz_check(const PlanOptions& opt) {
  const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
  Run run("xxz-check", opt.out_dir);
  opt.echo_into(run);

  hcl::CsvWriter csv({"realization", "seed", "N", "n", "g", "lambda", "residual", "pass"});
  bool all_pass = true;
  for (int r = 0; r < opt.plan.realizations; ++r) {
    const auto seed = hcl::derive_seed(opt.plan.seed_root, r);
    const auto w =
        hcl::sample_disorder(opt.plan.L, opt.plan.distribution, seed, opt.plan.omega_max);
    const double res = hcl::equivalence_residual(space, opt.plan.params.g,
                                                 opt.plan.params.lambda, w);
    const bool pass = res <= 1e-10;
    all_pass = all_pass && pass;
    csv.add_row({std::to_string(r), std::to_string(seed), std::to_string(space.num_sites()),
                 std::to_string(opt.plan.n), hcl::format_double(opt.plan.params.g),
                 hcl::format_double(opt.plan.params.lambda), hcl::format_double(res),
                 pass ? "1" : "0"});
    std::cout << "realization " << r << ": residual " << res << "\n";
  }
  run.emit("xxz_residuals.csv", csv);
  run.finish(opt.plan.seed_root);
  return all_pass ? kExitOk : kExitViolation;
}

int cmd_bounds_report(const PlanOptions& opt, double E) {
  const hcl::CtParams p{opt.plan.params.g, opt.plan.mu_T, E};
  p.require_admissible();

  const hcl::ConfigSpace space(opt.plan.L, opt.plan.n);
  Run run("bounds-report", opt.out_dir);
  opt.echo_into(run);
  run.echo("E", E);

  hcl::CsvWriter blocks({"realization", "seed", "kind", "k", "j", "l", "norm", "bound",
                         "pass"});
  hcl::CsvWriter pert({"realization", "seed", "x_index", "y_index", "lhs", "rhs", "pass"});
  bool all_pass = true;
  for (int r = 0; r < opt.plan.realizations; ++r) {
    const auto seed = hcl::derive_seed(opt.plan.seed_root, r);
    const auto w =
        hcl::sample_disorder(opt.plan.L, opt.plan.distribution, seed, opt.plan.omega_max);
    const hcl::Configuration anchor = space.config(space.clustered().front());
    const auto rep = hcl::ct_block_norms(space, opt.plan.params, w, p, anchor);
    all_pass = all_pass && rep.pass;
    auto add = [&](const char* kind, const hcl::BlockNormRow& row) {
      blocks.add_row({std::to_string(r), std::to_string(seed), kind, std::to_string(row.k),
                      std::to_string(row.j), std::to_string(row.l),
                      hcl::format_double(row.norm), hcl::format_double(row.bound),
                      row.pass ? "1" : "0"});
    };
    for (const auto& row : rep.ct1) add("CT1", row);
    for (const auto& row : rep.ct2) add("CT2", row);

    // perturbative correlator step on a window inside [0, E(g, mu_T))
    const double cap = hcl::fock_threshold(opt.plan.params.g, opt.plan.mu_T);
    if (cap > 0) {
      const hcl::EnergyWindow I{0.0, std::min(opt.plan.window.hi, cap * 0.99)};
      const auto sd = hcl::diagonalize(hcl::build_hamiltonian(space, opt.plan.params, w));
      for (int x = 0; x < space.size(); x += 3) {
        if (space.is_clustered(x)) continue;
        const auto pr = hcl::perturbative_correlator_check(sd, space, p, x, 0, I);
        all_pass = all_pass && pr.holds;
        pert.add_row({std::to_string(r), std::to_string(seed), std::to_string(x), "0",
                      hcl::format_double(pr.lhs), hcl::format_double(pr.rhs),
                      pr.holds ? "1" : "0"});
      }
    }
  }
  run.emit("block_norms.csv", blocks);
  run.emit("perturbative.csv", pert);
  run.finish(opt.plan.seed_root);
  return all_pass ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hclab: disordered attractive hard-core chain laboratory"};
  app.require_subcommand(1);

  PlanOptions opt;
  double ct_E = 0.0;
  std::string band_edge_ns;
  std::string fm_lambdas;
  bool export_op = false;
  bool with_sums = false;

  auto* c_enum = app.add_subcommand("enumerate", "enumerate a configuration space");
  opt.add_common(c_enum);
  auto* c_spec = app.add_subcommand("spectrum", "diagonalize one disorder realization");
  opt.add_common(c_spec);
  c_spec->add_option("--band-edges", band_edge_ns, "emit droplet band edges for n list");
  c_spec->add_flag("--export-operator", export_op, "write the Hamiltonian triplet file");
  auto* c_corr = app.add_subcommand("correlator", "eigenfunction correlator table");
  opt.add_common(c_corr);
  auto* c_mc = app.add_subcommand("mc-run", "disorder-averaged correlator decay");
  opt.add_common(c_mc);
  c_mc->add_option("--fm-lambdas", fm_lambdas, "fractional-moment lambda sweep list");
  c_mc->add_flag("--with-sums", with_sums, "also estimate the sup-sums S1/S2");
  auto* c_ct = app.add_subcommand("ct-verify", "Combes-Thomas bound verification");
  opt.add_common(c_ct);
  c_ct->add_option("--E", ct_E, "resolvent energy");
  auto* c_xxz = app.add_subcommand("xxz-check", "XXZ dictionary residuals");
  opt.add_common(c_xxz);
  auto* c_bounds = app.add_subcommand("bounds-report", "block norms and perturbative step");
  opt.add_common(c_bounds);
  c_bounds->add_option("--E", ct_E, "resolvent energy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    opt.resolve(sub);
    if (sub == c_enum) return cmd_enumerate(opt);
    if (sub == c_spec) return cmd_spectrum(opt, band_edge_ns, export_op);
    if (sub == c_corr) return cmd_correlator(opt);
    if (sub == c_mc) return cmd_mc_run(opt, fm_lambdas, with_sums);
    if (sub == c_ct) return cmd_ct_verify(opt, ct_E);
    if (sub == c_xxz) return cmd_xxz_check(opt);
    if (sub == c_bounds) return cmd_bounds_report(opt, ct_E);
    return kExitUsage;
  } catch (const hcl::CertifiedInequalityViolation& e) {
    std::cerr << "certified inequality violated: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
