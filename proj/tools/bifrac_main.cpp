// bifrac: a desk-scale laboratory for weighted bilinear fractional-integral
// estimates: operators, commutators, Orlicz bumps, weight constants, sparse
// families, and theorem-level verification harnesses.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bifrac/driver.hpp"
#include "bifrac/operators.hpp"
#include "bifrac/sparse.hpp"

using namespace bifrac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format;
  long long seed = -1;
  int threads = 0;
  int refine = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file");
  cmd->add_option("--out", opts.out_path, "artifact output path");
  cmd->add_option("--format", opts.format, "artifact format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", opts.seed, "override the experiment seed");
  cmd->add_option("--threads", opts.threads, "cap worker threads");
  cmd->add_option("--refine", opts.refine, "run the ladder L, L+1, ..., L+K-1");
}

ExperimentSpec load_spec(const CommonOpts& opts) {
  ExperimentSpec spec = opts.config_path.empty()
                            ? ExperimentSpec::from_config(ConfigFile::parse_text(""))
                            : ExperimentSpec::from_config(ConfigFile::parse_file(opts.config_path));
  if (opts.seed >= 0) spec.seed = static_cast<uint64_t>(opts.seed);
  if (opts.threads > 0) spec.threads = opts.threads;
  if (!opts.out_path.empty()) spec.out_path = opts.out_path;
  if (!opts.format.empty()) spec.format = opts.format;
  if (opts.refine > 0 && !spec.ladder.empty()) {
    const Mesh base = spec.ladder.front();
    spec.ladder = refinement_ladder(base.dim, base.box_level, base.res_level, opts.refine);
  }
  return spec;
}

void write_artifact(const ExperimentSpec& spec, const std::vector<TheoremReport>& reports) {
  const std::string body =
      spec.format == "csv" ? artifact_csv(spec, reports) : artifact_json(spec, reports);
  if (spec.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(spec.out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output path: " + spec.out_path);
  out << body;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoReverseHolder& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const BpIndeterminate& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bifrac: weighted estimates for bilinear fractional integrals, numerically"};
  app.require_subcommand(1);

  // orlicz: one Luxemburg norm, printed
  auto* orlicz_cmd = app.add_subcommand("orlicz", "evaluate an Orlicz norm on a fixture");
  std::string phi_text = "power(2)";
  double indicator_fraction = 0.25;
  orlicz_cmd->add_option("--phi", phi_text, "Young function, e.g. power(2), logbump(r=2,s=1.5)");
  orlicz_cmd->add_option("--indicator", indicator_fraction,
                         "mass fraction of an indicator over the reference cube");

  CommonOpts bi_opts;
  auto* bi_cmd = app.add_subcommand("bi-alpha", "evaluate the bilinear fractional integral");
  add_common(bi_cmd, bi_opts);
  double bi_alpha_order = 0.5;
  bi_cmd->add_option("--alpha", bi_alpha_order, "fractional order in (0, n)");

  CommonOpts max_opts;
  auto* max_cmd = app.add_subcommand("maximal", "evaluate the bump maximal operator");
  add_common(max_cmd, max_opts);
  std::string max_phi = "power(2)", max_psi = "power(2)";
  double max_alpha = 0.5;
  max_cmd->add_option("--phi", max_phi, "first Young bump");
  max_cmd->add_option("--psi", max_psi, "second Young bump");
  max_cmd->add_option("--alpha", max_alpha, "fractional order in [0, n)");

  CommonOpts comm_opts;
  auto* comm_cmd = app.add_subcommand("commutator", "run both commutator routes and compare");
  add_common(comm_cmd, comm_opts);

  CommonOpts weights_opts;
  auto* weights_cmd = app.add_subcommand("weights", "weight-class and bump constants");
  add_common(weights_cmd, weights_opts);
  std::string bump_kind_text = "eq21";
  weights_cmd->add_option("--kind", bump_kind_text, "bump kind (thmD/thmE/thmA/thmB/eq21/onevec/bmtw)");

  CommonOpts sparse_opts;
  auto* sparse_cmd = app.add_subcommand("sparse", "Calderon-Zygmund sparse family dump");
  add_common(sparse_cmd, sparse_opts);
  double sparse_a = 0;
  std::string sparse_grid = "t0";
  sparse_cmd->add_option("--a", sparse_a, "threshold base a > 1 (default 2^{2n+4})");
  sparse_cmd->add_option("--grid", sparse_grid, "dyadic grid: t0 or t13");

  CommonOpts verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "theorem harness");
  add_common(verify_cmd, verify_opts);
  std::string theorem_override;
  verify_cmd->add_option("--theorem", theorem_override, "theorem id override");

  CommonOpts sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "refinement sweep, CSV rows per scale");
  add_common(sweep_cmd, sweep_opts);

  CLI11_PARSE(app, argc, argv);

  if (orlicz_cmd->parsed()) {
    return guarded([&] {
      const YoungFunction phi = parse_young(phi_text);
      const Mesh mesh{1, 1, 8};
      GridFunction f = GridFunction::indicator(
          mesh, Cube::interval(0.0, indicator_fraction));  // fraction of the unit cube
      const double norm = orlicz_norm(f, Cube::interval(0.0, 1.0), phi);
      std::cout << norm << "\n";
    });
  }

  if (bi_cmd->parsed()) {
    return guarded([&] {
      ExperimentSpec spec = load_spec(bi_opts);
      const Mesh mesh = spec.ladder.front();
      const WeightTriple weights{spec.u.build(mesh, spec.search_dir),
                                 spec.v1.build(mesh, spec.search_dir),
                                 spec.v2.build(mesh, spec.search_dir)};
      const PairFamily pairs = spec.build_pairs(mesh, weights);
      const GridFunction out = bi_alpha(pairs.front().f, pairs.front().g, bi_alpha_order);
      if (!spec.out_path.empty()) {
        std::ofstream os(spec.out_path, std::ios::binary);
        if (spec.format == "csv")
          out.write_csv(os);
        else
          out.write_binary(os);
      }
      std::cout << "bi-alpha: cells=" << out.mesh().cell_count() << " max=" << out.max_value()
                << " l1=" << out.lp_norm(1.0) << "\n";
    });
  }

  if (max_cmd->parsed()) {
    return guarded([&] {
      ExperimentSpec spec = load_spec(max_opts);
      const Mesh mesh = spec.ladder.front();
      const WeightTriple weights{spec.u.build(mesh, spec.search_dir),
                                 spec.v1.build(mesh, spec.search_dir),
                                 spec.v2.build(mesh, spec.search_dir)};
      const PairFamily pairs = spec.build_pairs(mesh, weights);
      const CubeScan scan = spec.build_scan(mesh);
      const GridFunction out = m_orlicz_alpha(pairs.front().f, pairs.front().g,
                                              parse_young(max_phi), parse_young(max_psi),
                                              max_alpha, scan);
      if (!spec.out_path.empty()) {
        std::ofstream os(spec.out_path, std::ios::binary);
        if (spec.format == "csv")
          out.write_csv(os);
        else
          out.write_binary(os);
      }
      std::cout << "maximal: cells=" << out.mesh().cell_count() << " max=" << out.max_value()
                << "\n";
    });
  }

  if (comm_cmd->parsed()) {
    return guarded([&] {
      ExperimentSpec spec = load_spec(comm_opts);
      const Mesh mesh = spec.ladder.front();
      const WeightTriple weights{spec.u.build(mesh, spec.search_dir),
                                 spec.v1.build(mesh, spec.search_dir),
                                 spec.v2.build(mesh, spec.search_dir)};
      const PairFamily pairs = spec.build_pairs(mesh, weights);
      CommutatorSpec cs;
      std::vector<std::string> names = spec.symbols.empty()
                                           ? std::vector<std::string>{"linear", "logabs"}
                                           : spec.symbols;
      const int arity = std::max(spec.cfg.commutator_arity, 1);
      for (int i = 0; i < arity; ++i)
        cs.symbols.push_back(spec.build_symbol(mesh, names[static_cast<size_t>(i) % names.size()]));
      for (int i = 0; i < arity; ++i)
        cs.slots.push_back(i < std::max(spec.cfg.first_slot_count, arity > 1 ? 1 : 0) ? 1 : 2);
      const GridFunction direct = commutator_direct(cs, pairs.front().f, pairs.front().g,
                                                    spec.cfg.alpha);
      const GridFunction kernel = commutator_kernel(cs, pairs.front().f, pairs.front().g,
                                                    spec.cfg.alpha);
      double worst = 0, scale = 0;
      for (long long i = 0; i < mesh.cell_count(); ++i) {
        worst = std::max(worst, std::abs(direct.value(i) - kernel.value(i)));
        scale = std::max(scale, std::abs(direct.value(i)));
      }
      std::cout << "commutator: N=" << arity << " route_gap=" << worst / std::max(scale, 1e-300)
                << "\n";
    });
  }

  if (weights_cmd->parsed()) {
    return guarded([&] {
      ExperimentSpec spec = load_spec(weights_opts);
      std::ostringstream lines;
      for (const Mesh& mesh : spec.ladder) {
        const WeightTriple weights{spec.u.build(mesh, spec.search_dir),
                                   spec.v1.build(mesh, spec.search_dir),
                                   spec.v2.build(mesh, spec.search_dir)};
        BumpSpec bump;
        bump.kind = bump_kind_from_name(bump_kind_text);
        bump.cfg = spec.cfg;
        bump.delta = spec.delta;
        bump.psi = spec.psi;
        bump.phi1 = spec.phi1;
        bump.phi2 = spec.phi2;
        const CubeScan scan = spec.build_scan(mesh);
        const ScanMax res = bump_constant(bump, weights, scan);
        lines << "{\"kind\": \"" << bump_kind_text << "\", \"W\": " << mesh.half_width()
              << ", \"L\": " << mesh.res_level << ", \"constant\": " << res.value
              << ", \"per_scale\": {";
        bool first = true;
        for (const auto& [j, v] : res.per_scale) {
          if (!first) lines << ", ";
          first = false;
          lines << "\"" << j << "\": " << v;
        }
        lines << "}";
        if (res.argmax) lines << ", \"argmax\": \"" << res.argmax->describe() << "\"";
        lines << "}\n";
      }
      if (spec.out_path.empty()) {
        std::cout << lines.str();
      } else {
        std::ofstream os(spec.out_path, std::ios::binary);
        os << lines.str();
      }
      std::cout << "weights: kind=" << bump_kind_text << " steps=" << spec.ladder.size() << "\n";
    });
  }

  if (sparse_cmd->parsed()) {
    return guarded([&] {
      ExperimentSpec spec = load_spec(sparse_opts);
      const Mesh mesh = spec.ladder.front();
      const WeightTriple weights{spec.u.build(mesh, spec.search_dir),
                                 spec.v1.build(mesh, spec.search_dir),
                                 spec.v2.build(mesh, spec.search_dir)};
      const PairFamily pairs = spec.build_pairs(mesh, weights);
      std::array<int, kMaxDim> shift{};
      if (sparse_grid == "t13")
        shift[0] = shift[1] = 1;
      else if (sparse_grid != "t0")
        throw ConfigError("unknown grid name: " + sparse_grid);
      const DyadicGrid grid(mesh.dim, shift);
      const double base = sparse_a > 0 ? sparse_a
                          : spec.cz_base > 0 ? spec.cz_base
                                             : std::ldexp(1.0, 2 * mesh.dim + 4);
      const auto fam = cz_select(pairs.front().f, pairs.front().g, YoungFunction::l_log_l(1),
                                 YoungFunction::l_log_l(1), base, grid);
      std::ostringstream body;
      fam.write_json(body);
      if (spec.out_path.empty()) {
        std::cout << body.str();
      } else {
        std::ofstream os(spec.out_path, std::ios::binary);
        os << body.str();
      }
      std::cout << "sparse: cubes=" << fam.cube_count()
                << " min_carve_ratio=" << fam.min_carve_ratio() << "\n";
    });
  }

  if (verify_cmd->parsed() || sweep_cmd->parsed()) {
    const CommonOpts& opts = verify_cmd->parsed() ? verify_opts : sweep_opts;
    return guarded([&] {
      ExperimentSpec spec = load_spec(opts);
      if (!theorem_override.empty()) spec.theorem = theorem_override;
      if (sweep_cmd->parsed()) spec.format = opts.format.empty() ? "csv" : opts.format;
      const std::vector<TheoremReport> reports = run_experiment(spec);
      write_artifact(spec, reports);
      bool all_pass = true;
      for (const auto& rep : reports) all_pass = all_pass && rep.pass;
      std::cout << "verify: theorem=" << spec.theorem << " reports=" << reports.size()
                << " pass=" << (all_pass ? "yes" : "no") << "\n";
    });
  }

  return kExitConfig;
}
