#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cutofflab/cutofflab.hpp"

namespace cutofflab {

enum class Subcommand { Describe, Spectrum, Mix, Hit, Simulate, Verify, Sweep };

/// Raised when --help was requested; carries the help text and maps to exit 0.
struct HelpRequested {
  std::string text;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::Describe;
  std::string tree_file;            // single-tree or family spec
  std::string family_file;          // family spec (alias input for verify/sweep)
  std::string children_inline;      // "2,2,1" shortcut
  std::string corpus;               // "max_h,max_children" for verify
  std::string pair_spec;            // "lx,ly,lq"
  int return_level = -1;
  double epsilon = 0.25;
  std::vector<double> eps_grid = default_epsilon_grid();
  bool emit_profile = false;        // mix: emit the full d(t) table
  bool rs_mode = false;             // simulate: R+S split instead of tau
  long long samples = 10000;
  std::uint64_t seed = 1;
  std::string out_path;             // empty = stdout
  long long oracle_cap = kDefaultOracleCap;
  long long mixing_cap = kDefaultMixingCap;
  int threads = 0;                  // 0 = hardware concurrency
};

namespace detail {

inline long long env_oracle_cap() {
  if (const char* s = std::getenv("CUTOFFLAB_ORACLE_CAP")) {
    try {
      return parse_int(s);
    } catch (const Error&) {
      throw UsageError("CUTOFFLAB_ORACLE_CAP is not an integer: '" + std::string(s) + "'");
    }
  }
  return kDefaultOracleCap;
}

}  // namespace detail

/// Parses argv (without the program name) into a validated RunConfig.
/// Throws UsageError with a message naming the offending flag.
inline RunConfig parse_args(const std::vector<std::string>& argv) {
  RunConfig cfg;
  cfg.oracle_cap = detail::env_oracle_cap();

  CLI::App app{"cutoff-lab: exact mixing, spectral, and hitting-time analysis of lazy walks "
               "on spherically symmetric trees"};
  app.require_subcommand(1);

  const auto add_tree_opts = [&](CLI::App* sub) {
    sub->add_option("--tree", cfg.tree_file, "tree spec file (JSON)");
    sub->add_option("--children", cfg.children_inline, "inline children counts, e.g. 2,2,1");
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "output CSV path (default stdout)");
    sub->add_option("--oracle-cap", cfg.oracle_cap, "dense-oracle vertex cap");
    sub->add_option("--mixing-cap", cfg.mixing_cap, "step cap for mixing-time searches");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  };

  CLI::App* describe = app.add_subcommand("describe", "per-level structure of a tree");
  add_tree_opts(describe);
  add_common(describe);

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of the lazy walk");
  add_tree_opts(spectrum);
  add_common(spectrum);

  CLI::App* mix = app.add_subcommand("mix", "mixing times / distance profile");
  add_tree_opts(mix);
  add_common(mix);
  mix->add_option("--epsilon", cfg.epsilon, "TV threshold")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  mix->add_flag("--profile", cfg.emit_profile, "emit the full d(t) table");

  CLI::App* hit = app.add_subcommand("hit", "hitting / return time moments");
  add_tree_opts(hit);
  add_common(hit);
  hit->add_option("--pair", cfg.pair_spec, "symmetry class lx,ly,lq");
  hit->add_option("--return", cfg.return_level, "return-time level");

  CLI::App* simulate = app.add_subcommand("simulate", "seeded Monte Carlo hitting times");
  add_tree_opts(simulate);
  add_common(simulate);
  simulate->add_option("--pair", cfg.pair_spec, "symmetry class lx,ly,lq")->required();
  simulate->add_option("--samples", cfg.samples, "number of trajectories")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", cfg.seed, "RNG seed");
  simulate->add_flag("--rs", cfg.rs_mode, "decompose tau = R + S at x");

  CLI::App* verify = app.add_subcommand("verify", "check every paper inequality");
  add_tree_opts(verify);
  add_common(verify);
  verify->add_option("--corpus", cfg.corpus, "enumerate corpus max_h,max_children");
  verify->add_option("--family", cfg.family_file, "family spec file (JSON)");

  CLI::App* sweep = app.add_subcommand("sweep", "cutoff diagnostic table for a family");
  add_tree_opts(sweep);
  add_common(sweep);
  sweep->add_option("--family", cfg.family_file, "family spec file (JSON)");
  sweep->add_option("--epsilons", cfg.eps_grid, "epsilon grid")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));

  std::vector<std::string> args(argv.rbegin(), argv.rend());  // CLI11 wants reversed
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) throw HelpRequested{app.help()};
    throw UsageError(e.what());
  }

  if (describe->parsed()) cfg.subcommand = Subcommand::Describe;
  if (spectrum->parsed()) cfg.subcommand = Subcommand::Spectrum;
  if (mix->parsed()) cfg.subcommand = Subcommand::Mix;
  if (hit->parsed()) cfg.subcommand = Subcommand::Hit;
  if (simulate->parsed()) cfg.subcommand = Subcommand::Simulate;
  if (verify->parsed()) cfg.subcommand = Subcommand::Verify;
  if (sweep->parsed()) cfg.subcommand = Subcommand::Sweep;

  int sources = 0;
  if (!cfg.tree_file.empty()) ++sources;
  if (!cfg.family_file.empty()) ++sources;
  if (!cfg.children_inline.empty()) ++sources;
  if (!cfg.corpus.empty()) ++sources;
  if (sources > 1) throw UsageError("give exactly one of --tree, --family, --children, --corpus");
  if (sources == 0)
    throw UsageError("an input is required: --tree, --family, --children, or --corpus");
  if (cfg.subcommand == Subcommand::Hit && cfg.pair_spec.empty() && cfg.return_level < 0)
    throw UsageError("hit requires --pair lx,ly,lq or --return level");
  return cfg;
}

namespace detail {

inline std::vector<int> parse_children_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& tok : split(s, ','))
    out.push_back(static_cast<int>(parse_int(tok)));
  return out;
}

inline VertexPair parse_pair_spec(const std::string& s) {
  const auto f = split(s, ',');
  if (f.size() != 3) throw UsageError("--pair expects lx,ly,lq");
  return VertexPair{static_cast<int>(parse_int(f[0])), static_cast<int>(parse_int(f[1])),
                    static_cast<int>(parse_int(f[2]))};
}

inline std::vector<TreeProfile> input_trees(const RunConfig& cfg) {
  if (!cfg.tree_file.empty()) return trees_from_file(cfg.tree_file);
  if (!cfg.family_file.empty()) return trees_from_file(cfg.family_file);
  if (!cfg.children_inline.empty())
    return {build_profile(parse_children_list(cfg.children_inline))};
  throw UsageError("no tree input given");
}

inline TreeProfile input_single_tree(const RunConfig& cfg) {
  const auto trees = input_trees(cfg);
  if (trees.size() != 1) throw UsageError("this subcommand takes a single tree, not a family");
  return trees.front();
}

inline int run_impl(const RunConfig& cfg, std::ostream& os) {
  switch (cfg.subcommand) {
    case Subcommand::Describe: {
      const TreeProfile p = input_single_tree(cfg);
      os << "level,children,level_size,degree,pi_vertex\n";
      for (int k = 0; k <= p.height; ++k)
        os << k << ',' << (k < p.height ? p.children[static_cast<size_t>(k)] : 0) << ','
           << p.level_sizes[static_cast<size_t>(k)] << ','
           << p.level_degrees[static_cast<size_t>(k)] << ','
           << (p.height >= 1 ? fmt_double(p.pi_vertex(k)) : "0") << '\n';
      return 0;
    }
    case Subcommand::Spectrum: {
      const TreeProfile p = input_single_tree(cfg);
      const Relaxation r = lambda2(p);
      os << "value,multiplicity,source\n";
      for (size_t i = 0; i < r.spectrum.values.size(); ++i)
        os << fmt_double(r.spectrum.values[i]) << ',' << r.spectrum.multiplicities[i]
           << ",decomposition\n";
      return 0;
    }
    case Subcommand::Mix: {
      const TreeProfile p = input_single_tree(cfg);
      if (cfg.emit_profile) {
        const MixProfile mp = mix_profile(p, {cfg.epsilon}, cfg.mixing_cap);
        os << "t,distance,argmax_level\n";
        for (size_t t = 0; t < mp.d.size(); ++t)
          os << t << ',' << fmt_double(mp.d[t]) << ',' << mp.argmax_level[t] << '\n';
      } else {
        os << "epsilon,t_mix\n";
        os << fmt_double(cfg.epsilon) << ',' << mixing_time(p, cfg.epsilon, cfg.mixing_cap)
           << '\n';
      }
      return 0;
    }
    case Subcommand::Hit: {
      const TreeProfile p = input_single_tree(cfg);
      os << "kind,lx,ly,lq,e,var,var_over_e2\n";
      if (!cfg.pair_spec.empty()) {
        const VertexPair v = parse_pair_spec(cfg.pair_spec);
        const HittingMoments m = hitting_moments(p, v);
        os << "pair," << v.lx << ',' << v.ly << ',' << v.lq << ',' << fmt_double(m.e) << ','
           << fmt_double(m.var) << ',' << fmt_double(m.var / (m.e * m.e)) << '\n';
      }
      if (cfg.return_level >= 0) {
        const HittingMoments m = return_moments(p, cfg.return_level);
        os << "return," << cfg.return_level << ',' << cfg.return_level << ',' << cfg.return_level
           << ',' << fmt_double(m.e) << ',' << fmt_double(m.var) << ','
           << fmt_double(m.var / (m.e * m.e)) << '\n';
      }
      return 0;
    }
    case Subcommand::Simulate: {
      const TreeProfile p = input_single_tree(cfg);
      const VertexPair v = parse_pair_spec(cfg.pair_spec);
      if (cfg.rs_mode) {
        const RSStats st = sample_rs(p, v, cfg.samples, cfg.seed);
        os << "count,mean_r,mean_s,var_r,var_s,cov_rs,se_mean_r,se_mean_s,se_cov,se_var_s,seed\n";
        os << st.count << ',' << fmt_double(st.mean_r) << ',' << fmt_double(st.mean_s) << ','
           << fmt_double(st.var_r) << ',' << fmt_double(st.var_s) << ',' << fmt_double(st.cov_rs)
           << ',' << fmt_double(st.se_mean_r) << ',' << fmt_double(st.se_mean_s) << ','
           << fmt_double(st.se_cov) << ',' << fmt_double(st.se_var_s) << ',' << st.seed << '\n';
      } else {
        const SampleStats st = sample_hitting(p, v, cfg.samples, cfg.seed);
        os << "count,mean,variance,se,seed\n";
        os << st.count << ',' << fmt_double(st.mean) << ',' << fmt_double(st.variance) << ','
           << fmt_double(st.se) << ',' << st.seed << '\n';
      }
      return 0;
    }
    case Subcommand::Verify: {
      std::vector<TreeProfile> trees;
      if (!cfg.corpus.empty()) {
        const auto f = split(cfg.corpus, ',');
        if (f.size() != 2) throw UsageError("--corpus expects max_h,max_children");
        trees = enumerate_profiles(static_cast<int>(parse_int(f[0])),
                                   static_cast<int>(parse_int(f[1])));
      } else {
        trees = input_trees(cfg);
      }
      VerifyOptions opt;
      opt.oracle_cap = cfg.oracle_cap;
      opt.mixing_cap = cfg.mixing_cap;
      const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
      const auto reports = parallel_map(
          trees, [&](const TreeProfile& p) { return check_tree(p, opt); }, threads);
      write_report_csv(os, reports);
      for (const VerifyReport& r : reports)
        if (!r.all_pass()) return 1;
      return 0;
    }
    case Subcommand::Sweep: {
      const std::vector<TreeProfile> family = input_trees(cfg);
      const auto rows = cutoff_table(family, cfg.eps_grid, cfg.mixing_cap);
      write_cutoff_csv(os, rows, cfg.eps_grid);
      return 0;
    }
  }
  return 2;
}

}  // namespace detail

/// Dispatches a validated config; returns the process exit code
/// (0 success / all-pass, 1 verification failure, 2 input error).
inline int run(const RunConfig& cfg) {
  try {
    if (!cfg.out_path.empty()) {
      std::ofstream out(cfg.out_path);
      if (!out) throw UsageError("cannot open output file '" + cfg.out_path + "'");
      return detail::run_impl(cfg, out);
    }
    return detail::run_impl(cfg, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cutofflab
