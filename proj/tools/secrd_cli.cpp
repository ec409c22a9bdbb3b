// Batch front end: every subcommand reads its parameters (overridable from a
// JSON config file), runs one computation, and writes a deterministic CSV or
// JSON artifact. Reruns with identical flags are byte-identical.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "secrd/binning_sim.hpp"
#include "secrd/bsbcc.hpp"
#include "secrd/info_math.hpp"
#include "secrd/mmf_model.hpp"
#include "secrd/mmf_regions.hpp"
#include "secrd/outage_mc.hpp"
#include "secrd/rng.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt9(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

const char* regime_str(secrd::bsbcc::Regime r) {
  switch (r) {
    case secrd::bsbcc::Regime::kPlateau:
      return "plateau";
    case secrd::bsbcc::Regime::kTradeoff:
      return "tradeoff";
    default:
      return "infeasible";
  }
}

const char* regime_str(secrd::mmf::MmfRegime r) {
  switch (r) {
    case secrd::mmf::MmfRegime::kPlateau:
      return "plateau";
    case secrd::mmf::MmfRegime::kTradeoff:
      return "tradeoff";
    default:
      return "infeasible";
  }
}

// Values shared by all commands.
struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;  // empty = command default
};

void add_common(CLI::App* cmd, CommonOpts* c) {
  cmd->add_option("--seed", c->seed, "rng seed");
  cmd->add_option("--out", c->out, "output file path")->required();
  cmd->add_option("--format", c->format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

// ---- command handlers ----

struct BsbccArgs {
  double p = 0.3, p1 = 0.1, p2 = 0.2;
  double rate_min = 0.01, rate_max = 0.65;
  int steps = 200;
  CommonOpts common;
};

int run_bsbcc_curve(const BsbccArgs& a) {
  secrd::bsbcc::BsbccParams params{a.p, a.p1, a.p2};
  params.validate();
  std::vector<double> grid;
  for (int i = 0; i < a.steps; ++i) {
    grid.push_back(a.steps == 1 ? a.rate_min
                                : a.rate_min + (a.rate_max - a.rate_min) * i /
                                                   (a.steps - 1));
  }
  const auto curve = secrd::bsbcc::curve(params, grid);
  const double kink = secrd::bsbcc::rate_kink(params);
  const double rmax = secrd::bsbcc::rate_max(params);

  std::ostringstream cfg;
  cfg << "command=bsbcc-curve p=" << fmt9(a.p) << " p1=" << fmt9(a.p1)
      << " p2=" << fmt9(a.p2) << " rate_min=" << fmt9(a.rate_min)
      << " rate_max=" << fmt9(a.rate_max) << " steps=" << a.steps
      << " seed=" << a.common.seed;

  if (a.common.format == "json") {
    ordered_json j;
    j["command"] = "bsbcc-curve";
    j["p"] = a.p;
    j["p1"] = a.p1;
    j["p2"] = a.p2;
    j["rate_min"] = a.rate_min;
    j["rate_max"] = a.rate_max;
    j["steps"] = a.steps;
    j["seed"] = a.common.seed;
    j["boundary_rate_kink"] = kink;
    j["boundary_rate_max"] = rmax;
    ordered_json pts = ordered_json::array();
    for (const auto& pt : curve) {
      ordered_json row;
      row["rate"] = pt.rate;
      row["d_no_causal"] =
          std::isnan(pt.d_no_causal) ? ordered_json() : ordered_json(pt.d_no_causal);
      row["d_causal"] =
          std::isnan(pt.d_causal) ? ordered_json() : ordered_json(pt.d_causal);
      row["gamma"] = std::isnan(pt.gamma) ? ordered_json() : ordered_json(pt.gamma);
      row["alpha_prime"] =
          std::isnan(pt.alpha) ? ordered_json() : ordered_json(pt.alpha);
      row["regime"] = regime_str(pt.causal_regime);
      pts.push_back(row);
    }
    j["points"] = pts;
    write_json(a.common.out, j);
    return 0;
  }

  std::ostringstream os;
  os << "# " << cfg.str() << " format=csv\n";
  os << "# boundary_rate_kink=" << fmt9(kink) << "\n";
  os << "# boundary_rate_max=" << fmt9(rmax) << "\n";
  os << "rate,d_no_causal,d_causal,gamma,alpha_prime,regime\n";
  for (const auto& pt : curve) {
    os << fmt9(pt.rate) << ',' << fmt9(pt.d_no_causal) << ','
       << fmt9(pt.d_causal) << ',' << fmt9(pt.gamma) << ',' << fmt9(pt.alpha)
       << ',' << regime_str(pt.causal_regime) << "\n";
  }
  write_file(a.common.out, os.str());
  return 0;
}

struct MmfCurveArgs {
  int M = 4;
  double snr_db = 20.0, snre_db = 10.0, mdl_db = 20.0;
  double p = 0.3;
  int steps = 60;
  CommonOpts common;
};

int run_mmf_curve(const MmfCurveArgs& a) {
  secrd::mmf::MmfParams params{a.M, a.snr_db, a.snre_db, a.mdl_db};
  params.validate();
  secrd::SeededRng rng(a.common.seed, 0);
  const auto realization = secrd::mmf::sample_realization(params, rng);
  const double entropy = secrd::binary_entropy(a.p);
  const double delta = std::min(a.p, 1.0 - a.p);
  const double rate_feasible =
      a.M * std::log2(1.0 + params.snr()) / entropy;
  std::vector<double> grid;
  for (int i = 1; i <= a.steps; ++i) {
    grid.push_back(rate_feasible * i / a.steps);
  }
  const auto curve =
      secrd::mmf::causal_curve(params, realization, a.p, grid);
  const auto mr = secrd::mmf::max_rs(params, realization);
  const bool cond =
      secrd::mmf::check_secrecy_condition(params, realization.mdl);

  std::ostringstream cfg;
  cfg << "command=mmf-curve M=" << a.M << " snr_db=" << fmt9(a.snr_db)
      << " snre_db=" << fmt9(a.snre_db) << " mdl_db=" << fmt9(a.mdl_db)
      << " p=" << fmt9(a.p) << " steps=" << a.steps
      << " seed=" << a.common.seed;

  if (a.common.format == "json") {
    ordered_json j;
    j["command"] = "mmf-curve";
    j["M"] = a.M;
    j["snr_db"] = a.snr_db;
    j["snre_db"] = a.snre_db;
    j["mdl_db"] = a.mdl_db;
    j["p"] = a.p;
    j["steps"] = a.steps;
    j["seed"] = a.common.seed;
    j["rs_star"] = mr.rs_star;
    j["boundary_rate_plateau"] = mr.rs_star / entropy;
    j["boundary_rate_feasible"] = rate_feasible;
    j["secrecy_condition"] = cond;
    if (cond) j["no_causal_plateau_distortion"] = delta;
    ordered_json pts = ordered_json::array();
    for (const auto& pt : curve) {
      ordered_json row;
      row["rate"] = pt.rate;
      row["distortion"] =
          std::isnan(pt.distortion) ? ordered_json() : ordered_json(pt.distortion);
      row["regime"] = regime_str(pt.regime);
      row["alpha_bar"] =
          std::isnan(pt.alpha_bar) ? ordered_json() : ordered_json(pt.alpha_bar);
      row["rs"] = std::isnan(pt.rs) ? ordered_json() : ordered_json(pt.rs);
      row["rp"] = std::isnan(pt.rp) ? ordered_json() : ordered_json(pt.rp);
      row["lambdas"] = pt.lambdas;
      pts.push_back(row);
    }
    j["points"] = pts;
    write_json(a.common.out, j);
    return 0;
  }

  std::ostringstream os;
  os << "# " << cfg.str() << " format=csv\n";
  os << "# rs_star=" << fmt9(mr.rs_star) << "\n";
  os << "# boundary_rate_plateau=" << fmt9(mr.rs_star / entropy) << "\n";
  os << "# boundary_rate_feasible=" << fmt9(rate_feasible) << "\n";
  if (cond) {
    os << "# no_causal_plateau_distortion=" << fmt9(delta) << "\n";
  } else {
    os << "# warning: secrecy condition fails; no-causal plateau not "
          "guaranteed\n";
  }
  os << "rate,distortion,regime,alpha_bar,rs,rp";
  for (int i = 1; i <= a.M; ++i) os << ",lambda_" << i;
  os << "\n";
  for (const auto& pt : curve) {
    os << fmt9(pt.rate) << ',' << fmt9(pt.distortion) << ','
       << regime_str(pt.regime) << ',' << fmt9(pt.alpha_bar) << ','
       << fmt9(pt.rs) << ',' << fmt9(pt.rp);
    for (int i = 0; i < a.M; ++i) {
      os << ','
         << (i < static_cast<int>(pt.lambdas.size()) ? fmt9(pt.lambdas[i])
                                                     : "nan");
    }
    os << "\n";
  }
  write_file(a.common.out, os.str());
  return 0;
}

struct MmfCapacityArgs {
  int M = 4;
  double snr_db = 20.0, snre_db = 10.0, mdl_db = 20.0;
  double p = 0.3;
  CommonOpts common;
};

int run_mmf_capacity(const MmfCapacityArgs& a) {
  secrd::mmf::MmfParams params{a.M, a.snr_db, a.snre_db, a.mdl_db};
  params.validate();
  secrd::SeededRng rng(a.common.seed, 0);
  const auto mdl = a.M == 1
                       ? secrd::mmf::MdlSpectrum{{1.0}}
                       : secrd::mmf::sample_mdl(a.M, a.mdl_db, rng);
  const double entropy = secrd::binary_entropy(a.p);
  const double delta = std::min(a.p, 1.0 - a.p);
  const bool cond = secrd::mmf::check_secrecy_condition(params, mdl);
  ordered_json j;
  j["command"] = "mmf-capacity";
  j["M"] = a.M;
  j["snr_db"] = a.snr_db;
  j["snre_db"] = a.snre_db;
  j["mdl_db"] = a.mdl_db;
  j["p"] = a.p;
  j["seed"] = a.common.seed;
  j["secrecy_condition"] = cond;
  j["phi_bar"] = mdl.phi_bar;
  if (cond) {
    const auto region =
        secrd::mmf::no_causal_region(params, mdl, entropy, delta);
    j["rate_bound"] = region.rate_bound;
    j["distortion"] = region.distortion;
  }
  write_json(a.common.out, j);
  return 0;
}

struct OutageArgs {
  int M = 4;
  double snr_db = 20.0, snre_db = 10.0, mdl_db = 20.0;
  double p = 0.3;
  double rs_prime = 0.1, rate = 5.0, alpha = 0.5;
  std::uint64_t trials = 10000;
  int threads = 1;
  CommonOpts common;
};

int run_outage(const OutageArgs& a) {
  secrd::mmf::MmfParams params{a.M, a.snr_db, a.snre_db, a.mdl_db};
  params.validate();
  const double entropy = secrd::binary_entropy(a.p);
  secrd::mmf::OutageQuery query{a.rs_prime, a.rate, a.alpha, a.trials,
                                a.common.seed};
  const auto est =
      secrd::mmf::estimate_outage(params, query, entropy, a.threads);
  ordered_json j;
  j["p_out"] = est.p_out;
  j["stderr"] = est.std_err;
  j["trials"] = est.trials_used;
  j["params"] = {{"M", a.M},
                 {"snr_db", a.snr_db},
                 {"snre_db", a.snre_db},
                 {"mdl_db", a.mdl_db},
                 {"p", a.p}};
  j["query"] = {
      {"rs_prime", a.rs_prime}, {"rate", a.rate}, {"alpha", a.alpha}};
  j["seed"] = a.common.seed;
  write_json(a.common.out, j);
  return 0;
}

struct BinningArgs {
  int k = 12;
  double p = 0.3;
  double rs_prime = 0.2;
  double epsilon = 0.15;
  std::string dump_codebook_path;
  CommonOpts common;
};

int run_binning(const BinningArgs& a) {
  secrd::binning::BinningConfig config{a.k, a.p, a.rs_prime, a.epsilon,
                                       a.common.seed};
  const auto res = secrd::binning::run(config);
  if (!a.dump_codebook_path.empty()) {
    const auto cb = secrd::binning::build_codebook(config);
    std::ostringstream os;
    secrd::binning::dump_codebook(cb, os);
    write_file(a.dump_codebook_path, os.str());
  }
  ordered_json j;
  j["k"] = a.k;
  j["p"] = a.p;
  j["rs_prime"] = a.rs_prime;
  j["epsilon"] = a.epsilon;
  j["seed"] = a.common.seed;
  j["eve_distortion"] = res.eve_distortion;
  j["bob_error"] = res.bob_error;
  j["bins"] = res.bin_count;
  j["leftover_mass"] = res.leftover_mass;
  write_json(a.common.out, j);
  return 0;
}

struct LemmaArgs {
  int trials = 1000;
  std::vector<int> alphabet_sizes = {2, 3, 4, 8};
  CommonOpts common;
};

int run_lemma_check(const LemmaArgs& a) {
  secrd::SeededRng rng(a.common.seed, 0);
  int checked = 0, vacuous = 0;
  bool all_hold = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < a.trials; ++t) {
    const int ms = a.alphabet_sizes[rng.bounded(a.alphabet_sizes.size())];
    const int nz = a.alphabet_sizes[rng.bounded(a.alphabet_sizes.size())];
    std::vector<double> qz(nz);
    double qs = 0.0;
    for (double& v : qz) {
      v = 0.05 + rng.uniform();
      qs += v;
    }
    for (double& v : qz) v /= qs;
    // Rows perturbed multiplicatively, then renormalized to 1/ms each, so
    // the M_s marginal is uniform by construction.
    std::vector<double> m(ms * nz);
    for (int r = 0; r < ms; ++r) {
      double rs = 0.0;
      for (int c = 0; c < nz; ++c) {
        m[r * nz + c] = qz[c] * (1.0 + 0.8 * (rng.uniform() - 0.5));
        rs += m[r * nz + c];
      }
      for (int c = 0; c < nz; ++c) m[r * nz + c] /= rs * ms;
    }
    const secrd::JointDistribution joint(ms, nz, m);
    const auto chk = secrd::lemma_tv_mi_check(joint);
    if (!chk.applicable) {
      ++vacuous;
      continue;
    }
    ++checked;
    all_hold = all_hold && chk.holds;
    worst_margin = std::min(worst_margin, chk.bound - chk.mi);
  }
  ordered_json j;
  j["command"] = "lemma-check";
  j["trials"] = a.trials;
  j["alphabet_sizes"] = a.alphabet_sizes;
  j["seed"] = a.common.seed;
  j["checked"] = checked;
  j["vacuous"] = vacuous;
  j["all_hold"] = all_hold;
  j["worst_margin"] = worst_margin;
  write_json(a.common.out, j);
  return all_hold ? 0 : 1;
}

struct HaarArgs {
  int M = 4;
  std::uint64_t draws = 100000;
  CommonOpts common;
};

int run_haar_test(const HaarArgs& a) {
  secrd::SeededRng rng(a.common.seed, 0);
  double max_err = 0.0;
  double mean_sq = 0.0;
  for (std::uint64_t d = 0; d < a.draws; ++d) {
    const Eigen::MatrixXcd u = secrd::mmf::sample_haar_unitary(a.M, rng);
    const double err =
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(a.M, a.M))
            .cwiseAbs()
            .maxCoeff();
    max_err = std::max(max_err, err);
    mean_sq += std::norm(u(0, 0));
  }
  mean_sq /= static_cast<double>(a.draws);
  const double expected = 1.0 / a.M;
  const bool unitary_ok = max_err <= 1e-10;
  const bool mean_ok = std::abs(mean_sq - expected) <= 0.01;
  ordered_json j;
  j["command"] = "haar-test";
  j["M"] = a.M;
  j["draws"] = a.draws;
  j["seed"] = a.common.seed;
  j["max_unitarity_error"] = max_err;
  j["mean_abs_u11_sq"] = mean_sq;
  j["expected_mean"] = expected;
  j["unitarity_pass"] = unitary_ok;
  j["mean_pass"] = mean_ok;
  j["pass"] = unitary_ok && mean_ok;
  write_json(a.common.out, j);
  return (unitary_ok && mean_ok) ? 0 : 1;
}

// ---- config file merging ----

const std::set<std::string>& allowed_keys(const std::string& command) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"bsbcc-curve", {"p", "p1", "p2", "rate_min", "rate_max", "steps"}},
      {"mmf-curve", {"M", "snr_db", "snre_db", "mdl_db", "p", "steps"}},
      {"mmf-capacity", {"M", "snr_db", "snre_db", "mdl_db", "p"}},
      {"outage",
       {"M", "snr_db", "snre_db", "mdl_db", "p", "rs_prime", "rate", "alpha",
        "trials", "threads"}},
      {"binning-sim", {"k", "p", "rs_prime", "epsilon", "dump_codebook"}},
      {"lemma-check", {"trials", "alphabet_sizes"}},
      {"haar-test", {"M", "draws"}},
  };
  const auto it = table.find(command);
  if (it == table.end()) {
    throw std::runtime_error("unknown command in config: " + command);
  }
  return it->second;
}

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned())
    return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return fmt_full(v.get<double>());
  throw std::runtime_error("unsupported config value type");
}

// Expands --config into an equivalent flag list. Config values fill only the
// keys not already given as explicit flags, so explicit flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& raw) {
  std::string config_path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == "--config") {
      if (i + 1 >= raw.size()) {
        throw std::runtime_error("--config needs a path");
      }
      config_path = raw[++i];
    } else if (raw[i].rfind("--config=", 0) == 0) {
      config_path = raw[i].substr(9);
    } else {
      rest.push_back(raw[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream is(config_path);
  if (!is) throw std::runtime_error("cannot read config: " + config_path);
  json cfg = json::parse(is);

  static const std::set<std::string> commands = {
      "bsbcc-curve", "mmf-curve", "mmf-capacity", "outage",
      "binning-sim", "lemma-check", "haar-test"};
  std::string argv_command;
  std::set<std::string> explicit_keys;
  for (const std::string& tok : rest) {
    if (commands.count(tok) && argv_command.empty()) {
      argv_command = tok;
    } else if (tok.rfind("--", 0) == 0) {
      std::string key = tok.substr(2);
      const auto eq = key.find('=');
      if (eq != std::string::npos) key = key.substr(0, eq);
      explicit_keys.insert(key);
    }
  }
  std::string command = argv_command;
  if (cfg.contains("command")) {
    const std::string cc = cfg["command"].get<std::string>();
    if (!command.empty() && command != cc) {
      throw std::runtime_error("config command '" + cc +
                               "' conflicts with '" + command + "'");
    }
    command = cc;
  }
  if (command.empty()) {
    throw std::runtime_error("no command given (flag or config)");
  }

  std::vector<std::string> out;
  out.push_back(command);
  if (cfg.contains("parameters")) {
    const auto& keys = allowed_keys(command);
    for (const auto& [key, value] : cfg["parameters"].items()) {
      if (!keys.count(key)) {
        throw std::runtime_error("unknown parameter '" + key +
                                 "' for command " + command);
      }
      if (explicit_keys.count(key)) continue;
      out.push_back("--" + key);
      if (value.is_array()) {
        std::string joined;
        for (const auto& el : value) {
          if (!joined.empty()) joined += ",";
          joined += json_scalar_to_string(el);
        }
        out.push_back(joined);
      } else {
        out.push_back(json_scalar_to_string(value));
      }
    }
  }
  if (cfg.contains("seed") && !explicit_keys.count("seed")) {
    out.push_back("--seed");
    out.push_back(json_scalar_to_string(cfg["seed"]));
  }
  if (cfg.contains("output_path") && !explicit_keys.count("out")) {
    out.push_back("--out");
    out.push_back(cfg["output_path"].get<std::string>());
  }
  if (cfg.contains("format") && !explicit_keys.count("format")) {
    out.push_back("--format");
    out.push_back(cfg["format"].get<std::string>());
  }
  bool skipped_command = false;
  for (const std::string& tok : rest) {
    if (!skipped_command && tok == argv_command) {
      skipped_command = true;
      continue;  // command already placed first
    }
    out.push_back(tok);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secrecy rate-distortion toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");

  BsbccArgs bs;
  CLI::App* c_bs = app.add_subcommand("bsbcc-curve",
                                      "distortion-rate curves for the binary "
                                      "symmetric broadcast channel");
  c_bs->add_option("--p", bs.p, "source bias");
  c_bs->add_option("--p1", bs.p1, "legitimate crossover");
  c_bs->add_option("--p2", bs.p2, "eavesdropper crossover");
  c_bs->add_option("--rate_min", bs.rate_min)->check(CLI::PositiveNumber);
  c_bs->add_option("--rate_max", bs.rate_max)->check(CLI::PositiveNumber);
  c_bs->add_option("--steps", bs.steps)->check(CLI::PositiveNumber);
  add_common(c_bs, &bs.common);

  MmfCurveArgs mc;
  CLI::App* c_mc = app.add_subcommand(
      "mmf-curve", "causal-disclosure distortion curve for one fiber draw");
  c_mc->add_option("--M", mc.M)->check(CLI::PositiveNumber);
  c_mc->add_option("--snr_db", mc.snr_db);
  c_mc->add_option("--snre_db", mc.snre_db);
  c_mc->add_option("--mdl_db", mc.mdl_db)->check(CLI::NonNegativeNumber);
  c_mc->add_option("--p", mc.p);
  c_mc->add_option("--steps", mc.steps)->check(CLI::PositiveNumber);
  add_common(c_mc, &mc.common);

  MmfCapacityArgs mcap;
  CLI::App* c_cap = app.add_subcommand(
      "mmf-capacity", "no-causal-information secrecy region summary");
  c_cap->add_option("--M", mcap.M)->check(CLI::PositiveNumber);
  c_cap->add_option("--snr_db", mcap.snr_db);
  c_cap->add_option("--snre_db", mcap.snre_db);
  c_cap->add_option("--mdl_db", mcap.mdl_db)->check(CLI::NonNegativeNumber);
  c_cap->add_option("--p", mcap.p);
  add_common(c_cap, &mcap.common);

  OutageArgs oa;
  CLI::App* c_out = app.add_subcommand("outage",
                                       "secrecy outage probability over "
                                       "random channel draws");
  c_out->add_option("--M", oa.M)->check(CLI::PositiveNumber);
  c_out->add_option("--snr_db", oa.snr_db);
  c_out->add_option("--snre_db", oa.snre_db);
  c_out->add_option("--mdl_db", oa.mdl_db)->check(CLI::NonNegativeNumber);
  c_out->add_option("--p", oa.p);
  c_out->add_option("--rs_prime", oa.rs_prime)->check(CLI::NonNegativeNumber);
  c_out->add_option("--rate", oa.rate)->check(CLI::PositiveNumber);
  c_out->add_option("--alpha", oa.alpha)->check(CLI::Range(0.0, 1.0));
  c_out->add_option("--trials", oa.trials)->check(CLI::PositiveNumber);
  c_out->add_option("--threads", oa.threads)->check(CLI::PositiveNumber);
  add_common(c_out, &oa.common);

  BinningArgs ba;
  CLI::App* c_bin = app.add_subcommand(
      "binning-sim", "exact typical-set binning simulation");
  c_bin->add_option("--k", ba.k)->check(CLI::Range(1, 24));
  c_bin->add_option("--p", ba.p);
  c_bin->add_option("--rs_prime", ba.rs_prime)->check(CLI::PositiveNumber);
  c_bin->add_option("--epsilon", ba.epsilon)->check(CLI::PositiveNumber);
  c_bin->add_option("--dump_codebook", ba.dump_codebook_path,
                    "also dump the codebook as text");
  add_common(c_bin, &ba.common);

  LemmaArgs la;
  CLI::App* c_lem = app.add_subcommand(
      "lemma-check", "verify the leakage bound on random uniform-row joints");
  c_lem->add_option("--trials", la.trials)->check(CLI::PositiveNumber);
  c_lem->add_option("--alphabet_sizes", la.alphabet_sizes)
      ->delimiter(',')
      ->check(CLI::Range(2, 64));
  add_common(c_lem, &la.common);

  HaarArgs ha;
  CLI::App* c_haar = app.add_subcommand(
      "haar-test", "unitarity and first-moment checks of the unitary sampler");
  c_haar->add_option("--M", ha.M)->check(CLI::PositiveNumber);
  c_haar->add_option("--draws", ha.draws)->check(CLI::PositiveNumber);
  add_common(c_haar, &ha.common);

  try {
    std::vector<std::string> raw(argv + 1, argv + argc);
    const std::vector<std::string> merged = merge_config(raw);
    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const std::string& s : merged) cargv.push_back(s.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());

    if (c_bs->parsed()) return run_bsbcc_curve(bs);
    if (c_mc->parsed()) return run_mmf_curve(mc);
    if (c_cap->parsed()) return run_mmf_capacity(mcap);
    if (c_out->parsed()) return run_outage(oa);
    if (c_bin->parsed()) return run_binning(ba);
    if (c_lem->parsed()) return run_lemma_check(la);
    if (c_haar->parsed()) return run_haar_test(ha);
    throw std::runtime_error("no command selected");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
