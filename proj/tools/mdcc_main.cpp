// Command-line surface for channel analysis, exponent curves, finite-
// blocklength bound tables, moderate-deviations reports, code simulation and
// theorem-instance verification. All outputs are plain CSV/JSON files keyed
// only by the inputs and the seed, so reruns are byte-identical.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdcc/bounds.hpp"
#include "mdcc/capacity.hpp"
#include "mdcc/code_sim.hpp"
#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/exponents.hpp"
#include "mdcc/gallager.hpp"
#include "mdcc/io.hpp"
#include "mdcc/mdp.hpp"
#include "mdcc/measures.hpp"

namespace {

using nlohmann::json;
using namespace mdcc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitVerdictFailure = 3;

struct CommonOptions {
  std::string channel_path;
  std::string out_path;
  std::string format = "csv";
  double tol = 1e-9;
  double gamma = 0.1;
  std::string schedule = "1.0,0.3333333333333333";
  std::string n_grid = "1000,10000,100000,1000000";
  std::uint64_t seed = 0;
  int threads = 0;
};

std::vector<long> parse_n_grid(const std::string& text) {
  std::vector<long> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(std::stol(item));
  if (grid.empty()) throw DomainError("empty n grid");
  return grid;
}

RateSchedule parse_schedule(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw DomainError("schedule must be given as a,t");
  }
  const double a = std::stod(text.substr(0, comma));
  const double t = std::stod(text.substr(comma + 1));
  return make_schedule(a, t);
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_text_file(out_path, content);
  }
}

// Nearest integral composition of P with denominator n (largest remainders).
InputDistribution integral_type(const InputDistribution& p, long n) {
  const Index k = p.size();
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  std::vector<std::pair<double, Index>> remainders;
  long assigned = 0;
  for (Index x = 0; x < k; ++x) {
    const double exact = p.weights[x] * static_cast<double>(n);
    counts[static_cast<std::size_t>(x)] = static_cast<long>(std::floor(exact));
    assigned += counts[static_cast<std::size_t>(x)];
    remainders.push_back({exact - std::floor(exact), x});
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long i = 0; i < n - assigned; ++i) {
    ++counts[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
  }
  Vector type(k);
  for (Index x = 0; x < k; ++x) {
    type[x] = static_cast<double>(counts[static_cast<std::size_t>(x)]) / static_cast<double>(n);
  }
  return make_input_distribution(type);
}

int cmd_analyze(const CommonOptions& opt) {
  const ChannelFile file = load_channel_file(opt.channel_path);
  const Channel w = ingest_channel(file.matrix);
  const CapacityResult cap = capacity(w, opt.tol);
  const DispersionResult disp = channel_dispersion(w, cap);
  const double A = constant_A(w, 64, opt.seed);
  const ConverseConstants consts = make_converse_constants(A, opt.gamma);
  const ThirdDerivativeBound M = third_derivative_bound(w, 33, 64, opt.seed);

  json report;
  {
    json channel;
    json rows = json::array();
    for (Index r = 0; r < w.probabilities.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < w.probabilities.cols(); ++c) row.push_back(w.probabilities(r, c));
      rows.push_back(std::move(row));
    }
    channel["matrix"] = std::move(rows);
    channel["column_map"] = w.column_map;
    if (!file.labels_in.empty()) channel["labels_in"] = file.labels_in;
    if (!file.labels_out.empty()) {
      std::vector<std::string> kept;
      for (Index y : w.column_map) kept.push_back(file.labels_out[static_cast<std::size_t>(y)]);
      channel["labels_out"] = kept;
    }
    report["channel"] = std::move(channel);
  }
  report["C"] = cap.C;
  report["capacity_gap"] = cap.gap;
  report["capacity_iterations"] = cap.iterations;
  report["P_star"] = vector_to_json(cap.P_star.weights);
  report["Q_star"] = vector_to_json(cap.Q_star);
  report["admissible_inputs"] = cap.admissible_inputs;
  report["sigma_sq"] = disp.sigma_sq;
  report["P_tilde"] = vector_to_json(disp.minimizer.weights);
  report["per_letter_variance"] = vector_to_json(disp.per_letter_variance);
  report["dispersion_method"] = disp.method;
  report["A"] = consts.A;
  report["psi"] = consts.psi;
  report["gamma"] = consts.gamma;
  report["A_certified"] = consts.certified;
  report["M"] = M.M;
  report["M_certified"] = M.certified;

  if (disp.sigma_sq <= 1e-12) {
    report["warning"] = "zero-dispersion";
  } else {
    const CriticalRate cr = critical_rate(w);
    report["R_cr"] = cr.R_cr;
    report["R_inf"] = cr.R_inf;
    report["has_critical_rate"] = cr.has_critical_rate;
  }

  emit(opt.out_path, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_exponents(const CommonOptions& opt, const std::string& rates_text, int r_count) {
  const ChannelFile file = load_channel_file(opt.channel_path);
  const Channel w = ingest_channel(file.matrix);
  const CapacityResult cap = capacity(w, opt.tol);

  std::vector<double> rates;
  if (!rates_text.empty()) {
    std::stringstream ss(rates_text);
    std::string item;
    while (std::getline(ss, item, ',')) rates.push_back(std::stod(item));
  } else {
    for (int i = 1; i <= r_count; ++i) {
      rates.push_back(cap.C * static_cast<double>(i) / static_cast<double>(r_count));
    }
  }

  CsvWriter csv({"R", "E_r", "E_SP", "rho_star_r", "rho_star_sp", "finite_flag"});
  for (double rate : rates) {
    const ExponentPoint er = err_exponent(rate, w, opt.tol);
    const ExponentPoint esp = esp_exponent(rate, w, opt.tol);
    csv.add_row({CsvWriter::format(rate), CsvWriter::format(er.E_r),
                 CsvWriter::format(esp.esp_finite ? esp.E_SP : 0.0),
                 CsvWriter::format(er.rho_star_r), CsvWriter::format(esp.rho_star_sp),
                 esp.esp_finite ? "1" : "0"});
  }
  emit(opt.out_path, csv.str());
  return kExitOk;
}

int cmd_mdp(const CommonOptions& opt) {
  const ChannelFile file = load_channel_file(opt.channel_path);
  const Channel w = ingest_channel(file.matrix);
  const RateSchedule schedule = parse_schedule(opt.schedule);
  const MdpParameters params = make_mdp_parameters(w, schedule, opt.gamma, opt.seed, opt.tol);
  const std::vector<long> grid = parse_n_grid(opt.n_grid);
  const ConvergenceReport report = convergence_report(grid, params, w);

  CsvWriter csv({"n", "eps_n", "R_n", "upper_norm", "lower_norm", "taylor_env", "gap_upper",
                 "gap_lower", "applicable"});
  for (const ConvergenceRow& row : report.rows) {
    const char* applicable =
        row.lower_applicable ? "both" : (row.upper_applicable ? "upper" : "none");
    csv.add_row({CsvWriter::format(row.n), CsvWriter::format(row.eps_n),
                 CsvWriter::format(row.R_n), CsvWriter::format(row.upper_norm),
                 CsvWriter::format(row.lower_norm), CsvWriter::format(row.taylor_env),
                 CsvWriter::format(row.gap_upper), CsvWriter::format(row.gap_lower),
                 applicable});
  }
  emit(opt.out_path, csv.str());
  return kExitOk;
}

int cmd_bounds(const CommonOptions& opt, double eps_target) {
  const ChannelFile file = load_channel_file(opt.channel_path);
  const Channel w = ingest_channel(file.matrix);
  const RateSchedule schedule = parse_schedule(opt.schedule);
  const CapacityResult cap = capacity(w, opt.tol);
  const DispersionResult disp = channel_dispersion(w, cap);
  if (disp.sigma_sq <= 1e-12) {
    throw ZeroDispersion("bound table requires positive dispersion");
  }
  const ConverseConstants consts =
      make_converse_constants(constant_A(w, 64, opt.seed), opt.gamma);
  const std::vector<long> grid = parse_n_grid(opt.n_grid);
  const bool small_alphabet = w.input_size() <= 4 && w.output_size() <= 4;

  CsvWriter csv({"n", "R", "upper", "lower_com_a", "lower_com_b", "normal_rate",
                 "applicable_flag"});
  for (long n : grid) {
    const double eps_n = schedule.eps(n);
    const double rate = cap.C - eps_n;
    if (!(rate > 0.0)) {
      csv.add_row({CsvWriter::format(n), CsvWriter::format(rate), CsvWriter::format(1.0),
                   "nan", "nan", CsvWriter::format(normal_approx_rate(n, eps_target, cap.C,
                                                                      disp.sigma_sq)),
                   "0"});
      continue;
    }
    const double upper = gallager_upper(n, rate, w);
    const InputDistribution type = integral_type(disp.minimizer, n);
    const ComLowerResult lower =
        com_lower(n, rate, type, opt.gamma, consts, w, cap.C, small_alphabet);
    csv.add_row({CsvWriter::format(n), CsvWriter::format(rate), CsvWriter::format(upper),
                 CsvWriter::format(lower.form_a), CsvWriter::format(lower.form_b),
                 CsvWriter::format(normal_approx_rate(n, eps_target, cap.C, disp.sigma_sq)),
                 lower.applicable ? "1" : "0"});
  }
  emit(opt.out_path, csv.str());
  return kExitOk;
}

int cmd_simulate(const CommonOptions& opt, long trials, long m_cap) {
  const ChannelFile file = load_channel_file(opt.channel_path);
  const Channel w = ingest_channel(file.matrix);
  const RateSchedule schedule = parse_schedule(opt.schedule);
  const std::vector<long> grid = parse_n_grid(opt.n_grid);
  const auto rows = mdp_experiment(schedule, grid, m_cap, trials, opt.seed, w);

  CsvWriter csv({"n", "eps_n", "rate_target", "M", "capped", "rate_effective", "estimate",
                 "ci_low", "ci_high", "upper_bound"});
  for (const MdpExperimentRow& row : rows) {
    csv.add_row({CsvWriter::format(row.n), CsvWriter::format(row.eps_n),
                 CsvWriter::format(row.rate_target), CsvWriter::format(row.M),
                 row.capped ? "1" : "0", CsvWriter::format(row.rate_effective),
                 CsvWriter::format(row.estimate), CsvWriter::format(row.ci.low),
                 CsvWriter::format(row.ci.high), CsvWriter::format(row.upper_bound)});
  }
  emit(opt.out_path, csv.str());
  return kExitOk;
}

int cmd_verify(const CommonOptions& opt, int count) {
  const auto corpus = make_verification_corpus(count, opt.seed);
  json verdicts = json::array();
  bool any_failure = false;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const VerificationInstance& inst = corpus[i];
    const Decoder dec = ml_decoder(inst.cb, inst.W);
    const Lemma31Verdict lemma = verify_lemma31(inst.cb, dec, inst.V, inst.delta, inst.consts);
    json entry;
    entry["instance"] = i;
    entry["n"] = inst.cb.n;
    entry["M"] = inst.cb.M;
    entry["lemma31"] = {{"hypothesis_holds", lemma.hypothesis_holds},
                        {"pass", lemma.pass},
                        {"rate", lemma.rate},
                        {"delta", lemma.delta},
                        {"mutual_info", lemma.mutual_info},
                        {"e_bar", lemma.e_bar},
                        {"bound", lemma.bound},
                        {"chebyshev_lhs_max", lemma.chebyshev_lhs_max},
                        {"chebyshev_rhs", lemma.chebyshev_rhs}};
    if (!lemma.pass) any_failure = true;

    json eqs = json::array();
    for (long m = 0; m < inst.cb.M; ++m) {
      const Eq34Verdict eq = verify_eq34(inst.cb, dec, static_cast<int>(m), inst.V, inst.W);
      eqs.push_back({{"message", m},
                     {"pass", eq.pass},
                     {"degenerate", eq.degenerate},
                     {"lhs", eq.lhs},
                     {"rhs", eq.rhs},
                     {"margin", eq.margin}});
      if (!eq.degenerate && !eq.pass) any_failure = true;
    }
    entry["eq34"] = std::move(eqs);
    verdicts.push_back(std::move(entry));
  }
  json doc;
  doc["instances"] = static_cast<int>(corpus.size());
  doc["all_pass"] = !any_failure;
  doc["verdicts"] = std::move(verdicts);
  emit(opt.out_path, doc.dump(2) + "\n");
  return any_failure ? kExitVerdictFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-alphabet channel-coding asymptotics toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string rates_text;
  int r_count = 25;
  double eps_target = 0.1;
  long trials = 2000;
  long m_cap = 65536;
  int corpus_count = 100;

  const auto add_common = [&](CLI::App* sub, bool needs_seed) {
    sub->add_option("--channel", opt.channel_path, "channel JSON file")->required();
    sub->add_option("--tol", opt.tol, "numerical tolerance");
    sub->add_option("--gamma", opt.gamma, "converse parameter in (0, 1/2)");
    sub->add_option("--schedule", opt.schedule, "rate schedule a,t");
    sub->add_option("--n-grid", opt.n_grid, "comma-separated blocklengths");
    sub->add_option("--out", opt.out_path, "output file ('-' for stdout)");
    sub->add_option("--format", opt.format, "output format (csv or json)");
    sub->add_option("--threads", opt.threads, "worker cap (env MDCC_THREADS as fallback)");
    auto* seed = sub->add_option("--seed", opt.seed, "PRNG seed");
    if (needs_seed) seed->required();
  };

  CLI::App* analyze = app.add_subcommand("analyze", "scalar channel invariants as JSON");
  add_common(analyze, true);

  CLI::App* exponents = app.add_subcommand("exponents", "exponent curve CSV");
  add_common(exponents, false);
  exponents->add_option("--rates", rates_text, "explicit comma-separated rates in nats");
  exponents->add_option("--r-count", r_count, "grid size when --rates is absent");

  CLI::App* mdp = app.add_subcommand("mdp", "moderate-deviations convergence CSV");
  add_common(mdp, true);

  CLI::App* bounds = app.add_subcommand("bounds", "finite-blocklength bound table CSV");
  add_common(bounds, true);
  bounds->add_option("--eps", eps_target, "target error for the normal-approximation rate");

  CLI::App* simulate = app.add_subcommand("simulate", "random-coding experiment CSV");
  add_common(simulate, true);
  simulate->add_option("--trials", trials, "Monte Carlo trials per blocklength");
  simulate->add_option("--m-cap", m_cap, "message-count cap");

  CLI::App* verify = app.add_subcommand("verify", "theorem-instance verdicts as JSON");
  add_common(verify, true);
  verify->add_option("--count", corpus_count, "number of corpus instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (opt.threads > 0) mdcc::detail::set_thread_limit(opt.threads);

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(opt);
    if (app.got_subcommand(exponents)) return cmd_exponents(opt, rates_text, r_count);
    if (app.got_subcommand(mdp)) return cmd_mdp(opt);
    if (app.got_subcommand(bounds)) return cmd_bounds(opt, eps_target);
    if (app.got_subcommand(simulate)) return cmd_simulate(opt, trials, m_cap);
    if (app.got_subcommand(verify)) return cmd_verify(opt, corpus_count);
  } catch (const NoConvergence& e) {
    json err{{"type", "NoConvergence"}, {"error", e.what()}, {"best_gap", e.best_gap()}};
    std::cerr << err.dump() << "\n";
    return kExitNoConvergence;
  } catch (const Error& e) {
    json err{{"type", "InputError"}, {"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    json err{{"type", "InternalError"}, {"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
