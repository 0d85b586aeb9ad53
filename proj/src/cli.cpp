#include "satisrank/cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "satisrank/batch_solver.hpp"
#include "satisrank/data_io.hpp"
#include "satisrank/error.hpp"
#include "satisrank/online_solver.hpp"
#include "satisrank/parallel.hpp"
#include "satisrank/ranking.hpp"
#include "satisrank/validation.hpp"

namespace satisrank {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr int kCheckpointVersion = 1;

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_logger_st("satisrank");
    l->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("SATISRANK_LOG")) level = spdlog::level::from_str(env);
    l->set_level(level);
    return l;
  }();
  return log;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json spec_json(const DivergenceSpec& spec) {
  return json{{"kind", kind_name(spec.kind)}, {"theta", spec.theta}};
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = command_name(c.command);
  j["divergence"] = spec_json(c.divergence);
  j["scaling"] = scaling_name(c.scaling);
  j["epsilon"] = c.epsilon;
  j["seed"] = c.seed;
  j["out"] = c.output_path;
  auto opt = [&j](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  opt("input", c.input);
  opt("stream", c.stream);
  opt("dist", c.dist);
  opt("params", c.params_file);
  if (!c.tau.empty()) j["tau"] = c.tau;
  opt("n", c.n);
  opt("items", c.items);
  opt("iters", c.iters);
  switch (c.command) {
    case Command::Batch:
      j["threshold_tau"] = c.threshold_tau;
      break;
    case Command::Online:
      j["literal_steps"] = c.literal_steps;
      j["history_points"] = c.history_points;
      break;
    case Command::Bounds:
      j["delta"] = c.delta;
      j["gamma"] = c.gamma;
      j["groups"] = c.groups;
      opt("group_size", c.group_size);
      j["resample_factor"] = c.resample_factor;
      j["threshold_tau"] = c.threshold_tau;
      j["literal_sup"] = c.literal_sup;
      opt("big_m", c.big_m);
      break;
    case Command::RankProb:
      j["mode"] = c.mode;
      opt("e", c.e);
      opt("c", c.gap_c);
      opt("kappa", c.kappa);
      opt("n1", c.n1);
      opt("n2", c.n2);
      j["literal_binomial"] = c.literal_binomial;
      break;
    case Command::SampleSize:
    case Command::Simulate:
      break;
  }
  return j;
}

json ranking_json(const RankingReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"item_id", e.item_id}, {"index", e.index}, {"rank", e.rank}});
  }
  json j{{"entries", entries}, {"ties", r.ties}};
  if (r.reference) j["reference"] = *r.reference;
  if (r.inversion_loss) j["inversion_loss"] = *r.inversion_loss;
  if (r.validity) j["validity"] = *r.validity;
  return j;
}

json solution_json(const BatchSolution& s) {
  return json{{"item_id", s.item_id},
              {"alpha_star", s.alpha_star},
              {"index", s.index},
              {"eta_star", s.eta_star},
              {"feasible_at_alpha_star", s.feasible_at_alpha_star},
              {"bisection_steps", s.bisection_steps},
              {"failed_probes", s.failed_probes}};
}

json state_json(const OnlineState& s) {
  return json{{"checkpoint_version", kCheckpointVersion},
              {"alpha", s.alpha},
              {"eta", s.eta},
              {"lambda", s.lambda},
              {"r", s.r},
              {"t", s.t},
              {"tau", s.tau},
              {"divergence", spec_json(s.spec)},
              {"scaling", scaling_name(s.scaling)}};
}

json upper_json(const UpperBoundReport& u) {
  return json{{"alpha_tilde", u.alpha_tilde}, {"q_tilde", u.q_tilde},
              {"s_q", u.s_q},                 {"z_delta", u.z_delta},
              {"accepted", u.accepted},       {"confidence", u.confidence},
              {"bound", u.bound},             {"side", side_name(u.side)},
              {"threshold", u.threshold},     {"rounds", u.rounds}};
}

json lower_json(const LowerBoundReport& l) {
  return json{{"l_tilde", l.l_tilde},       {"s_l", l.s_l},
              {"z", l.z},                   {"bound", l.bound},
              {"confidence", l.confidence}, {"side", side_name(l.side)},
              {"group_values", l.group_values}};
}

json params_json(const BoundParams& p) {
  return json{{"sigma2", p.sigma2},     {"psi_bar", p.psi_bar},
              {"phi_bar", p.phi_bar},   {"diameter", p.diameter},
              {"lipschitz_pi", p.lipschitz_pi}, {"tau_gap", p.tau_gap},
              {"gap_c", p.gap_c},       {"big_m", p.big_m},
              {"beta", p.beta},         {"gamma", p.gamma},
              {"delta", p.delta},       {"epsilon", p.epsilon},
              {"m_groups", p.m_groups}};
}

template <class T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw ConfigError("cli", std::string("missing required option ") + flag);
  return *v;
}

/// Targets for `count` synthetic items: one value per item, or one value
/// broadcast to all.
std::vector<double> resolve_targets(const RunConfig& c, int count) {
  if (c.tau.empty()) throw ConfigError("cli", "--tau is required with this data source");
  if (c.tau.size() == 1) return std::vector<double>(static_cast<std::size_t>(count), c.tau[0]);
  if (static_cast<int>(c.tau.size()) != count) {
    throw ConfigError("cli", "--tau lists " + std::to_string(c.tau.size()) + " targets for " +
                                 std::to_string(count) + " items");
  }
  return c.tau;
}

int synthetic_item_count(const RunConfig& c) {
  const int items = c.items.value_or(c.tau.empty() ? 1 : static_cast<int>(c.tau.size()));
  if (items < 1) throw ConfigError("cli", "--items must be at least 1");
  return items;
}

std::string synthetic_id(int k) { return "item" + std::to_string(k + 1); }

struct Items {
  std::vector<ItemBatch> batches;
  std::optional<DistributionSpec> dist;  // set for synthetic items
};

Items load_items(const RunConfig& c) {
  Items out;
  if (c.input && c.dist) throw ConfigError("cli", "give either --input or --dist, not both");
  if (c.input) {
    out.batches = load_batches(*c.input);
    return out;
  }
  if (!c.dist) throw ConfigError("cli", "one of --input or --dist is required");
  out.dist = parse_distribution(*c.dist);
  const std::int64_t n = c.n.value_or(1000);
  const int items = synthetic_item_count(c);
  const std::vector<double> taus = resolve_targets(c, items);
  for (int k = 0; k < items; ++k) {
    const auto seed = derive_seed(out.dist->seed, static_cast<std::uint64_t>(k));
    out.batches.push_back(
        ItemBatch{synthetic_id(k), generate_synthetic(with_seed(*out.dist, seed), n), taus[k]});
  }
  return out;
}

/// Reference order for items drawn from one distribution with distinct
/// targets. Under 1/alpha the index grows with the target (a higher
/// aspiration level is easier to meet); under 1/(1 - alpha) it shrinks.
void attach_reference(RankingReport& report, const std::vector<std::string>& ids,
                      const std::vector<double>& targets, RegretScaling scaling) {
  std::vector<double> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;
  const double sign = scaling == RegretScaling::InverseAlpha ? 1.0 : -1.0;
  std::vector<Score> truth;
  for (std::size_t i = 0; i < ids.size(); ++i) truth.emplace_back(ids[i], sign * targets[i]);
  std::vector<Score> ordered = truth;
  std::sort(ordered.begin(), ordered.end(),
            [](const Score& a, const Score& b) { return a.second > b.second; });
  std::vector<std::string> reference;
  for (const auto& [id, score] : ordered) reference.push_back(id);
  std::vector<Score> estimated;
  for (const auto& e : report.entries) estimated.emplace_back(e.item_id, e.index);
  report.reference = reference;
  report.inversion_loss = inversion_loss(estimated, truth);
}

fs::path sidecar(const RunConfig& c, const char* suffix) {
  fs::path p(c.output_path);
  p.replace_extension(suffix);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cli", "cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ArgumentError("cli", "write to '" + path.string() + "' failed");
}

std::string ranking_csv(const RankingReport& r) {
  std::ostringstream os;
  os << "item_id,index,rank\n";
  for (const auto& e : r.entries) os << e.item_id << ',' << format_double(e.index) << ',' << e.rank << '\n';
  return os.str();
}

BatchOptions batch_options(const RunConfig& c) {
  BatchOptions o;
  o.epsilon = c.epsilon;
  o.threshold_is_target = c.threshold_tau;
  return o;
}

json run_batch(const RunConfig& c, json& artifacts) {
  const Items items = load_items(c);
  logger()->info("batch: {} items", items.batches.size());
  BatchRanking br = rank_batch(items.batches, c.divergence, c.scaling, batch_options(c));
  if (items.dist) {
    std::vector<std::string> ids;
    std::vector<double> targets;
    for (const auto& b : items.batches) {
      ids.push_back(b.item_id);
      targets.push_back(b.target);
    }
    attach_reference(br.report, ids, targets, c.scaling);
  }
  json sols = json::array();
  for (const auto& s : br.solutions) sols.push_back(solution_json(s));
  if (!c.output_path.empty()) {
    const fs::path csv = sidecar(c, ".ranking.csv");
    write_text(csv, ranking_csv(br.report));
    artifacts.push_back(csv.string());
  }
  return json{{"ranking", ranking_json(br.report)}, {"items", sols}};
}

json run_online_command(const RunConfig& c, json& artifacts) {
  if (c.stream && c.dist) throw ConfigError("cli", "give either --stream or --dist, not both");
  std::vector<std::string> ids;
  std::vector<std::unique_ptr<ObservationSource>> sources;
  if (c.stream) {
    for (auto& [id, values] : read_stream_by_item(*c.stream)) {
      ids.push_back(id);
      sources.push_back(std::make_unique<VectorSource>(std::move(values)));
    }
  } else if (c.dist) {
    const DistributionSpec dist = parse_distribution(*c.dist);
    const int items = synthetic_item_count(c);
    for (int k = 0; k < items; ++k) {
      ids.push_back(synthetic_id(k));
      const auto seed = derive_seed(dist.seed, static_cast<std::uint64_t>(k));
      sources.push_back(std::make_unique<GeneratorSource>(with_seed(dist, seed)));
    }
  } else {
    throw ConfigError("cli", "one of --stream or --dist is required");
  }
  const std::vector<double> taus = resolve_targets(c, static_cast<int>(ids.size()));
  const std::int64_t iters = c.iters.value_or(5000);
  OnlineSettings settings = c.literal_steps ? OnlineSettings::literal() : OnlineSettings{};
  settings.history_points = c.history_points;

  std::vector<OnlineResult> results(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    results[k] = run_online(*sources[k], iters, taus[k], c.divergence, c.scaling, settings);
  });

  std::vector<Score> scores;
  json per_item = json::array();
  std::ostringstream trace;
  trace << "item_id,t,r,index\n";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const OnlineResult& r = results[k];
    if (r.exhausted) logger()->warn("stream for '{}' ended after {} steps", ids[k], r.final_state.t);
    scores.emplace_back(ids[k], r.index_estimate);
    per_item.push_back({{"item_id", ids[k]},
                        {"index_estimate", r.index_estimate},
                        {"state_index", r.state_index},
                        {"exhausted", r.exhausted},
                        {"steps", r.final_state.t},
                        {"step_rule",
                         {{"gain", r.rule.gain},
                          {"offset", r.rule.offset},
                          {"eta_factor", r.rule.eta_factor},
                          {"lambda_factor", r.rule.lambda_factor},
                          {"eta_box", {r.rule.eta_box.lower, r.rule.eta_box.upper}}}},
                        {"final_state", state_json(r.final_state)}});
    for (std::size_t i = 0; i < r.history_t.size(); ++i) {
      trace << ids[k] << ',' << r.history_t[i] << ',' << format_double(r.r_history[i]) << ','
            << format_double(index_from_value(c.scaling, r.r_history[i])) << '\n';
    }
  }
  RankingReport report = rank_items(scores);
  if (c.dist) attach_reference(report, ids, taus, c.scaling);
  if (!c.output_path.empty()) {
    const fs::path csv = sidecar(c, ".ranking.csv");
    const fs::path tr = sidecar(c, ".trace.csv");
    write_text(csv, ranking_csv(report));
    write_text(tr, trace.str());
    artifacts.push_back(csv.string());
    artifacts.push_back(tr.string());
  }
  return json{{"ranking", ranking_json(report)}, {"items", per_item}};
}

json run_bounds(const RunConfig& c) {
  const Items items = load_items(c);
  if (c.resample_factor < 1) throw ConfigError("cli", "--resample-factor must be at least 1");
  if (c.groups < 2) throw ConfigError("cli", "--groups must be at least 2");
  ValidationOptions vo;
  vo.delta = c.delta;
  vo.gamma = c.gamma;
  vo.literal_sup = c.literal_sup;
  vo.big_m = c.big_m;
  vo.batch = batch_options(c);

  json per_item = json::array();
  for (std::size_t k = 0; k < items.batches.size(); ++k) {
    const ItemBatch& main = items.batches[k];
    const auto nq = static_cast<std::int64_t>(main.samples.size()) * c.resample_factor;
    ItemBatch resample{main.item_id, {}, main.target};
    std::string resample_kind;
    if (items.dist) {
      const auto seed = derive_seed(items.dist->seed, k, 1);
      resample.samples = generate_synthetic(with_seed(*items.dist, seed), nq);
      resample_kind = "fresh";
    } else {
      DistributionSpec boot;
      boot.family = Family::Empirical;
      boot.values = main.samples;
      boot.seed = derive_seed(c.seed, k, 1);
      resample.samples = generate_synthetic(boot, nq);
      resample_kind = "bootstrap";
    }
    std::vector<ItemBatch> groups;
    std::string group_kind;
    if (c.group_size && items.dist) {
      if (*c.group_size < 1) throw ConfigError("cli", "--group-size must be at least 1");
      for (int m = 0; m < c.groups; ++m) {
        const auto seed = derive_seed(items.dist->seed, k, 2 + static_cast<std::uint64_t>(m));
        groups.push_back(ItemBatch{main.item_id,
                                   generate_synthetic(with_seed(*items.dist, seed), *c.group_size),
                                   main.target});
      }
      group_kind = "fresh";
    } else {
      if (c.group_size) logger()->warn("--group-size needs --dist; partitioning the sample instead");
      groups = partition_groups(main, c.groups);
      group_kind = "partition";
    }
    logger()->info("bounds: item '{}' N = {} N_q = {}", main.item_id, main.samples.size(), nq);
    const ItemValidation v = validate_item(main, resample, groups, c.divergence, c.scaling, vo);
    per_item.push_back({{"item_id", v.item_id},
                        {"opt_obj", v.saa.index},
                        {"saa", solution_json(v.saa)},
                        {"pi_tilde", v.pi_tilde},
                        {"candidate", upper_json(v.candidate)},
                        {"lagrangian", lower_json(v.lagrangian)},
                        {"lower", v.lower},
                        {"upper", v.upper},
                        {"relative_gap", v.relative_gap},
                        {"resample", {{"kind", resample_kind}, {"size", nq}}},
                        {"groups", {{"kind", group_kind},
                                    {"count", groups.size()},
                                    {"size", groups.front().samples.size()}}}});
  }
  return json{{"items", per_item}};
}

BoundParams read_params(const RunConfig& c) {
  const std::string path = require(c.params_file, "--params");
  std::ifstream in(path);
  if (!in) throw ArgumentError("cli", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  BoundParams p = parse_bound_params(buf.str());
  p.validate();
  return p;
}

json run_samplesize(const RunConfig& c) {
  const BoundParams p = read_params(c);
  const SampleSizeResult r = required_sample_size(p);
  return json{{"n", r.n}, {"raw", r.raw}, {"v1", r.v1}, {"v2", r.v2}, {"v3", r.v3},
              {"params", params_json(p)}};
}

json run_rankprob(const RunConfig& c) {
  const int items = require(c.items, "--items");
  if (c.mode == "inversion") {
    const std::int64_t e = require(c.e, "--e");
    const double gap = require(c.gap_c, "--c");
    const double kappa = require(c.kappa, "--kappa");
    const std::int64_t iters = require(c.iters, "--iters");
    const double prob = loss_bound_probability(items, e, gap, kappa, iters, c.literal_binomial);
    return json{{"mode", "inversion"},
                {"probability", prob},
                {"p_inv", pair_inversion_probability(gap, kappa, iters)},
                {"pairs", static_cast<std::int64_t>(items) * (items - 1) / 2}};
  }
  if (c.mode == "validity") {
    const BoundParams p = read_params(c);
    const std::int64_t n1 = require(c.n1, "--n1");
    const std::int64_t n2 = require(c.n2, "--n2");
    return json{{"mode", "validity"},
                {"probability", ranking_validity_probability(n1, n2, items, p)},
                {"n_total", n1 + n2 * p.m_groups},
                {"params", params_json(p)}};
  }
  throw ConfigError("cli", "--mode must be inversion or validity, got '" + c.mode + "'");
}

json run_simulate(const RunConfig& c, json& artifacts) {
  if (c.output_path.empty()) throw ConfigError("cli", "simulate needs --out for the CSV file");
  if (!c.dist) throw ConfigError("cli", "simulate needs --dist");
  const Items items = load_items(c);
  write_batches(fs::path(c.output_path), items.batches);
  artifacts.push_back(c.output_path);
  std::size_t rows = 0;
  for (const auto& b : items.batches) rows += b.samples.size();
  json seeds = json::array();
  for (std::size_t k = 0; k < items.batches.size(); ++k) {
    seeds.push_back({{"item_id", items.batches[k].item_id},
                     {"target", items.batches[k].target},
                     {"seed", derive_seed(items.dist->seed, k)}});
  }
  return json{{"rows", rows}, {"items", seeds}};
}

json error_record(const std::string& module, const std::string& kind, const std::string& message,
                  const json& parameters) {
  return json{{"error",
               {{"module", module}, {"kind", kind}, {"message", message}, {"parameters", parameters}}}};
}

}  // namespace

std::string_view command_name(Command command) {
  switch (command) {
    case Command::Batch: return "batch";
    case Command::Online: return "online";
    case Command::Bounds: return "bounds";
    case Command::SampleSize: return "samplesize";
    case Command::RankProb: return "rankprob";
    case Command::Simulate: return "simulate";
  }
  return "unknown";
}

std::optional<RunConfig> parse_command_line(const std::vector<std::string>& args,
                                            std::ostream& out) {
  CLI::App app{"Satisficing risk index, ranking and ranking-validity statistics", "satisrank"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig c;
  std::string risk = "cvar";
  std::optional<double> theta;
  std::string scaling = "inv_alpha";
  std::optional<double> epsilon;

  auto* batch = app.add_subcommand("batch", "Solve and rank items from sample batches");
  auto* online = app.add_subcommand("online", "Rank items with the online primal-dual recursion");
  auto* bounds = app.add_subcommand("bounds", "Validate SAA solutions with upper and lower bounds");
  auto* samplesize = app.add_subcommand("samplesize", "Required sample size for a valid ranking");
  auto* rankprob = app.add_subcommand("rankprob", "Ranking-validity probabilities");
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic batch CSV");

  for (auto* sub : {batch, online, bounds, samplesize, rankprob, simulate}) {
    sub->add_option("--out", c.output_path, "Report path (simulate: CSV path)");
    sub->add_option("--seed", c.seed, "Seed for resampling");
  }
  for (auto* sub : {batch, online, bounds}) {
    sub->add_option("--risk", risk, "Divergence kind")
        ->check(CLI::IsMember({"kl", "burg", "chi2", "mod_chi2", "hellinger", "chi_div",
                               "variation", "cressie_read", "cvar"}));
    sub->add_option("--theta", theta, "Divergence parameter");
    sub->add_option("--scaling", scaling, "Regret scaling")
        ->check(CLI::IsMember({"inv_alpha", "inv_one_minus_alpha"}));
  }
  for (auto* sub : {batch, online, bounds, simulate}) {
    sub->add_option("--dist", c.dist, "FAMILY:P1:P2:SEED");
    sub->add_option("--tau", c.tau, "Target(s), comma separated")->delimiter(',');
    sub->add_option("--items", c.items, "Number of synthetic items");
  }
  for (auto* sub : {batch, bounds, simulate}) sub->add_option("--n", c.n, "Samples per item");
  for (auto* sub : {batch, bounds}) {
    sub->add_option("--input", c.input, "Batch CSV (item_id,target,value)");
    sub->add_option("--epsilon", epsilon, "Bisection tolerance");
    sub->add_flag("--threshold-tau", c.threshold_tau, "Compare the constraint against tau itself");
  }
  online->add_option("--stream", c.stream, "Stream file (item_id,value)");
  online->add_option("--iters", c.iters, "Steps per item");
  online->add_flag("--literal-steps", c.literal_steps, "Plain 1/t steps, no preconditioning");
  online->add_option("--history", c.history_points, "History points kept per item");

  bounds->add_option("--delta", c.delta, "Upper-bound risk level");
  bounds->add_option("--gamma", c.gamma, "Lower-bound risk level");
  bounds->add_option("--groups", c.groups, "Number of groups");
  bounds->add_option("--group-size", c.group_size, "Fresh group size (needs --dist)");
  bounds->add_option("--resample-factor", c.resample_factor, "N_q / N");
  bounds->add_flag("--literal-sup", c.literal_sup, "Use the larger bracket end value instead of the inner minimum");
  bounds->add_option("--big-m", c.big_m, "Clip group values to [0, M]");

  samplesize->add_option("--params", c.params_file, "key = value parameter file")->required();

  rankprob->add_option("--mode", c.mode, "inversion | validity")
      ->check(CLI::IsMember({"inversion", "validity"}));
  rankprob->add_option("--items", c.items, "Number of items");
  rankprob->add_option("--e", c.e, "Inversion budget");
  rankprob->add_option("--c", c.gap_c, "Minimal separation");
  rankprob->add_option("--kappa", c.kappa, "Rate constant kappa'");
  rankprob->add_option("--iters", c.iters, "Iteration budget T");
  rankprob->add_option("--params", c.params_file, "key = value parameter file");
  rankprob->add_option("--n1", c.n1, "Candidate sample size");
  rankprob->add_option("--n2", c.n2, "Per-group sample size");
  rankprob->add_flag("--literal-binomial", c.literal_binomial, "Swap the binomial roles");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream dummy;
    app.exit(e, out, dummy);
    return std::nullopt;
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream dummy;
    app.exit(e, out, dummy);
    return std::nullopt;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ArgumentError("cli", e.what());
  }

  if (batch->parsed()) c.command = Command::Batch;
  if (online->parsed()) c.command = Command::Online;
  if (bounds->parsed()) c.command = Command::Bounds;
  if (samplesize->parsed()) c.command = Command::SampleSize;
  if (rankprob->parsed()) c.command = Command::RankProb;
  if (simulate->parsed()) c.command = Command::Simulate;

  c.divergence.kind = parse_kind(risk);
  if (theta) c.divergence.theta = *theta;
  c.divergence.validate();
  c.scaling = parse_scaling(scaling);
  if (epsilon) c.epsilon = *epsilon;
  if (!(c.epsilon > 0.0)) throw ConfigError("cli", "--epsilon must be positive");
  return c;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  json report;
  report["tool"] = "satisrank";
  report["version"] = kVersion;
  report["timestamp"] = utc_timestamp();
  report["config"] = config_json(config);
  try {
    json artifacts = json::array();
    json result;
    switch (config.command) {
      case Command::Batch: result = run_batch(config, artifacts); break;
      case Command::Online: result = run_online_command(config, artifacts); break;
      case Command::Bounds: result = run_bounds(config); break;
      case Command::SampleSize: result = run_samplesize(config); break;
      case Command::RankProb: result = run_rankprob(config); break;
      case Command::Simulate: result = run_simulate(config, artifacts); break;
    }
    report["result"] = std::move(result);
    report["artifacts"] = std::move(artifacts);
    const std::string text = report.dump(2) + "\n";
    if (config.output_path.empty() || config.command == Command::Simulate) {
      out << text;
    } else {
      write_text(config.output_path, text);
    }
    return 0;
  } catch (const Error& e) {
    logger()->error("{}: {}", e.module(), e.what());
    err << error_record(e.module(), e.kind(), e.what(), report["config"]).dump(2) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << error_record("cli", "internal", e.what(), report["config"]).dump(2) << '\n';
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_command_line(args, out);
  } catch (const Error& e) {
    json given = json::array();
    for (const auto& a : args) given.push_back(a);
    err << error_record(e.module(), e.kind(), e.what(), json{{"arguments", given}}).dump(2) << '\n';
    return 2;
  }
  if (!config) return 0;
  return execute(*config, out, err);
}

}  // namespace satisrank
