// island - run Agent Island tournaments, score logs, and reproduce the
// analysis tables.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "island/agents.hpp"
#include "island/analysis.hpp"
#include "island/engine.hpp"
#include "island/fetch.hpp"
#include "island/ranking.hpp"
#include "island/remote.hpp"
#include "island/reports.hpp"
#include "island/rng_util.hpp"
#include "island/serialization.hpp"

namespace fs = std::filesystem;
using namespace island;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::vector<ModelRef> parse_model_list(const std::string& csv) {
  std::vector<ModelRef> models;
  std::stringstream ss(csv);
  std::string id;
  while (std::getline(ss, id, ',')) {
    if (!id.empty()) models.push_back(ModelRef::parse(id));
  }
  return models;
}

std::vector<ModelRef> load_pool_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool file " + path);
  std::vector<ModelRef> models;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.erase(0, 1);
    if (!line.empty()) models.push_back(ModelRef::parse(line));
  }
  return models;
}

// Skills file: one "provider/name=lambda" per line; '#' starts a comment.
SyntheticSkill load_skills_file(const std::string& path, const std::vector<ModelRef>& pool) {
  SyntheticSkill skills = SyntheticSkill::uniform(pool);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open skills file " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string id = line.substr(0, eq);
    id.erase(std::remove_if(id.begin(), id.end(),
                            [](unsigned char c) { return std::isspace(c); }),
             id.end());
    if (id.empty()) continue;
    skills.lambda_by_id[ModelRef::parse(id).id()] = std::stod(line.substr(eq + 1));
  }
  skills.validate();
  return skills;
}

std::vector<GameLog> load_scorable_logs(const std::string& dir) {
  std::vector<std::string> errors;
  auto logs = load_log_dir(dir, &errors);
  for (const auto& error : errors) std::cerr << "warning: " << error << "\n";
  auto scorable = filter_scorable(logs);
  std::cerr << "loaded " << logs.size() << " logs, " << scorable.size() << " scorable\n";
  return scorable;
}

void write_file(const fs::path& path, const std::string& bytes) {
  atomic_write(path, bytes);
  std::cerr << "wrote " << path.string() << "\n";
}

struct RunArgs {
  std::string models_csv;
  std::string pool_file;
  std::string skills_file;
  std::string fixtures_file;
  std::string backend = "synthetic";
  std::string endpoint;
  std::string out_dir = "logs";
  int games = 1;
  int jobs = 1;
  GameConfig config;
};

int cmd_run(const RunArgs& args) {
  std::vector<ModelRef> pool;
  if (!args.pool_file.empty()) pool = load_pool_file(args.pool_file);
  auto extra = parse_model_list(args.models_csv);
  pool.insert(pool.end(), extra.begin(), extra.end());
  if (static_cast<int>(pool.size()) < args.config.num_players) {
    throw std::runtime_error("model pool smaller than the per-game player count");
  }
  args.config.validate();
  fs::create_directories(args.out_dir);

  SyntheticSkill skills = args.skills_file.empty()
                              ? SyntheticSkill::uniform(pool)
                              : load_skills_file(args.skills_file, pool);

  std::shared_ptr<RemoteBackend> remote;
  if (args.backend == "remote") {
    if (args.endpoint.empty()) {
      throw std::runtime_error("remote backend requires --endpoint");
    }
    RemoteConfig rc;
    rc.endpoint_url = args.endpoint;
    rc.max_tokens = std::max(64, args.config.response_char_budget / 4);
    remote = std::make_shared<RemoteBackend>(rc);
  } else if (args.backend == "scripted" && args.fixtures_file.empty()) {
    throw std::runtime_error("scripted backend requires --fixtures");
  } else if (args.backend != "synthetic" && args.backend != "scripted") {
    throw std::runtime_error("unknown backend \"" + args.backend + "\"");
  }

  // Per-game inputs are drawn up front so --jobs does not change outputs.
  struct GamePlan {
    GameConfig config;
    std::vector<ModelRef> players;
  };
  std::mt19937_64 run_rng(args.config.seed);
  std::vector<GamePlan> plans;
  for (int g = 0; g < args.games; ++g) {
    GamePlan plan;
    plan.config = args.config;
    plan.config.seed = run_rng();
    std::vector<ModelRef> deck = pool;
    std::shuffle(deck.begin(), deck.end(), run_rng);
    deck.resize(static_cast<size_t>(args.config.num_players));
    plan.players = std::move(deck);
    plans.push_back(std::move(plan));
  }

  auto play = [&](const GamePlan& plan) -> GameLog {
    if (args.backend == "synthetic") {
      PlVoteBackend backend(skills, derive_seed(plan.config.seed, 1));
      return run_game(plan.config, plan.players, backend);
    }
    if (args.backend == "scripted") {
      ScriptedBackend backend = ScriptedBackend::from_json_file(args.fixtures_file);
      return run_game(plan.config, plan.players, backend);
    }
    return run_game(plan.config, plan.players, *remote);
  };

  std::vector<GameLog> logs(plans.size());
  if (args.jobs <= 1) {
    for (size_t g = 0; g < plans.size(); ++g) logs[g] = play(plans[g]);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        size_t g = next.fetch_add(1);
        if (g >= plans.size()) return;
        logs[g] = play(plans[g]);
      }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < args.jobs; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }

  int completed = 0;
  for (size_t g = 0; g < logs.size(); ++g) {
    const GameLog& log = logs[g];
    save_log(log, fs::path(args.out_dir) / (log.game_id + ".json"));
    if (log.completed) ++completed;
    std::cout << "game " << (g + 1) << "/" << logs.size() << " id=" << log.game_id;
    if (log.completed) {
      std::cout << " winner=" << *log.winner << " model=" << log.roster.at(*log.winner).id();
    } else {
      std::cout << " INCOMPLETE";
    }
    std::cout << "\n";
  }
  std::cout << completed << "/" << logs.size() << " games completed, logs in "
            << args.out_dir << "\n";
  return completed == static_cast<int>(logs.size()) ? kExitOk : kExitRuntime;
}

int cmd_score(const std::string& logs_dir, const std::string& out_dir,
              const SamplerConfig& sampler) {
  auto scorable = load_scorable_logs(logs_dir);
  if (scorable.empty()) throw std::runtime_error("no scorable logs in " + logs_dir);
  auto outcomes = extract_outcomes(scorable);
  auto posteriors = gibbs_sample(outcomes, sampler);
  auto rows = summarize(posteriors);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "rankings.csv", rankings_csv(rows));
  std::cout << rankings_table(rows);
  return kExitOk;
}

int cmd_h2h(const std::string& logs_dir, const std::string& out_dir,
            const std::string& models_csv, const SamplerConfig& sampler) {
  auto focal = parse_model_list(models_csv);
  auto scorable = load_scorable_logs(logs_dir);
  if (scorable.empty()) throw std::runtime_error("no scorable logs in " + logs_dir);
  auto posteriors = gibbs_sample(extract_outcomes(scorable), sampler);

  auto posterior_of = [&](const ModelRef& model) -> const SkillPosterior& {
    for (const auto& post : posteriors) {
      if (post.model == model) return post;
    }
    throw std::runtime_error("model " + model.id() + " has no scorable games");
  };

  std::vector<HeadToHead> pairs;
  for (const auto& a : focal) {
    for (const auto& b : focal) {
      if (a == b) continue;
      pairs.push_back(head_to_head(posterior_of(a), posterior_of(b)));
    }
  }
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "h2h.csv", h2h_csv(pairs));
  std::cout << h2h_table(pairs);
  return kExitOk;
}

int cmd_spp(const std::string& logs_dir, const std::string& out_dir, int threshold) {
  auto scorable = load_scorable_logs(logs_dir);
  auto obs = build_vote_observations(scorable);
  if (obs.empty()) {
    std::cout << "0 observations: no mixed-provider two-finalist games with parsed "
                 "winner votes\n";
    return kExitOk;
  }
  obs = bundle_providers(std::move(obs), threshold);
  auto pooled = fit_pooled(obs);
  auto by_provider = fit_by_provider(obs);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "spp_pooled.csv", regression_csv(pooled, threshold));
  write_file(fs::path(out_dir) / "spp_by_provider.csv",
             regression_csv(by_provider, threshold));
  std::cout << regression_table("Panel A. Pooled same-provider effect", pooled, threshold)
            << "\n"
            << regression_table("Panel B. By finalist provider", by_provider, threshold);
  return kExitOk;
}

int cmd_fetch(const std::string& manifest_path, const std::string& dest) {
  Manifest manifest = load_manifest(manifest_path);
  FetchSummary summary = fetch_manifest_logs(manifest, dest);
  std::cout << "fetched " << summary.fetched << ", skipped " << summary.skipped
            << ", failed " << summary.failed << "\n";
  for (const auto& [game_id, reason] : summary.failures) {
    std::cerr << "failed " << game_id << ": " << reason << "\n";
  }
  return summary.failed == 0 ? kExitOk : kExitRuntime;
}

int cmd_validate(const std::string& logs_dir) {
  std::vector<std::string> errors;
  auto logs = load_log_dir(logs_dir, &errors);
  for (const auto& error : errors) std::cout << "INVALID " << error << "\n";
  std::cout << logs.size() << " valid, " << errors.size() << " invalid\n";
  return errors.empty() ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent Island tournaments, Plackett-Luce scoring, and vote analysis"};
  app.require_subcommand(1);
  // config keys are scoped by subcommand, e.g. "run.games=20"; flags override
  app.set_config("--config", "", "Config file (subcommand.key=value)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run games and write one log per game");
  run->configurable(true);
  run->add_option("--models", run_args.models_csv, "Comma-separated model ids");
  run->add_option("--pool", run_args.pool_file, "Pool file, one model id per line");
  run->add_option("--games", run_args.games, "Number of games")->check(CLI::PositiveNumber);
  run->add_option("--players", run_args.config.num_players, "Players per game (P)");
  run->add_option("--rounds", run_args.config.elimination_rounds, "Elimination rounds (R)");
  run->add_option("--sidebar-messages", run_args.config.sidebar_messages,
                  "Messages per sidebar (M)");
  run->add_option("--seed", run_args.config.seed, "Run seed");
  run->add_option("--memory-budget", run_args.config.memory_char_budget,
                  "Memory character budget");
  run->add_option("--response-budget", run_args.config.response_char_budget,
                  "Response character budget");
  run->add_option("--backend", run_args.backend, "synthetic | scripted | remote")
      ->check(CLI::IsMember({"synthetic", "scripted", "remote"}));
  run->add_option("--skills", run_args.skills_file,
                  "Skills file for the synthetic backend (model=lambda)");
  run->add_option("--fixtures", run_args.fixtures_file,
                  "Fixtures JSON for the scripted backend");
  run->add_option("--endpoint", run_args.endpoint, "Chat-completions endpoint URL");
  run->add_option("--out", run_args.out_dir, "Output directory");
  run->add_option("--jobs", run_args.jobs, "Concurrent games")->check(CLI::PositiveNumber);

  SamplerConfig sampler;
  std::string logs_dir = "logs", out_dir = ".", models_csv;
  int threshold = 50;

  auto add_sampler_flags = [&](CLI::App* cmd) {
    cmd->add_option("--iterations", sampler.iterations, "Sampler iterations (T)");
    cmd->add_option("--burn-in", sampler.burn_in, "Burn-in iterations (B)");
    cmd->add_option("--seed", sampler.seed, "Sampler seed");
  };

  auto* score = app.add_subcommand("score", "Rank models from a log directory");
  score->configurable(true);
  score->add_option("--logs", logs_dir, "Log directory");
  score->add_option("--out", out_dir, "Output directory for rankings.csv");
  add_sampler_flags(score);

  auto* h2h = app.add_subcommand("h2h", "Pairwise posterior statistics for focal models");
  h2h->configurable(true);
  h2h->add_option("--logs", logs_dir, "Log directory");
  h2h->add_option("--out", out_dir, "Output directory for h2h.csv");
  h2h->add_option("--models", models_csv, "Comma-separated focal model ids")->required();
  add_sampler_flags(h2h);

  auto* spp = app.add_subcommand("spp", "Same-provider preference regressions");
  spp->configurable(true);
  spp->add_option("--logs", logs_dir, "Log directory");
  spp->add_option("--out", out_dir, "Output directory for the panel CSVs");
  spp->add_option("--threshold", threshold, "Min same-provider rows per category");

  std::string manifest_path, dest_dir = "logs";
  auto* fetch = app.add_subcommand("fetch", "Fetch manifest entries into a directory");
  fetch->configurable(true);
  fetch->add_option("--manifest", manifest_path, "Manifest JSON path")->required();
  fetch->add_option("--dest", dest_dir, "Destination directory");

  auto* validate = app.add_subcommand("validate", "Parse and validate every log in a directory");
  validate->configurable(true);
  validate->add_option("--logs", logs_dir, "Log directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (score->parsed()) return cmd_score(logs_dir, out_dir, sampler);
    if (h2h->parsed()) return cmd_h2h(logs_dir, out_dir, models_csv, sampler);
    if (spp->parsed()) return cmd_spp(logs_dir, out_dir, threshold);
    if (fetch->parsed()) return cmd_fetch(manifest_path, dest_dir);
    if (validate->parsed()) return cmd_validate(logs_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
