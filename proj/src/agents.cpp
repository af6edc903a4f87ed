#include "island/agents.hpp"

#include <fstream>
#include <stdexcept>

#include "island/rng_util.hpp"
#include "json.hpp"

namespace island {

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::sidebar_select: return "sidebar_select";
    case Phase::sidebar_message: return "sidebar_message";
    case Phase::pitch: return "pitch";
    case Phase::elimination_vote: return "elimination_vote";
    case Phase::memory: return "memory";
    case Phase::final_pitch: return "final_pitch";
    case Phase::winner_vote: return "winner_vote";
  }
  return "pitch";
}

Phase phase_from_string(const std::string& s) {
  if (s == "sidebar_select") return Phase::sidebar_select;
  if (s == "sidebar_message") return Phase::sidebar_message;
  if (s == "pitch") return Phase::pitch;
  if (s == "elimination_vote") return Phase::elimination_vote;
  if (s == "memory") return Phase::memory;
  if (s == "final_pitch") return Phase::final_pitch;
  if (s == "winner_vote") return Phase::winner_vote;
  throw std::invalid_argument("bad phase \"" + s + "\"");
}

std::string to_string(ChatMessage::Role role) {
  switch (role) {
    case ChatMessage::Role::system: return "system";
    case ChatMessage::Role::user: return "user";
    case ChatMessage::Role::assistant: return "assistant";
  }
  return "user";
}

void ScriptedBackend::add(const PlayerLabel& player, Phase phase, std::string text) {
  fixtures_[{player, phase}].push_back(std::move(text));
}

void ScriptedBackend::add_default(Phase phase, std::string text) {
  defaults_[phase].push_back(std::move(text));
}

ScriptedBackend ScriptedBackend::from_json(const std::string& bytes) {
  nlohmann::json j = nlohmann::json::parse(bytes);
  ScriptedBackend backend;
  if (j.contains("defaults")) {
    for (const auto& [phase, texts] : j.at("defaults").items()) {
      for (const auto& text : texts) {
        backend.add_default(phase_from_string(phase), text.get<std::string>());
      }
    }
  }
  if (j.contains("players")) {
    for (const auto& [player, phases] : j.at("players").items()) {
      for (const auto& [phase, texts] : phases.items()) {
        for (const auto& text : texts) {
          backend.add(player, phase_from_string(phase), text.get<std::string>());
        }
      }
    }
  }
  return backend;
}

ScriptedBackend ScriptedBackend::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open fixtures file " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(bytes);
}

std::string ScriptedBackend::respond(const PromptContext& ctx) {
  auto it = fixtures_.find({ctx.player, ctx.phase});
  if (it != fixtures_.end() && !it->second.empty()) {
    std::string text = std::move(it->second.front());
    it->second.pop_front();
    return text;
  }
  auto fallback = defaults_.find(ctx.phase);
  if (fallback != defaults_.end() && !fallback->second.empty()) {
    std::string text = std::move(fallback->second.front());
    fallback->second.pop_front();
    return text;
  }
  throw std::runtime_error("fixture underrun for (" + ctx.player + ", " +
                           to_string(ctx.phase) + ")");
}

SyntheticSkill SyntheticSkill::uniform(const std::vector<ModelRef>& models, double lambda) {
  SyntheticSkill skills;
  for (const auto& model : models) skills.lambda_by_id[model.id()] = lambda;
  return skills;
}

double SyntheticSkill::lambda(const ModelRef& model) const {
  auto it = lambda_by_id.find(model.id());
  if (it == lambda_by_id.end()) {
    throw std::invalid_argument("no skill entry for model " + model.id());
  }
  return it->second;
}

void SyntheticSkill::validate() const {
  for (const auto& [id, lambda] : lambda_by_id) {
    if (!(lambda > 0.0)) throw std::invalid_argument("skill for " + id + " must be positive");
  }
}

ModelRef sample_pl_winner(const SyntheticSkill& skills,
                          const std::vector<ModelRef>& players, std::mt19937_64& rng) {
  if (players.empty()) throw std::invalid_argument("sample_pl_winner: empty player set");
  double total = 0.0;
  std::vector<double> weights;
  weights.reserve(players.size());
  for (const auto& player : players) {
    double lambda = skills.lambda(player);
    weights.push_back(lambda);
    total += lambda;
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (size_t i = 0; i < players.size(); ++i) {
    acc += weights[i];
    if (u < acc) return players[i];
  }
  return players.back();  // guards the u == total rounding edge
}

GameLog synthesize_outcome_log(const SyntheticSkill& skills,
                               const std::vector<ModelRef>& players,
                               std::uint64_t seed) {
  if (players.size() < 3) {
    throw std::invalid_argument("synthesize_outcome_log: need at least 3 players");
  }
  std::mt19937_64 rng(seed);
  GameLog log;
  log.config.num_players = static_cast<int>(players.size());
  log.config.elimination_rounds = static_cast<int>(players.size()) - 2;
  log.config.seed = seed;
  log.game_id = uuid_from_rng(rng);

  // Label players AAAA, AAAB, ... in order; anonymity is irrelevant here.
  std::vector<PlayerLabel> labels;
  for (size_t i = 0; i < players.size(); ++i) {
    PlayerLabel label = "AAAA";
    label[3] = static_cast<char>('A' + i % 26);
    label[2] = static_cast<char>('A' + (i / 26) % 26);
    log.roster.emplace(label, players[i]);
    labels.push_back(label);
  }

  ModelRef winner = sample_pl_winner(skills, players, rng);
  PlayerLabel winner_label;
  for (const auto& [label, model] : log.roster) {
    if (model == winner) winner_label = label;
  }
  for (const auto& label : labels) {
    if (label != winner_label &&
        static_cast<int>(log.eliminated.size()) < log.config.elimination_rounds) {
      log.eliminated.push_back(label);
    }
  }
  log.winner = winner_label;
  log.completed = true;
  return log;
}

PlVoteBackend::PlVoteBackend(SyntheticSkill skills, std::uint64_t seed)
    : skills_(std::move(skills)), rng_(seed) {
  skills_.validate();
}

PlayerLabel PlVoteBackend::pick_weighted(const PromptContext& ctx, bool inverse) {
  if (ctx.candidates.empty()) {
    throw std::invalid_argument("vote prompt without candidates for " + ctx.player);
  }
  double total = 0.0;
  std::vector<double> weights;
  weights.reserve(ctx.candidates.size());
  for (const auto& [label, model] : ctx.candidates) {
    double lambda = skills_.lambda(model);
    double w = inverse ? 1.0 / lambda : lambda;
    weights.push_back(w);
    total += w;
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng_);
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return ctx.candidates[i].first;
  }
  return ctx.candidates.back().first;
}

std::string PlVoteBackend::respond(const PromptContext& ctx) {
  std::lock_guard<std::mutex> lock(mu_);
  switch (ctx.phase) {
    case Phase::elimination_vote:
      return "<choice>" + pick_weighted(ctx, /*inverse=*/true) +
             "</choice> Weakest pitch this round.";
    case Phase::winner_vote:
      return "<choice>" + pick_weighted(ctx, /*inverse=*/false) +
             "</choice> Played the strongest game.";
    case Phase::sidebar_select: {
      if (ctx.candidates.empty()) {
        throw std::invalid_argument("sidebar_select without candidates");
      }
      auto idx = std::uniform_int_distribution<size_t>(0, ctx.candidates.size() - 1)(rng_);
      return "<choice>" + ctx.candidates[idx].first + "</choice>";
    }
    case Phase::sidebar_message:
      return "Let's compare notes after the pitches and vote together.";
    case Phase::pitch:
      return "I have been consistent and transparent; advance me.";
    case Phase::final_pitch:
      return "I played a straight game from the first round; I ask for your vote.";
    case Phase::memory:
      return "Tracking alliances and votes; staying flexible.";
  }
  return "";
}

}  // namespace island
