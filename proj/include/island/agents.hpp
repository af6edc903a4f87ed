#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "island/game_log.hpp"
#include "island/model_ref.hpp"

namespace island {

enum class Phase {
  sidebar_select,
  sidebar_message,
  pitch,
  elimination_vote,
  memory,
  final_pitch,
  winner_vote,
};

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& s);

struct ChatMessage {
  enum class Role { system, user, assistant };
  Role role;
  std::string text;
};

std::string to_string(ChatMessage::Role role);

// Everything a backend sees for one turn. `messages` is nonempty and starts
// with the system message. For choice phases (sidebar_select,
// elimination_vote, winner_vote) `candidates` lists the legal picks along
// with their model identities so synthetic backends can vote without
// parsing prompt text; remote backends ignore it.
struct PromptContext {
  ModelRef model;
  PlayerLabel player;
  Phase phase = Phase::pitch;
  std::vector<ChatMessage> messages;
  std::vector<std::pair<PlayerLabel, ModelRef>> candidates;
};

class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual std::string respond(const PromptContext& ctx) = 0;
};

// Deterministic fixture playback for tests and replays. Fixtures are keyed
// by (player, phase) with an optional per-phase fallback queue; running out
// of both is a hard error ("fixture underrun").
class ScriptedBackend : public AgentBackend {
 public:
  void add(const PlayerLabel& player, Phase phase, std::string text);
  void add_default(Phase phase, std::string text);
  static ScriptedBackend from_json(const std::string& bytes);
  static ScriptedBackend from_json_file(const std::string& path);

  std::string respond(const PromptContext& ctx) override;

 private:
  std::map<std::pair<PlayerLabel, Phase>, std::deque<std::string>> fixtures_;
  std::map<Phase, std::deque<std::string>> defaults_;
};

// Hidden ground-truth skills for synthetic play.
struct SyntheticSkill {
  std::map<std::string, double> lambda_by_id;

  static SyntheticSkill uniform(const std::vector<ModelRef>& models, double lambda = 1.0);
  double lambda(const ModelRef& model) const;  // throws on unknown model
  void validate() const;                       // all lambdas positive
};

// Draws the winner of one game directly from the choice model: player i wins
// with probability lambda_i over the sum across the player set. Used to
// fabricate winner-only logs that bypass dialogue entirely.
ModelRef sample_pl_winner(const SyntheticSkill& skills,
                          const std::vector<ModelRef>& players, std::mt19937_64& rng);

// Fabricated winner-only log (boilerplate-free): roster, eliminations in
// arbitrary order, and a winner drawn via sample_pl_winner.
GameLog synthesize_outcome_log(const SyntheticSkill& skills,
                               const std::vector<ModelRef>& players,
                               std::uint64_t seed);

// Stochastic agent whose elimination votes target candidate c with
// probability proportional to 1/lambda_c (weak players attract votes) and
// whose winner votes pick finalist f proportionally to lambda_f. Sidebar
// partner choice is uniform; pitch, sidebar and memory turns return fixed
// boilerplate. Exists so full engine runs have known outcome statistics.
class PlVoteBackend : public AgentBackend {
 public:
  PlVoteBackend(SyntheticSkill skills, std::uint64_t seed);
  std::string respond(const PromptContext& ctx) override;

 private:
  PlayerLabel pick_weighted(const PromptContext& ctx, bool inverse);

  SyntheticSkill skills_;
  std::mt19937_64 rng_;
  std::mutex mu_;
};

}  // namespace island
