#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "island/agents.hpp"
#include "island/game_log.hpp"

namespace island {

struct ParseResult {
  std::optional<PlayerLabel> choice;
  ParseStatus status = ParseStatus::failed;
  std::string raw_text;
};

// Extracts the last <choice>...</choice> occurrence (tags and content matched
// case-insensitively, surrounding whitespace trimmed). The content must equal
// exactly one candidate label; anything else is a failed parse, never an
// exception.
ParseResult parse_choice(const std::string& raw,
                         const std::vector<PlayerLabel>& candidates);

// Plurality winner over the candidate set; ties (including the zero-vote
// case, where every candidate is maximal) are broken by a single uniform
// draw. Every vote must be a candidate.
PlayerLabel tally_votes(const std::vector<PlayerLabel>& votes,
                        const std::vector<PlayerLabel>& candidates,
                        std::mt19937_64& rng);

// Assigns four-uppercase-letter labels from the generator, rejecting
// collisions; models must be pairwise distinct.
std::map<PlayerLabel, ModelRef> assign_labels(const std::vector<ModelRef>& models,
                                              std::mt19937_64& rng);

struct GameState {
  std::vector<PlayerLabel> active;
  std::vector<PlayerLabel> eliminated;
  int round = 1;
  std::map<PlayerLabel, std::string> memories;
  std::mt19937_64 rng;
};

// Runs one game. A single generator seeded from config.seed drives, in
// order: game id, label assignment (when the engine assigns labels), then
// per round the sidebar permutation, sidebar partner fallbacks, pitch
// permutation and elimination tie-break, and finally the final-pitch
// permutation and winner tie-break. Fixing (config, roster, deterministic
// backend) fixes the entire log.
class GameEngine {
 public:
  GameEngine(GameConfig config, std::map<PlayerLabel, ModelRef> roster,
             AgentBackend& backend);
  // Engine-assigned labels drawn from the game generator.
  GameEngine(GameConfig config, const std::vector<ModelRef>& models,
             AgentBackend& backend);

  // Executes all phases. A backend hard-failure outside the memory phase
  // stops the game: the log is returned with completed=false and a failure
  // event appended. Malformed agent text never throws.
  GameLog run();

  // Individual phases, exposed for protocol tests; run() sequences them.
  std::vector<GameEvent> run_sidebar_phase();
  std::vector<GameEvent> run_pitch_phase(bool final_round);
  std::vector<GameEvent> run_elimination_phase();
  std::vector<GameEvent> run_memory_phase();
  std::vector<GameEvent> run_final_vote();

  GameState& state() { return state_; }
  const GameLog& log() const { return log_; }

 private:
  struct BackendHardFailure {};

  std::string call_backend_text(const PromptContext& ctx);
  std::string ask(const PlayerLabel& player, Phase phase,
                  const std::string& instruction,
                  const std::vector<PlayerLabel>& candidates);
  ParseResult ask_choice(const PlayerLabel& player, Phase phase,
                         const std::vector<PlayerLabel>& candidates, bool retry);
  PromptContext make_context(const PlayerLabel& player, Phase phase,
                             const std::string& instruction,
                             const std::vector<PlayerLabel>& candidates) const;
  std::string system_prompt(const PlayerLabel& player) const;
  std::string context_block(const PlayerLabel& player) const;
  std::string render_phase(const std::string& name, const PlayerLabel& player,
                           std::map<std::string, std::string> extra) const;
  std::vector<PlayerLabel> shuffled_active();
  std::vector<PlayerLabel> active_without(const PlayerLabel& player) const;
  void append(GameEvent event);
  std::vector<GameEvent> events_since(size_t mark) const;

  GameConfig config_;
  AgentBackend& backend_;
  GameState state_;
  GameLog log_;
  std::map<PlayerLabel, size_t> context_start_;  // index after last memory update
};

GameLog run_game(const GameConfig& config,
                 const std::map<PlayerLabel, ModelRef>& roster, AgentBackend& backend);
GameLog run_game(const GameConfig& config, const std::vector<ModelRef>& models,
                 AgentBackend& backend);

}  // namespace island
