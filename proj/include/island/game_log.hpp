#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "island/model_ref.hpp"

namespace island {

// Anonymized in-game player name: four uppercase letters, unique per game.
using PlayerLabel = std::string;

bool is_valid_label(const std::string& s);

// Protocol parameters for one game.
struct GameConfig {
  int num_players = 7;
  int elimination_rounds = 5;
  int sidebar_messages = 4;
  std::uint64_t seed = 0;
  int memory_char_budget = 2000;
  int response_char_budget = 4000;

  int num_finalists() const { return num_players - elimination_rounds; }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const GameConfig&) const = default;
};

enum class ParseStatus {
  parsed,
  failed,
  retried_then_parsed,
  retried_then_failed,
};

bool parse_succeeded(ParseStatus s);
std::string to_string(ParseStatus s);
ParseStatus parse_status_from_string(const std::string& s);

struct SidebarSelect {
  int round = 0;
  PlayerLabel player;
  std::string raw_text;
  std::optional<PlayerLabel> parsed_choice;
  ParseStatus parse_status = ParseStatus::failed;
  bool operator==(const SidebarSelect&) const = default;
};

struct SidebarMessage {
  int round = 0;
  PlayerLabel from;
  PlayerLabel to;
  std::string text;
  bool operator==(const SidebarMessage&) const = default;
};

struct Pitch {
  int round = 0;
  PlayerLabel player;
  std::string text;
  bool operator==(const Pitch&) const = default;
};

struct EliminationVote {
  int round = 0;
  PlayerLabel voter;
  std::string raw_text;
  std::optional<PlayerLabel> parsed_choice;
  ParseStatus parse_status = ParseStatus::failed;
  bool operator==(const EliminationVote&) const = default;
};

struct Elimination {
  int round = 0;
  PlayerLabel player;
  bool operator==(const Elimination&) const = default;
};

struct MemoryUpdate {
  int round = 0;
  PlayerLabel player;
  std::string text;
  bool operator==(const MemoryUpdate&) const = default;
};

struct FinalPitch {
  PlayerLabel player;
  std::string text;
  bool operator==(const FinalPitch&) const = default;
};

struct WinnerVote {
  PlayerLabel voter;
  std::string raw_text;
  std::optional<PlayerLabel> parsed_choice;
  ParseStatus parse_status = ParseStatus::failed;
  bool operator==(const WinnerVote&) const = default;
};

struct WinnerDeclared {
  PlayerLabel player;
  bool operator==(const WinnerDeclared&) const = default;
};

// Provider reasoning passthrough; ignored by scoring and analysis.
struct ReasoningTrace {
  int round = 0;
  PlayerLabel player;
  std::string text;
  bool operator==(const ReasoningTrace&) const = default;
};

// Recorded when a backend hard-fails; the log is then left incomplete.
struct EngineFailure {
  std::string phase;
  PlayerLabel player;
  std::string text;
  bool operator==(const EngineFailure&) const = default;
};

using GameEvent =
    std::variant<SidebarSelect, SidebarMessage, Pitch, EliminationVote,
                 Elimination, MemoryUpdate, FinalPitch, WinnerVote,
                 WinnerDeclared, ReasoningTrace, EngineFailure>;

// Complete, replayable record of one game.
struct GameLog {
  std::string game_id;
  GameConfig config;
  std::map<PlayerLabel, ModelRef> roster;
  std::vector<GameEvent> events;
  std::vector<PlayerLabel> eliminated;
  std::optional<PlayerLabel> winner;
  bool completed = false;

  std::vector<PlayerLabel> finalists() const;

  // Checks every schema invariant; throws std::invalid_argument naming the
  // first violated field.
  void validate() const;

  bool operator==(const GameLog&) const = default;
};

struct ManifestEntry {
  std::string game_id;
  std::string uri;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  void validate() const;
  bool operator==(const Manifest&) const = default;
};

// Completed games with a parsed final winner, in input order.
std::vector<GameLog> filter_scorable(const std::vector<GameLog>& logs);

}  // namespace island
