#include "island/game_log.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace island {

namespace {

void fail(const std::string& what) { throw std::invalid_argument(what); }

bool is_uuid(const std::string& s) {
  if (s.size() != 36) return false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (s[i] != '-') return false;
    } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

struct EventChecker {
  const GameLog& log;
  size_t index = 0;

  std::string where(const char* field) const {
    return "events[" + std::to_string(index) + "]." + field;
  }

  void check_label(const PlayerLabel& label, const char* field) const {
    if (!is_valid_label(label)) fail(where(field) + ": bad player label \"" + label + "\"");
    if (!log.roster.count(label)) fail(where(field) + ": label " + label + " not in roster");
  }

  void check_round(int round, const char* field) const {
    if (round < 1 || round > log.config.elimination_rounds) {
      fail(where(field) + ": round " + std::to_string(round) + " outside [1, " +
           std::to_string(log.config.elimination_rounds) + "]");
    }
  }

  void check_parse(const std::optional<PlayerLabel>& choice, ParseStatus status) const {
    if (parse_succeeded(status) != choice.has_value()) {
      fail(where("parsed_choice") + ": presence inconsistent with parse_status " +
           to_string(status));
    }
    if (choice) check_label(*choice, "parsed_choice");
  }

  void operator()(const SidebarSelect& e) const {
    check_round(e.round, "round");
    check_label(e.player, "player");
    check_parse(e.parsed_choice, e.parse_status);
  }
  void operator()(const SidebarMessage& e) const {
    check_round(e.round, "round");
    check_label(e.from, "from");
    check_label(e.to, "to");
  }
  void operator()(const Pitch& e) const {
    check_round(e.round, "round");
    check_label(e.player, "player");
  }
  void operator()(const EliminationVote& e) const {
    check_round(e.round, "round");
    check_label(e.voter, "voter");
    check_parse(e.parsed_choice, e.parse_status);
  }
  void operator()(const Elimination& e) const {
    check_round(e.round, "round");
    check_label(e.player, "player");
  }
  void operator()(const MemoryUpdate& e) const {
    check_round(e.round, "round");
    check_label(e.player, "player");
  }
  void operator()(const FinalPitch& e) const { check_label(e.player, "player"); }
  void operator()(const WinnerVote& e) const {
    check_label(e.voter, "voter");
    check_parse(e.parsed_choice, e.parse_status);
  }
  void operator()(const WinnerDeclared& e) const { check_label(e.player, "player"); }
  void operator()(const ReasoningTrace& e) const {
    check_round(e.round, "round");
    check_label(e.player, "player");
  }
  void operator()(const EngineFailure& e) const {
    if (e.phase.empty()) fail(where("phase") + ": empty");
    if (!e.player.empty()) check_label(e.player, "player");
  }
};

}  // namespace

bool is_valid_label(const std::string& s) {
  return s.size() == 4 && std::all_of(s.begin(), s.end(),
                                      [](char c) { return c >= 'A' && c <= 'Z'; });
}

void GameConfig::validate() const {
  if (num_players < 1) fail("config.num_players: must be positive");
  if (elimination_rounds < 1) fail("config.elimination_rounds: must be at least 1");
  if (num_players - elimination_rounds < 2) {
    fail("config.num_players: need at least two finalists (P - R >= 2)");
  }
  if (sidebar_messages < 1) fail("config.sidebar_messages: must be positive");
  if (memory_char_budget < 1) fail("config.memory_char_budget: must be positive");
  if (response_char_budget < 1) fail("config.response_char_budget: must be positive");
}

bool parse_succeeded(ParseStatus s) {
  return s == ParseStatus::parsed || s == ParseStatus::retried_then_parsed;
}

std::string to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::parsed: return "parsed";
    case ParseStatus::failed: return "failed";
    case ParseStatus::retried_then_parsed: return "retried_then_parsed";
    case ParseStatus::retried_then_failed: return "retried_then_failed";
  }
  return "failed";
}

ParseStatus parse_status_from_string(const std::string& s) {
  if (s == "parsed") return ParseStatus::parsed;
  if (s == "failed") return ParseStatus::failed;
  if (s == "retried_then_parsed") return ParseStatus::retried_then_parsed;
  if (s == "retried_then_failed") return ParseStatus::retried_then_failed;
  throw std::invalid_argument("bad parse_status \"" + s + "\"");
}

std::vector<PlayerLabel> GameLog::finalists() const {
  std::vector<PlayerLabel> out;
  for (const auto& [label, model] : roster) {
    if (std::find(eliminated.begin(), eliminated.end(), label) == eliminated.end()) {
      out.push_back(label);
    }
  }
  return out;
}

void GameLog::validate() const {
  if (!is_uuid(game_id)) fail("game_id: not a UUID string");
  config.validate();

  if (static_cast<int>(roster.size()) != config.num_players) {
    fail("roster: has " + std::to_string(roster.size()) + " players, config says " +
         std::to_string(config.num_players));
  }
  std::set<ModelRef> models;
  for (const auto& [label, model] : roster) {
    if (!is_valid_label(label)) fail("roster: bad player label \"" + label + "\"");
    if (!models.insert(model).second) {
      fail("roster: model " + model.id() + " appears under two labels");
    }
  }

  EventChecker checker{*this};
  for (checker.index = 0; checker.index < events.size(); ++checker.index) {
    std::visit(checker, events[checker.index]);
  }

  std::set<PlayerLabel> seen;
  for (const auto& label : eliminated) {
    if (!roster.count(label)) fail("eliminated: label " + label + " not in roster");
    if (!seen.insert(label).second) fail("eliminated: label " + label + " listed twice");
  }
  if (static_cast<int>(eliminated.size()) > config.elimination_rounds) {
    fail("eliminated: more entries than elimination_rounds");
  }

  if (winner) {
    if (!roster.count(*winner)) fail("winner: label " + *winner + " not in roster");
    if (seen.count(*winner)) fail("winner: listed among eliminated");
  }
  if (completed) {
    if (!winner) fail("completed: completed without winner");
    if (static_cast<int>(eliminated.size()) != config.elimination_rounds) {
      fail("completed: eliminated has " + std::to_string(eliminated.size()) +
           " entries, expected " + std::to_string(config.elimination_rounds));
    }
  }
}

void Manifest::validate() const {
  std::set<std::string> ids;
  for (const auto& entry : entries) {
    if (entry.game_id.empty()) fail("manifest: empty game_id");
    if (entry.uri.empty()) fail("manifest: empty uri for " + entry.game_id);
    if (!ids.insert(entry.game_id).second) {
      fail("manifest: duplicate game_id " + entry.game_id);
    }
  }
}

std::vector<GameLog> filter_scorable(const std::vector<GameLog>& logs) {
  std::vector<GameLog> out;
  for (const auto& log : logs) {
    if (log.completed && log.winner) out.push_back(log);
  }
  return out;
}

}  // namespace island
