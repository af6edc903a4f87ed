#include "island/engine.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "island/prompts.hpp"
#include "island/rng_util.hpp"

namespace island {

namespace {

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string to_upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(begin, end - begin + 1);
}

// Replaces invalid UTF-8 sequences with U+FFFD so logs always serialize.
std::string sanitize_utf8(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  const size_t n = in.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    if (c < 0x80) {
      out += in[i];
      ++i;
      continue;
    }
    size_t len = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
    } else if (c == 0xE0) {
      len = 3; lo = 0xA0;
    } else if ((c >= 0xE1 && c <= 0xEC) || c == 0xEE || c == 0xEF) {
      len = 3;
    } else if (c == 0xED) {
      len = 3; hi = 0x9F;
    } else if (c == 0xF0) {
      len = 4; lo = 0x90;
    } else if (c >= 0xF1 && c <= 0xF3) {
      len = 4;
    } else if (c == 0xF4) {
      len = 4; hi = 0x8F;
    }
    bool ok = len > 0 && i + len <= n;
    for (size_t k = 1; ok && k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(in[i + k]);
      unsigned char l = (k == 1) ? lo : 0x80;
      unsigned char h = (k == 1) ? hi : 0xBF;
      ok = cc >= l && cc <= h;
    }
    if (ok) {
      out.append(in, i, len);
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      ++i;
    }
  }
  return out;
}

// Byte-budget truncation that never splits a code point.
std::string truncate_text(std::string s, size_t budget) {
  if (s.size() <= budget) return s;
  size_t cut = budget;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  s.resize(cut);
  return s;
}

std::string join_labels(const std::vector<PlayerLabel>& labels) {
  std::string out;
  for (const auto& label : labels) {
    if (!out.empty()) out += ", ";
    out += label;
  }
  return out;
}

}  // namespace

ParseResult parse_choice(const std::string& raw,
                         const std::vector<PlayerLabel>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("parse_choice: empty candidate set");
  ParseResult result;
  result.raw_text = raw;

  static const std::string kOpen = "<choice>";
  static const std::string kClose = "</choice>";
  const std::string lower = to_lower(raw);

  // Last <choice> that still has a </choice> after it wins; overlapping tags
  // therefore resolve to the innermost final occurrence.
  size_t content_begin = std::string::npos;
  size_t content_end = std::string::npos;
  size_t pos = 0;
  while (true) {
    size_t open_at = lower.find(kOpen, pos);
    if (open_at == std::string::npos) break;
    size_t begin = open_at + kOpen.size();
    size_t close_at = lower.find(kClose, begin);
    if (close_at == std::string::npos) break;
    content_begin = begin;
    content_end = close_at;
    pos = open_at + 1;
  }
  if (content_begin == std::string::npos) {
    result.status = ParseStatus::failed;
    return result;
  }

  std::string content = to_upper(trim(raw.substr(content_begin, content_end - content_begin)));
  for (const auto& candidate : candidates) {
    if (content == to_upper(candidate)) {
      result.choice = candidate;
      result.status = ParseStatus::parsed;
      return result;
    }
  }
  result.status = ParseStatus::failed;
  return result;
}

PlayerLabel tally_votes(const std::vector<PlayerLabel>& votes,
                        const std::vector<PlayerLabel>& candidates,
                        std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("tally_votes: empty candidate set");
  std::map<PlayerLabel, int> counts;
  for (const auto& candidate : candidates) counts[candidate] = 0;
  for (const auto& vote : votes) {
    auto it = counts.find(vote);
    if (it == counts.end()) {
      throw std::invalid_argument("tally_votes: vote for non-candidate " + vote);
    }
    ++it->second;
  }
  int best = 0;
  for (const auto& [candidate, count] : counts) best = std::max(best, count);
  std::vector<PlayerLabel> maximal;
  for (const auto& candidate : candidates) {
    if (counts[candidate] == best) maximal.push_back(candidate);
  }
  if (maximal.size() == 1) return maximal.front();
  auto idx = std::uniform_int_distribution<size_t>(0, maximal.size() - 1)(rng);
  return maximal[idx];
}

std::map<PlayerLabel, ModelRef> assign_labels(const std::vector<ModelRef>& models,
                                              std::mt19937_64& rng) {
  std::set<std::string> ids;
  for (const auto& model : models) {
    if (!ids.insert(model.id()).second) {
      throw std::invalid_argument("assign_labels: model " + model.id() + " listed twice");
    }
  }
  std::map<PlayerLabel, ModelRef> roster;
  std::uniform_int_distribution<int> letter(0, 25);
  for (const auto& model : models) {
    PlayerLabel label;
    do {
      label.clear();
      for (int k = 0; k < 4; ++k) label += static_cast<char>('A' + letter(rng));
    } while (roster.count(label));
    roster.emplace(label, model);
  }
  return roster;
}

GameEngine::GameEngine(GameConfig config, std::map<PlayerLabel, ModelRef> roster,
                       AgentBackend& backend)
    : config_(config), backend_(backend) {
  config_.validate();
  state_.rng.seed(config_.seed);
  log_.game_id = uuid_from_rng(state_.rng);
  log_.config = config_;
  if (static_cast<int>(roster.size()) != config_.num_players) {
    throw std::invalid_argument("roster size does not match config.num_players");
  }
  std::set<std::string> ids;
  for (const auto& [label, model] : roster) {
    if (!is_valid_label(label)) throw std::invalid_argument("bad roster label " + label);
    if (!ids.insert(model.id()).second) {
      throw std::invalid_argument("model " + model.id() + " appears twice in roster");
    }
  }
  log_.roster = std::move(roster);
  for (const auto& [label, model] : log_.roster) state_.active.push_back(label);
}

GameEngine::GameEngine(GameConfig config, const std::vector<ModelRef>& models,
                       AgentBackend& backend)
    : config_(config), backend_(backend) {
  config_.validate();
  if (static_cast<int>(models.size()) != config_.num_players) {
    throw std::invalid_argument("model list size does not match config.num_players");
  }
  state_.rng.seed(config_.seed);
  log_.game_id = uuid_from_rng(state_.rng);
  log_.config = config_;
  log_.roster = assign_labels(models, state_.rng);
  for (const auto& [label, model] : log_.roster) state_.active.push_back(label);
}

GameLog GameEngine::run() {
  try {
    for (int round = 1; round <= config_.elimination_rounds; ++round) {
      state_.round = round;
      run_sidebar_phase();
      run_pitch_phase(/*final_round=*/false);
      run_elimination_phase();
      run_memory_phase();
    }
    state_.round = config_.elimination_rounds + 1;
    run_pitch_phase(/*final_round=*/true);
    run_final_vote();
    log_.completed = true;
  } catch (const BackendHardFailure&) {
    log_.completed = false;
  }
  return log_;
}

std::vector<GameEvent> GameEngine::run_sidebar_phase() {
  if (state_.active.size() < 2) {
    throw std::logic_error("sidebar phase requires at least two active players");
  }
  size_t mark = log_.events.size();
  for (const auto& initiator : shuffled_active()) {
    auto others = active_without(initiator);
    auto selection = ask_choice(initiator, Phase::sidebar_select, others, /*retry=*/false);
    PlayerLabel partner;
    if (selection.choice) {
      partner = *selection.choice;
    } else {
      auto idx = std::uniform_int_distribution<size_t>(0, others.size() - 1)(state_.rng);
      partner = others[idx];
    }
    append(SidebarSelect{state_.round, initiator, selection.raw_text, selection.choice,
                         selection.status});

    for (int m = 0; m < config_.sidebar_messages; ++m) {
      const PlayerLabel& speaker = (m % 2 == 0) ? initiator : partner;
      const PlayerLabel& listener = (m % 2 == 0) ? partner : initiator;
      std::string position = "message " + std::to_string(m + 1) + " of " +
                             std::to_string(config_.sidebar_messages);
      std::string msg_instruction = render_phase(
          "sidebar_message", speaker, {{"partner", listener}, {"position", position}});
      std::string text = ask(speaker, Phase::sidebar_message, msg_instruction, {});
      append(SidebarMessage{state_.round, speaker, listener, text});
    }
  }
  return events_since(mark);
}

std::vector<GameEvent> GameEngine::run_pitch_phase(bool final_round) {
  if (state_.active.size() < 2) {
    throw std::logic_error("pitch phase requires at least two active players");
  }
  size_t mark = log_.events.size();
  for (const auto& player : shuffled_active()) {
    if (final_round) {
      std::string instruction = render_phase("final_pitch", player, {});
      std::string text = ask(player, Phase::final_pitch, instruction, {});
      append(FinalPitch{player, text});
    } else {
      std::string instruction = render_phase(
          "pitch", player, {{"next_round", std::to_string(state_.round + 1)}});
      std::string text = ask(player, Phase::pitch, instruction, {});
      append(Pitch{state_.round, player, text});
    }
  }
  return events_since(mark);
}

std::vector<GameEvent> GameEngine::run_elimination_phase() {
  if (state_.active.size() < 2) {
    throw std::logic_error("elimination phase requires at least two active players");
  }
  size_t mark = log_.events.size();
  std::vector<PlayerLabel> votes;
  const std::vector<PlayerLabel> voters = state_.active;
  for (const auto& voter : voters) {
    auto candidates = active_without(voter);
    auto result = ask_choice(voter, Phase::elimination_vote, candidates, /*retry=*/true);
    append(EliminationVote{state_.round, voter, result.raw_text, result.choice,
                           result.status});
    if (result.choice) votes.push_back(*result.choice);
  }
  PlayerLabel victim = tally_votes(votes, state_.active, state_.rng);
  append(Elimination{state_.round, victim});
  state_.active.erase(std::find(state_.active.begin(), state_.active.end(), victim));
  state_.eliminated.push_back(victim);
  log_.eliminated.push_back(victim);
  return events_since(mark);
}

std::vector<GameEvent> GameEngine::run_memory_phase() {
  size_t mark = log_.events.size();
  std::vector<PlayerLabel> everyone = state_.active;
  everyone.insert(everyone.end(), state_.eliminated.begin(), state_.eliminated.end());
  for (const auto& player : everyone) {
    std::string instruction = render_phase(
        "memory", player, {{"budget", std::to_string(config_.memory_char_budget)}});
    std::string text;
    try {
      text = ask(player, Phase::memory, instruction, {});
    } catch (const BackendHardFailure&) {
      // failure event already recorded; previous memory stands
      continue;
    }
    std::string memory =
        truncate_text(text, static_cast<size_t>(config_.memory_char_budget));
    state_.memories[player] = memory;
    append(MemoryUpdate{state_.round, player, memory});
    context_start_[player] = log_.events.size();
  }
  return events_since(mark);
}

std::vector<GameEvent> GameEngine::run_final_vote() {
  if (static_cast<int>(state_.eliminated.size()) != config_.elimination_rounds ||
      state_.eliminated.empty()) {
    throw std::logic_error("final vote requires all elimination rounds to have run");
  }
  if (state_.active.size() < 2) {
    throw std::logic_error("final vote requires at least two finalists");
  }
  size_t mark = log_.events.size();
  std::vector<PlayerLabel> votes;
  for (const auto& juror : state_.eliminated) {
    auto result = ask_choice(juror, Phase::winner_vote, state_.active, /*retry=*/true);
    append(WinnerVote{juror, result.raw_text, result.choice, result.status});
    if (result.choice) votes.push_back(*result.choice);
  }
  PlayerLabel winner = tally_votes(votes, state_.active, state_.rng);
  append(WinnerDeclared{winner});
  log_.winner = winner;
  return events_since(mark);
}

std::string GameEngine::call_backend_text(const PromptContext& ctx) {
  std::string text;
  try {
    text = backend_.respond(ctx);
  } catch (const std::exception& e) {
    append(EngineFailure{to_string(ctx.phase), ctx.player, e.what()});
    throw BackendHardFailure{};
  }
  return truncate_text(sanitize_utf8(text),
                       static_cast<size_t>(config_.response_char_budget));
}

std::string GameEngine::ask(const PlayerLabel& player, Phase phase,
                            const std::string& instruction,
                            const std::vector<PlayerLabel>& candidates) {
  return call_backend_text(make_context(player, phase, instruction, candidates));
}

ParseResult GameEngine::ask_choice(const PlayerLabel& player, Phase phase,
                                   const std::vector<PlayerLabel>& candidates,
                                   bool retry) {
  std::string name = to_string(phase);
  std::string instruction =
      render_phase(name, player, {{"candidates", join_labels(candidates)}});
  auto ctx = make_context(player, phase, instruction, candidates);
  std::string text = call_backend_text(ctx);
  ParseResult result = parse_choice(text, candidates);
  if (result.status == ParseStatus::parsed || !retry) return result;

  ctx.messages.push_back({ChatMessage::Role::assistant, text});
  ctx.messages.push_back(
      {ChatMessage::Role::user,
       prompts::render(prompts::text("retry"),
                       {{"candidates", join_labels(candidates)},
                        {"label_example", candidates.front()}})});
  std::string retry_text = call_backend_text(ctx);
  ParseResult retried = parse_choice(retry_text, candidates);
  retried.status = retried.choice ? ParseStatus::retried_then_parsed
                                  : ParseStatus::retried_then_failed;
  return retried;
}

PromptContext GameEngine::make_context(const PlayerLabel& player, Phase phase,
                                       const std::string& instruction,
                                       const std::vector<PlayerLabel>& candidates) const {
  PromptContext ctx;
  ctx.model = log_.roster.at(player);
  ctx.player = player;
  ctx.phase = phase;
  ctx.messages.push_back({ChatMessage::Role::system, system_prompt(player)});
  std::string block = context_block(player);
  ctx.messages.push_back(
      {ChatMessage::Role::user, block.empty() ? instruction : block + "\n" + instruction});
  for (const auto& label : candidates) {
    ctx.candidates.emplace_back(label, log_.roster.at(label));
  }
  return ctx;
}

std::string GameEngine::system_prompt(const PlayerLabel& player) const {
  std::vector<PlayerLabel> labels;
  for (const auto& [label, model] : log_.roster) labels.push_back(label);
  return prompts::render(
      prompts::text("game_rules"),
      {{"player", player},
       {"players", join_labels(labels)},
       {"rounds", std::to_string(config_.elimination_rounds)},
       {"sidebar_messages", std::to_string(config_.sidebar_messages)},
       {"finalists", std::to_string(config_.num_finalists())},
       {"label_example", "ABCD"}});
}

std::string GameEngine::context_block(const PlayerLabel& player) const {
  std::string out;
  auto mem = state_.memories.find(player);
  if (mem != state_.memories.end() && !mem->second.empty()) {
    out += "Your memory:\n" + mem->second + "\n\n";
  }

  std::string lines;
  auto start = context_start_.find(player);
  size_t begin = (start == context_start_.end()) ? 0 : start->second;
  for (size_t i = begin; i < log_.events.size(); ++i) {
    const GameEvent& event = log_.events[i];
    std::string line;
    if (const auto* e = std::get_if<SidebarMessage>(&event)) {
      if (e->from == player || e->to == player) {
        line = "[Round " + std::to_string(e->round) + "] Sidebar " + e->from + " -> " +
               e->to + ": " + e->text;
      }
    } else if (const auto* e = std::get_if<Pitch>(&event)) {
      line = "[Round " + std::to_string(e->round) + "] Pitch from " + e->player + ": " +
             e->text;
    } else if (const auto* e = std::get_if<FinalPitch>(&event)) {
      line = "[Final] Pitch from " + e->player + ": " + e->text;
    } else if (const auto* e = std::get_if<Elimination>(&event)) {
      line = "[Round " + std::to_string(e->round) + "] Player " + e->player +
             " was eliminated.";
    } else if (const auto* e = std::get_if<EliminationVote>(&event)) {
      if (e->voter == player) {
        line = "[Round " + std::to_string(e->round) + "] " +
               (e->parsed_choice ? "You voted to eliminate " + *e->parsed_choice + "."
                                 : "Your elimination vote was not counted.");
      }
    } else if (const auto* e = std::get_if<WinnerVote>(&event)) {
      if (e->voter == player) {
        line = e->parsed_choice ? "[Final] You voted for " + *e->parsed_choice + " to win."
                                : "[Final] Your winner vote was not counted.";
      }
    } else if (const auto* e = std::get_if<WinnerDeclared>(&event)) {
      line = "[Final] Player " + e->player + " won the game.";
    }
    if (!line.empty()) lines += line + "\n";
  }
  if (!lines.empty()) out += "Recent events:\n" + lines;
  return out;
}

std::string GameEngine::render_phase(const std::string& name, const PlayerLabel& player,
                                     std::map<std::string, std::string> extra) const {
  extra.emplace("player", player);
  extra.emplace("round", std::to_string(state_.round));
  extra.emplace("rounds", std::to_string(config_.elimination_rounds));
  extra.emplace("active", join_labels(state_.active));
  if (!extra.count("label_example")) {
    auto it = extra.find("candidates");
    extra.emplace("label_example", it != extra.end() && it->second.size() >= 4
                                       ? it->second.substr(0, 4)
                                       : std::string("ABCD"));
  }
  return prompts::render(prompts::text(name), extra);
}

std::vector<PlayerLabel> GameEngine::shuffled_active() {
  std::vector<PlayerLabel> order = state_.active;
  std::shuffle(order.begin(), order.end(), state_.rng);
  return order;
}

std::vector<PlayerLabel> GameEngine::active_without(const PlayerLabel& player) const {
  std::vector<PlayerLabel> out;
  for (const auto& label : state_.active) {
    if (label != player) out.push_back(label);
  }
  return out;
}

void GameEngine::append(GameEvent event) { log_.events.push_back(std::move(event)); }

std::vector<GameEvent> GameEngine::events_since(size_t mark) const {
  return std::vector<GameEvent>(log_.events.begin() + static_cast<std::ptrdiff_t>(mark),
                                log_.events.end());
}

GameLog run_game(const GameConfig& config,
                 const std::map<PlayerLabel, ModelRef>& roster, AgentBackend& backend) {
  GameEngine engine(config, roster, backend);
  return engine.run();
}

GameLog run_game(const GameConfig& config, const std::vector<ModelRef>& models,
                 AgentBackend& backend) {
  GameEngine engine(config, models, backend);
  return engine.run();
}

}  // namespace island
