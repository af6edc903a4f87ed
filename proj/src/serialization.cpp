#include "island/serialization.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>

#include "json.hpp"

namespace island {

namespace {

using nlohmann::json;

json parse_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing required field \"" + key + "\"");
  return j.at(key);
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  json v = parse_field(j, key, where);
  if (!v.is_string()) throw SchemaError(where + "." + key + ": expected string");
  return v.get<std::string>();
}

int get_int(const json& j, const char* key, const std::string& where) {
  json v = parse_field(j, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + "." + key + ": expected integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& j, const char* key, const std::string& where) {
  json v = parse_field(j, key, where);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw SchemaError(where + "." + key + ": expected unsigned integer");
  }
  return v.get<std::uint64_t>();
}

json config_to_json(const GameConfig& c) {
  return json{{"num_players", c.num_players},
              {"elimination_rounds", c.elimination_rounds},
              {"sidebar_messages", c.sidebar_messages},
              {"seed", c.seed},
              {"memory_char_budget", c.memory_char_budget},
              {"response_char_budget", c.response_char_budget}};
}

GameConfig config_from_json(const json& j) {
  GameConfig c;
  c.num_players = get_int(j, "num_players", "config");
  c.elimination_rounds = get_int(j, "elimination_rounds", "config");
  c.sidebar_messages = get_int(j, "sidebar_messages", "config");
  c.seed = get_u64(j, "seed", "config");
  c.memory_char_budget = get_int(j, "memory_char_budget", "config");
  c.response_char_budget = get_int(j, "response_char_budget", "config");
  return c;
}

void put_choice(json& j, const std::optional<PlayerLabel>& choice, ParseStatus status) {
  if (choice) j["parsed_choice"] = *choice;
  j["parse_status"] = to_string(status);
}

struct EventWriter {
  json operator()(const SidebarSelect& e) const {
    json j{{"type", "sidebar_select"}, {"round", e.round}, {"player", e.player},
           {"raw_text", e.raw_text}};
    put_choice(j, e.parsed_choice, e.parse_status);
    return j;
  }
  json operator()(const SidebarMessage& e) const {
    return json{{"type", "sidebar_message"}, {"round", e.round}, {"from", e.from},
                {"to", e.to}, {"text", e.text}};
  }
  json operator()(const Pitch& e) const {
    return json{{"type", "pitch"}, {"round", e.round}, {"player", e.player},
                {"text", e.text}};
  }
  json operator()(const EliminationVote& e) const {
    json j{{"type", "elimination_vote"}, {"round", e.round}, {"voter", e.voter},
           {"raw_text", e.raw_text}};
    put_choice(j, e.parsed_choice, e.parse_status);
    return j;
  }
  json operator()(const Elimination& e) const {
    return json{{"type", "elimination"}, {"round", e.round}, {"player", e.player}};
  }
  json operator()(const MemoryUpdate& e) const {
    return json{{"type", "memory_update"}, {"round", e.round}, {"player", e.player},
                {"text", e.text}};
  }
  json operator()(const FinalPitch& e) const {
    return json{{"type", "final_pitch"}, {"player", e.player}, {"text", e.text}};
  }
  json operator()(const WinnerVote& e) const {
    json j{{"type", "winner_vote"}, {"voter", e.voter}, {"raw_text", e.raw_text}};
    put_choice(j, e.parsed_choice, e.parse_status);
    return j;
  }
  json operator()(const WinnerDeclared& e) const {
    return json{{"type", "winner_declared"}, {"player", e.player}};
  }
  json operator()(const ReasoningTrace& e) const {
    return json{{"type", "reasoning_trace"}, {"round", e.round}, {"player", e.player},
                {"text", e.text}};
  }
  json operator()(const EngineFailure& e) const {
    return json{{"type", "failure"}, {"phase", e.phase}, {"player", e.player},
                {"text", e.text}};
  }
};

std::optional<PlayerLabel> get_choice(const json& j, const std::string& where) {
  if (!j.contains("parsed_choice")) return std::nullopt;
  if (!j.at("parsed_choice").is_string()) {
    throw SchemaError(where + ".parsed_choice: expected string");
  }
  return j.at("parsed_choice").get<std::string>();
}

GameEvent event_from_json(const json& j, size_t index) {
  std::string where = "events[" + std::to_string(index) + "]";
  if (!j.is_object()) throw SchemaError(where + ": expected object");
  std::string type = get_string(j, "type", where);

  auto status = [&] {
    return parse_status_from_string(get_string(j, "parse_status", where));
  };

  if (type == "sidebar_select") {
    return SidebarSelect{get_int(j, "round", where), get_string(j, "player", where),
                         get_string(j, "raw_text", where), get_choice(j, where), status()};
  }
  if (type == "sidebar_message") {
    return SidebarMessage{get_int(j, "round", where), get_string(j, "from", where),
                          get_string(j, "to", where), get_string(j, "text", where)};
  }
  if (type == "pitch") {
    return Pitch{get_int(j, "round", where), get_string(j, "player", where),
                 get_string(j, "text", where)};
  }
  if (type == "elimination_vote") {
    return EliminationVote{get_int(j, "round", where), get_string(j, "voter", where),
                           get_string(j, "raw_text", where), get_choice(j, where),
                           status()};
  }
  if (type == "elimination") {
    return Elimination{get_int(j, "round", where), get_string(j, "player", where)};
  }
  if (type == "memory_update") {
    return MemoryUpdate{get_int(j, "round", where), get_string(j, "player", where),
                        get_string(j, "text", where)};
  }
  if (type == "final_pitch") {
    return FinalPitch{get_string(j, "player", where), get_string(j, "text", where)};
  }
  if (type == "winner_vote") {
    return WinnerVote{get_string(j, "voter", where), get_string(j, "raw_text", where),
                      get_choice(j, where), status()};
  }
  if (type == "winner_declared") {
    return WinnerDeclared{get_string(j, "player", where)};
  }
  if (type == "reasoning_trace") {
    return ReasoningTrace{get_int(j, "round", where), get_string(j, "player", where),
                          get_string(j, "text", where)};
  }
  if (type == "failure") {
    return EngineFailure{get_string(j, "phase", where), get_string(j, "player", where),
                         get_string(j, "text", where)};
  }
  throw SchemaError(where + ".type: unknown event type \"" + type + "\"");
}

}  // namespace

std::string serialize_log(const GameLog& log) {
  log.validate();  // invariant violations are caller bugs
  json j;
  j["schema_version"] = kSchemaVersion;
  j["game_id"] = log.game_id;
  j["config"] = config_to_json(log.config);
  json roster = json::object();
  for (const auto& [label, model] : log.roster) roster[label] = model.id();
  j["roster"] = roster;
  json events = json::array();
  for (const auto& event : log.events) events.push_back(std::visit(EventWriter{}, event));
  j["events"] = events;
  j["eliminated"] = log.eliminated;
  if (log.winner) {
    j["winner"] = *log.winner;
  } else {
    j["winner"] = nullptr;
  }
  j["completed"] = log.completed;
  return j.dump() + "\n";
}

GameLog parse_game_log(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed encoding: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("malformed encoding: top level is not an object");

  int version = get_int(j, "schema_version", "log");
  if (version != kSchemaVersion) {
    throw SchemaError("schema_version: unsupported version " + std::to_string(version));
  }

  GameLog log;
  log.game_id = get_string(j, "game_id", "log");
  log.config = config_from_json(parse_field(j, "config", "log"));

  json roster = parse_field(j, "roster", "log");
  if (!roster.is_object()) throw SchemaError("roster: expected object");
  for (const auto& [label, value] : roster.items()) {
    if (!value.is_string()) throw SchemaError("roster." + label + ": expected model id string");
    auto model = ModelRef::try_parse(value.get<std::string>());
    if (!model) throw SchemaError("roster." + label + ": bad model id");
    log.roster.emplace(label, *model);
  }
  if (roster.size() != log.roster.size()) throw SchemaError("roster: duplicate labels");

  json events = parse_field(j, "events", "log");
  if (!events.is_array()) throw SchemaError("events: expected array");
  for (size_t i = 0; i < events.size(); ++i) {
    log.events.push_back(event_from_json(events[i], i));
  }

  json eliminated = parse_field(j, "eliminated", "log");
  if (!eliminated.is_array()) throw SchemaError("eliminated: expected array");
  for (const auto& label : eliminated) {
    if (!label.is_string()) throw SchemaError("eliminated: expected label strings");
    log.eliminated.push_back(label.get<std::string>());
  }

  json winner = parse_field(j, "winner", "log");
  if (winner.is_string()) {
    log.winner = winner.get<std::string>();
  } else if (!winner.is_null()) {
    throw SchemaError("winner: expected string or null");
  }

  json completed = parse_field(j, "completed", "log");
  if (!completed.is_boolean()) throw SchemaError("completed: expected boolean");
  log.completed = completed.get<bool>();

  try {
    log.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return log;
}

std::string serialize_manifest(const Manifest& manifest) {
  manifest.validate();
  json j = json::array();
  for (const auto& entry : manifest.entries) {
    j.push_back(json{{"game_id", entry.game_id}, {"uri", entry.uri}});
  }
  return j.dump() + "\n";
}

Manifest parse_manifest(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed manifest: ") + e.what());
  }
  if (!j.is_array()) throw SchemaError("manifest: expected JSON array");
  Manifest manifest;
  for (size_t i = 0; i < j.size(); ++i) {
    std::string where = "manifest[" + std::to_string(i) + "]";
    manifest.entries.push_back(ManifestEntry{get_string(j[i], "game_id", where),
                                             get_string(j[i], "uri", where)});
  }
  try {
    manifest.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return manifest;
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path().empty() ? "." : path.parent_path();
  static std::atomic<unsigned> counter{0};
  fs::path tmp = dir / (path.filename().string() + ".tmp" +
                        std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_log(const GameLog& log, const std::filesystem::path& path) {
  atomic_write(path, serialize_log(log));
}

GameLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_game_log(bytes);
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest(bytes);
}

std::vector<GameLog> load_log_dir(const std::filesystem::path& dir,
                                  std::vector<std::string>* errors) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<GameLog> logs;
  for (const auto& path : paths) {
    try {
      logs.push_back(load_log(path));
    } catch (const std::exception& e) {
      if (errors) errors->push_back(path.string() + ": " + e.what());
    }
  }
  return logs;
}

}  // namespace island
