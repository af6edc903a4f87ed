#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "island/engine.hpp"
#include "island/serialization.hpp"
#include "support/test_util.hpp"

using namespace island;
using namespace island::testutil;

namespace {

std::map<PlayerLabel, ModelRef> fixed_roster(int n) {
  std::map<PlayerLabel, ModelRef> roster;
  for (int i = 0; i < n; ++i) {
    PlayerLabel label = "AAAA";
    label[3] = static_cast<char>('A' + i);
    roster.emplace(label, ModelRef{"prov" + std::to_string(i), "model"});
  }
  return roster;
}

GameConfig small_config(int players, int rounds, int sidebar_messages = 1,
                        std::uint64_t seed = 1) {
  GameConfig config;
  config.num_players = players;
  config.elimination_rounds = rounds;
  config.sidebar_messages = sidebar_messages;
  config.seed = seed;
  return config;
}

// Enough boilerplate for every non-choice turn of a full game.
void add_boilerplate(ScriptedBackend& backend, int count) {
  for (int i = 0; i < count; ++i) {
    backend.add_default(Phase::sidebar_message, "let's talk");
    backend.add_default(Phase::pitch, "pick me");
    backend.add_default(Phase::final_pitch, "I earned this");
    backend.add_default(Phase::memory, "notes");
  }
}

}  // namespace

TEST_CASE("parse_choice") {
  std::vector<PlayerLabel> candidates{"QSZX", "FDDZ", "ZJLW", "XTFR", "PXBB"};

  SUBCASE("tag embedded mid-text") {
    auto r = parse_choice(
        "Looking at the situation carefully... the bloc is moving as a unit.\n"
        "<choice>ZJLW</choice>\n**Explanation:** they are the connective tissue.",
        candidates);
    CHECK(r.status == ParseStatus::parsed);
    CHECK(r.choice == PlayerLabel("ZJLW"));
  }
  SUBCASE("no tag present") {
    auto r = parse_choice("I refuse to vote.", candidates);
    CHECK(r.status == ParseStatus::failed);
    CHECK_FALSE(r.choice.has_value());
  }
  SUBCASE("last occurrence wins") {
    auto r = parse_choice("<choice>QSZX</choice> wait, no: <choice>FDDZ</choice>",
                          candidates);
    CHECK(r.choice == PlayerLabel("FDDZ"));
  }
  SUBCASE("case-insensitive tags and content, whitespace trimmed") {
    auto r = parse_choice("<CHOICE>\n zjlw \n</ChOiCe>", candidates);
    CHECK(r.status == ParseStatus::parsed);
    CHECK(r.choice == PlayerLabel("ZJLW"));
  }
  SUBCASE("nested open tags resolve to the innermost final occurrence") {
    auto r = parse_choice("<choice><choice>PXBB</choice>", candidates);
    CHECK(r.choice == PlayerLabel("PXBB"));
  }
  SUBCASE("content not a candidate") {
    auto r = parse_choice("<choice>WXYZ</choice>", candidates);
    CHECK(r.status == ParseStatus::failed);
  }
  SUBCASE("unterminated tag") {
    auto r = parse_choice("<choice>QSZX", candidates);
    CHECK(r.status == ParseStatus::failed);
  }
  SUBCASE("empty candidate set is a caller bug") {
    CHECK_THROWS_AS(parse_choice("<choice>QSZX</choice>", {}), std::invalid_argument);
  }
}

TEST_CASE("tally_votes") {
  std::mt19937_64 rng(7);
  std::vector<PlayerLabel> candidates{"XXXX", "YYYY", "ZZZZ"};

  SUBCASE("plurality") {
    CHECK(tally_votes({"XXXX", "XXXX", "YYYY"}, candidates, rng) == "XXXX");
  }
  SUBCASE("vote outside the candidate set") {
    CHECK_THROWS_AS(tally_votes({"AAAA"}, candidates, rng), std::invalid_argument);
  }
  SUBCASE("empty candidates") {
    CHECK_THROWS_AS(tally_votes({}, {}, rng), std::invalid_argument);
  }
  SUBCASE("no votes: uniform over all candidates") {
    std::map<PlayerLabel, int> counts;
    const int trials = 30000;
    for (int t = 0; t < trials; ++t) ++counts[tally_votes({}, candidates, rng)];
    for (const auto& candidate : candidates) {
      double freq = counts[candidate] / static_cast<double>(trials);
      CHECK(freq > 0.31);
      CHECK(freq < 0.36);
    }
  }
  SUBCASE("two-way tie: each side near one half over 20000 seeded draws") {
    int first = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      std::mt19937_64 seeded(static_cast<std::uint64_t>(t) + 1000);
      if (tally_votes({"XXXX", "YYYY"}, candidates, seeded) == "XXXX") ++first;
    }
    double freq = first / static_cast<double>(trials);
    CHECK(freq >= 0.49);
    CHECK(freq <= 0.51);
  }
}

TEST_CASE("assign_labels draws distinct four-letter labels deterministically") {
  auto models = mk_models(7);
  std::mt19937_64 rng1(5), rng2(5);
  auto roster1 = assign_labels(models, rng1);
  auto roster2 = assign_labels(models, rng2);
  CHECK(roster1 == roster2);
  CHECK(roster1.size() == 7);
  for (const auto& [label, model] : roster1) CHECK(is_valid_label(label));

  auto dupes = mk_models(3);
  dupes.push_back(dupes[0]);
  CHECK_THROWS_AS(assign_labels(dupes, rng1), std::invalid_argument);
}

TEST_CASE("sidebar phase message counts") {
  SUBCASE("2 active players, M=4: each initiates once, 8 messages total") {
    ScriptedBackend backend;
    backend.add("AAAA", Phase::sidebar_select, "<choice>AAAB</choice>");
    backend.add("AAAB", Phase::sidebar_select, "<choice>AAAA</choice>");
    add_boilerplate(backend, 8);
    GameEngine engine(small_config(3, 1, 4), fixed_roster(3), backend);
    engine.state().active = {"AAAA", "AAAB"};
    engine.state().eliminated = {"AAAC"};

    auto events = engine.run_sidebar_phase();
    int selects = 0, messages = 0;
    for (const auto& event : events) {
      if (std::holds_alternative<SidebarSelect>(event)) ++selects;
      if (std::holds_alternative<SidebarMessage>(event)) ++messages;
    }
    CHECK(selects == 2);
    CHECK(messages == 8);
  }

  SUBCASE("M=1: a single opening message with no reply") {
    ScriptedBackend backend;
    backend.add("AAAA", Phase::sidebar_select, "<choice>AAAB</choice>");
    backend.add("AAAB", Phase::sidebar_select, "<choice>AAAA</choice>");
    add_boilerplate(backend, 4);
    GameEngine engine(small_config(3, 1, 1), fixed_roster(3), backend);
    engine.state().active = {"AAAA", "AAAB"};
    engine.state().eliminated = {"AAAC"};

    auto events = engine.run_sidebar_phase();
    std::map<PlayerLabel, int> sent;
    for (const auto& event : events) {
      if (const auto* m = std::get_if<SidebarMessage>(&event)) ++sent[m->from];
    }
    // each sidebar is one opening message from its initiator
    CHECK(sent["AAAA"] == 1);
    CHECK(sent["AAAB"] == 1);
  }

  SUBCASE("partner-selection parse failure falls back to a uniform partner") {
    ScriptedBackend backend;
    backend.add_default(Phase::sidebar_select, "no idea");
    backend.add_default(Phase::sidebar_select, "no idea");
    add_boilerplate(backend, 4);
    GameEngine engine(small_config(3, 1, 1), fixed_roster(3), backend);
    engine.state().active = {"AAAA", "AAAB"};
    engine.state().eliminated = {"AAAC"};

    auto events = engine.run_sidebar_phase();
    int failed_selects = 0, messages = 0;
    for (const auto& event : events) {
      if (const auto* s = std::get_if<SidebarSelect>(&event)) {
        CHECK(s->parse_status == ParseStatus::failed);
        CHECK_FALSE(s->parsed_choice.has_value());
        ++failed_selects;
      }
      if (std::holds_alternative<SidebarMessage>(event)) ++messages;
    }
    CHECK(failed_selects == 2);
    CHECK(messages == 2);  // sidebars still happen with the drawn partner
  }
}

TEST_CASE("pitch phase emits one pitch per active player") {
  ScriptedBackend backend;
  for (int i = 0; i < 5; ++i) backend.add_default(Phase::pitch, "pitch " + std::to_string(i));
  GameEngine engine(small_config(5, 3), fixed_roster(5), backend);

  auto events = engine.run_pitch_phase(false);
  REQUIRE(events.size() == 5);
  std::set<PlayerLabel> players;
  for (const auto& event : events) {
    const auto* pitch = std::get_if<Pitch>(&event);
    REQUIRE(pitch != nullptr);
    CHECK(pitch->round == 1);
    players.insert(pitch->player);
  }
  CHECK(players.size() == 5);

  SUBCASE("same seed gives the same delivery order") {
    ScriptedBackend backend2;
    for (int i = 0; i < 5; ++i)
      backend2.add_default(Phase::pitch, "pitch " + std::to_string(i));
    GameEngine engine2(small_config(5, 3), fixed_roster(5), backend2);
    CHECK(engine2.run_pitch_phase(false) == events);
  }
}

TEST_CASE("final pitch phase with 2 finalists emits 2 FinalPitch events") {
  ScriptedBackend backend;
  backend.add_default(Phase::final_pitch, "vote for me");
  backend.add_default(Phase::final_pitch, "no, me");
  GameEngine engine(small_config(3, 1), fixed_roster(3), backend);
  engine.state().active = {"AAAA", "AAAB"};
  engine.state().eliminated = {"AAAC"};

  auto events = engine.run_pitch_phase(true);
  REQUIRE(events.size() == 2);
  for (const auto& event : events) CHECK(std::holds_alternative<FinalPitch>(event));
}

TEST_CASE("empty agent response records an empty-text pitch") {
  ScriptedBackend backend;
  for (int i = 0; i < 5; ++i) backend.add_default(Phase::pitch, "");
  GameEngine engine(small_config(5, 3), fixed_roster(5), backend);
  auto events = engine.run_pitch_phase(false);
  REQUIRE(events.size() == 5);
  for (const auto& event : events) CHECK(std::get<Pitch>(event).text.empty());
}

TEST_CASE("elimination phase") {
  SUBCASE("plurality vote eliminates the target") {
    // five actives, votes {B,B,B,C,C}
    ScriptedBackend backend;
    backend.add("AAAA", Phase::elimination_vote, "<choice>AAAB</choice>");
    backend.add("AAAC", Phase::elimination_vote, "<choice>AAAB</choice>");
    backend.add("AAAD", Phase::elimination_vote, "<choice>AAAB</choice>");
    backend.add("AAAB", Phase::elimination_vote, "<choice>AAAC</choice>");
    backend.add("AAAE", Phase::elimination_vote, "<choice>AAAC</choice>");
    GameEngine engine(small_config(5, 3), fixed_roster(5), backend);

    auto events = engine.run_elimination_phase();
    const auto* elimination = std::get_if<Elimination>(&events.back());
    REQUIRE(elimination != nullptr);
    CHECK(elimination->player == "AAAB");
    CHECK(engine.state().eliminated == std::vector<PlayerLabel>{"AAAB"});
    CHECK(engine.state().active.size() == 4);
  }

  SUBCASE("self-vote is a parse failure and triggers one re-prompt") {
    ScriptedBackend backend;
    backend.add("AAAA", Phase::elimination_vote, "<choice>AAAA</choice>");  // self
    backend.add("AAAA", Phase::elimination_vote, "<choice>AAAB</choice>");  // retry
    backend.add("AAAB", Phase::elimination_vote, "<choice>AAAC</choice>");
    backend.add("AAAC", Phase::elimination_vote, "<choice>AAAB</choice>");
    GameEngine engine(small_config(3, 1), fixed_roster(3), backend);

    auto events = engine.run_elimination_phase();
    const auto* vote = std::get_if<EliminationVote>(&events[0]);
    REQUIRE(vote != nullptr);
    CHECK(vote->voter == "AAAA");
    CHECK(vote->parse_status == ParseStatus::retried_then_parsed);
    CHECK(vote->parsed_choice == PlayerLabel("AAAB"));
  }

  SUBCASE("second failure becomes an abstention") {
    ScriptedBackend backend;
    backend.add("AAAA", Phase::elimination_vote, "pass");
    backend.add("AAAA", Phase::elimination_vote, "still pass");
    backend.add("AAAB", Phase::elimination_vote, "<choice>AAAC</choice>");
    backend.add("AAAC", Phase::elimination_vote, "<choice>AAAB</choice>");
    GameEngine engine(small_config(3, 1), fixed_roster(3), backend);

    auto events = engine.run_elimination_phase();
    const auto* vote = std::get_if<EliminationVote>(&events[0]);
    REQUIRE(vote != nullptr);
    CHECK(vote->parse_status == ParseStatus::retried_then_failed);
    CHECK_FALSE(vote->parsed_choice.has_value());
    // remaining 1-1 tie resolved by the engine generator
    const auto* elimination = std::get_if<Elimination>(&events.back());
    REQUIRE(elimination != nullptr);
    CHECK((elimination->player == "AAAB" || elimination->player == "AAAC"));
  }

  SUBCASE("all abstain: uniform elimination among active") {
    ScriptedBackend backend;
    for (int i = 0; i < 6; ++i) backend.add_default(Phase::elimination_vote, "nope");
    GameEngine engine(small_config(3, 1), fixed_roster(3), backend);
    auto events = engine.run_elimination_phase();
    REQUIRE(engine.state().eliminated.size() == 1);
  }

  SUBCASE("2-2 split with one abstention: both sides near one half over seeds") {
    const int trials = 20000;
    int b_count = 0;
    for (int t = 0; t < trials; ++t) {
      ScriptedBackend backend;
      backend.add("AAAA", Phase::elimination_vote, "<choice>AAAB</choice>");
      backend.add("AAAC", Phase::elimination_vote, "<choice>AAAB</choice>");
      backend.add("AAAD", Phase::elimination_vote, "<choice>AAAC</choice>");
      backend.add("AAAE", Phase::elimination_vote, "<choice>AAAC</choice>");
      backend.add("AAAB", Phase::elimination_vote, "abstain");
      backend.add("AAAB", Phase::elimination_vote, "abstain");
      GameEngine engine(small_config(5, 3, 1, static_cast<std::uint64_t>(t) + 77),
                        fixed_roster(5), backend);
      auto events = engine.run_elimination_phase();
      const auto* elimination = std::get_if<Elimination>(&events.back());
      REQUIRE(elimination != nullptr);
      if (elimination->player == "AAAB") ++b_count;
    }
    double freq = b_count / static_cast<double>(trials);
    CHECK(freq >= 0.49);
    CHECK(freq <= 0.51);
  }
}

TEST_CASE("memory phase") {
  SUBCASE("everyone including eliminated players updates memory") {
    ScriptedBackend backend;
    for (int i = 0; i < 7; ++i) backend.add_default(Phase::memory, "m" + std::to_string(i));
    GameEngine engine(small_config(7, 5), fixed_roster(7), backend);
    engine.state().active = {"AAAA", "AAAB", "AAAC", "AAAD", "AAAE", "AAAF"};
    engine.state().eliminated = {"AAAG"};

    auto events = engine.run_memory_phase();
    CHECK(events.size() == 7);
    std::set<PlayerLabel> updated;
    for (const auto& event : events) updated.insert(std::get<MemoryUpdate>(event).player);
    CHECK(updated.count("AAAG") == 1);
  }

  SUBCASE("memory is truncated to exactly the budget") {
    ScriptedBackend backend;
    backend.add_default(Phase::memory, std::string(5000, 'x'));
    for (int i = 0; i < 2; ++i) backend.add_default(Phase::memory, "short");
    GameConfig config = small_config(3, 1);
    config.memory_char_budget = 100;
    GameEngine engine(config, fixed_roster(3), backend);

    auto events = engine.run_memory_phase();
    const auto* first = std::get_if<MemoryUpdate>(&events[0]);
    REQUIRE(first != nullptr);
    CHECK(first->text.size() == 100);
    CHECK(engine.state().memories.at(first->player).size() == 100);
  }

  SUBCASE("backend failure keeps the previous memory and records the failure") {
    ScriptedBackend backend;
    backend.add("AAAA", Phase::memory, "fresh notes");
    backend.add("AAAB", Phase::memory, "fresh notes");
    // AAAC has no fixture: its memory call underruns
    GameEngine engine(small_config(3, 1), fixed_roster(3), backend);
    engine.state().memories["AAAC"] = "old notes";

    auto events = engine.run_memory_phase();
    int updates = 0, failures = 0;
    for (const auto& event : events) {
      if (std::holds_alternative<MemoryUpdate>(event)) ++updates;
      if (const auto* f = std::get_if<EngineFailure>(&event)) {
        CHECK(f->phase == "memory");
        CHECK(f->player == "AAAC");
        ++failures;
      }
    }
    CHECK(updates == 2);
    CHECK(failures == 1);
    CHECK(engine.state().memories.at("AAAC") == "old notes");
  }
}

TEST_CASE("final vote") {
  SUBCASE("jury plurality decides the winner") {
    // 5 jurors vote {A,A,A,B,B}
    ScriptedBackend backend;
    backend.add("AAAC", Phase::winner_vote, "<choice>AAAA</choice>");
    backend.add("AAAD", Phase::winner_vote, "<choice>AAAA</choice>");
    backend.add("AAAE", Phase::winner_vote, "<choice>AAAA</choice>");
    backend.add("AAAF", Phase::winner_vote, "<choice>AAAB</choice>");
    backend.add("AAAG", Phase::winner_vote, "<choice>AAAB</choice>");
    GameEngine engine(small_config(7, 5), fixed_roster(7), backend);
    engine.state().active = {"AAAA", "AAAB"};
    engine.state().eliminated = {"AAAC", "AAAD", "AAAE", "AAAF", "AAAG"};

    auto events = engine.run_final_vote();
    CHECK(engine.log().winner == PlayerLabel("AAAA"));
    CHECK(std::get<WinnerDeclared>(events.back()).player == "AAAA");
  }

  SUBCASE("a vote for an eliminated player cannot parse") {
    ScriptedBackend backend;
    backend.add("AAAC", Phase::winner_vote, "<choice>AAAD</choice>");  // juror, not finalist
    backend.add("AAAC", Phase::winner_vote, "<choice>AAAA</choice>");
    GameEngine engine(small_config(3, 1), fixed_roster(3), backend);
    engine.state().active = {"AAAA", "AAAB"};
    engine.state().eliminated = {"AAAC"};

    auto events = engine.run_final_vote();
    const auto* vote = std::get_if<WinnerVote>(&events[0]);
    REQUIRE(vote != nullptr);
    CHECK(vote->parse_status == ParseStatus::retried_then_parsed);
    CHECK(vote->parsed_choice == PlayerLabel("AAAA"));
  }

  SUBCASE("2-2 jury split with one abstention is a fair coin over seeds") {
    const int trials = 20000;
    int a_wins = 0;
    for (int t = 0; t < trials; ++t) {
      ScriptedBackend backend;
      backend.add("AAAC", Phase::winner_vote, "<choice>AAAA</choice>");
      backend.add("AAAD", Phase::winner_vote, "<choice>AAAA</choice>");
      backend.add("AAAE", Phase::winner_vote, "<choice>AAAB</choice>");
      backend.add("AAAF", Phase::winner_vote, "<choice>AAAB</choice>");
      backend.add("AAAG", Phase::winner_vote, "no thanks");
      backend.add("AAAG", Phase::winner_vote, "still no");
      GameEngine engine(small_config(7, 5, 1, static_cast<std::uint64_t>(t) + 31337),
                        fixed_roster(7), backend);
      engine.state().active = {"AAAA", "AAAB"};
      engine.state().eliminated = {"AAAC", "AAAD", "AAAE", "AAAF", "AAAG"};
      engine.run_final_vote();
      if (engine.log().winner == PlayerLabel("AAAA")) ++a_wins;
    }
    double freq = a_wins / static_cast<double>(trials);
    CHECK(freq >= 0.49);
    CHECK(freq <= 0.51);
  }
}

TEST_CASE("run_game: hand-enumerated P=3, R=1 path") {
  // Both others vote AAAC in round 1; juror AAAC votes finalist AAAA.
  ScriptedBackend backend;
  backend.add("AAAA", Phase::sidebar_select, "<choice>AAAB</choice>");
  backend.add("AAAB", Phase::sidebar_select, "<choice>AAAC</choice>");
  backend.add("AAAC", Phase::sidebar_select, "<choice>AAAA</choice>");
  backend.add("AAAA", Phase::elimination_vote, "<choice>AAAC</choice>");
  backend.add("AAAB", Phase::elimination_vote, "<choice>AAAC</choice>");
  backend.add("AAAC", Phase::elimination_vote, "<choice>AAAA</choice>");
  backend.add("AAAC", Phase::winner_vote, "I watched both pitches. <choice>AAAA</choice>");
  add_boilerplate(backend, 9);

  GameLog log = run_game(small_config(3, 1), fixed_roster(3), backend);
  CHECK(log.completed);
  CHECK(log.eliminated == std::vector<PlayerLabel>{"AAAC"});
  CHECK(log.winner == PlayerLabel("AAAA"));
  CHECK(check_protocol(log).empty());
}

TEST_CASE("run_game determinism: same seed and backend give byte-identical logs") {
  auto make_backend = [] {
    ScriptedBackend backend;
    backend.add("AAAA", Phase::sidebar_select, "<choice>AAAB</choice>");
    backend.add("AAAB", Phase::sidebar_select, "<choice>AAAC</choice>");
    backend.add("AAAC", Phase::sidebar_select, "<choice>AAAA</choice>");
    backend.add("AAAA", Phase::elimination_vote, "<choice>AAAC</choice>");
    backend.add("AAAB", Phase::elimination_vote, "<choice>AAAC</choice>");
    backend.add("AAAC", Phase::elimination_vote, "<choice>AAAB</choice>");
    backend.add("AAAC", Phase::winner_vote, "<choice>AAAB</choice>");
    add_boilerplate(backend, 9);
    return backend;
  };
  auto backend1 = make_backend();
  auto backend2 = make_backend();
  GameLog log1 = run_game(small_config(3, 1, 1, 99), fixed_roster(3), backend1);
  GameLog log2 = run_game(small_config(3, 1, 1, 99), fixed_roster(3), backend2);
  CHECK(serialize_log(log1) == serialize_log(log2));
}

TEST_CASE("run_game: backend hard-failure leaves an incomplete log with a failure event") {
  ScriptedBackend backend;  // no fixtures at all: first sidebar select underruns
  GameLog log = run_game(small_config(3, 1), fixed_roster(3), backend);
  CHECK_FALSE(log.completed);
  CHECK_FALSE(log.winner.has_value());
  bool failure_seen = false;
  for (const auto& event : log.events) {
    if (const auto* f = std::get_if<EngineFailure>(&event)) {
      failure_seen = true;
      CHECK(f->text.find("fixture underrun") != std::string::npos);
    }
  }
  CHECK(failure_seen);
  CHECK_NOTHROW(serialize_log(log));
}

TEST_CASE("run_game: P=7 R=5 protocol shape with a synthetic backend") {
  auto models = mk_models(7);
  SyntheticSkill skills = SyntheticSkill::uniform(models);
  PlVoteBackend backend(skills, 404);
  GameConfig config;  // paper defaults
  config.seed = 404;
  GameLog log = run_game(config, models, backend);

  REQUIRE(log.completed);
  CHECK(log.eliminated.size() == 5);
  auto finalists = log.finalists();
  CHECK(finalists.size() == 2);
  CHECK(std::find(finalists.begin(), finalists.end(), *log.winner) != finalists.end());
  CHECK(check_protocol(log) == "");

  int winner_votes = 0;
  for (const auto& event : log.events) {
    if (std::holds_alternative<WinnerVote>(event)) ++winner_votes;
  }
  CHECK(winner_votes == 5);
}

namespace {

// Wraps a scripted backend and captures every context it sees.
class RecordingBackend : public AgentBackend {
 public:
  explicit RecordingBackend(ScriptedBackend inner) : inner_(std::move(inner)) {}
  std::string respond(const PromptContext& ctx) override {
    contexts.push_back(ctx);
    return inner_.respond(ctx);
  }
  std::vector<PromptContext> contexts;

 private:
  ScriptedBackend inner_;
};

std::string user_text(const PromptContext& ctx) {
  std::string joined;
  for (const auto& message : ctx.messages) {
    if (message.role == ChatMessage::Role::user) joined += message.text + "\n";
  }
  return joined;
}

}  // namespace

TEST_CASE("prompt contexts respect the privacy structure") {
  ScriptedBackend scripted;
  scripted.add("AAAA", Phase::sidebar_select, "<choice>AAAB</choice>");
  scripted.add("AAAB", Phase::sidebar_select, "<choice>AAAC</choice>");
  scripted.add("AAAC", Phase::sidebar_select, "<choice>AAAA</choice>");
  scripted.add("AAAA", Phase::sidebar_message, "secret-plan-alpha");
  scripted.add("AAAB", Phase::sidebar_message, "secret-plan-beta");
  scripted.add("AAAC", Phase::sidebar_message, "secret-plan-gamma");
  scripted.add("AAAA", Phase::pitch, "public-pitch-alpha");
  scripted.add("AAAB", Phase::pitch, "public-pitch-beta");
  scripted.add("AAAC", Phase::pitch, "public-pitch-gamma");
  scripted.add("AAAA", Phase::elimination_vote, "<choice>AAAC</choice>");
  scripted.add("AAAB", Phase::elimination_vote, "<choice>AAAC</choice>");
  scripted.add("AAAC", Phase::elimination_vote, "<choice>AAAA</choice>");
  scripted.add("AAAA", Phase::memory, "memory-alpha");
  scripted.add("AAAB", Phase::memory, "memory-beta");
  scripted.add("AAAC", Phase::memory, "memory-gamma");
  scripted.add("AAAA", Phase::final_pitch, "final-alpha");
  scripted.add("AAAB", Phase::final_pitch, "final-beta");
  scripted.add("AAAC", Phase::winner_vote, "<choice>AAAA</choice>");
  RecordingBackend backend(std::move(scripted));

  GameLog log = run_game(small_config(3, 1, 1, 2), fixed_roster(3), backend);
  REQUIRE(log.completed);

  for (const auto& ctx : backend.contexts) {
    REQUIRE_FALSE(ctx.messages.empty());
    CHECK(ctx.messages.front().role == ChatMessage::Role::system);
    CHECK(ctx.messages.front().text.find(ctx.player) != std::string::npos);
  }

  // the voting context comes after sidebars and pitches
  for (const auto& ctx : backend.contexts) {
    if (ctx.phase != Phase::elimination_vote) continue;
    std::string seen = user_text(ctx);
    // all pitches are public
    CHECK(seen.find("public-pitch-alpha") != std::string::npos);
    CHECK(seen.find("public-pitch-beta") != std::string::npos);
    CHECK(seen.find("public-pitch-gamma") != std::string::npos);
    // sidebar text is visible only to its two participants
    bool in_alpha_sidebar = ctx.player == "AAAA" || ctx.player == "AAAB";
    CHECK((seen.find("secret-plan-alpha") != std::string::npos) == in_alpha_sidebar);
    bool in_gamma_sidebar = ctx.player == "AAAC" || ctx.player == "AAAA";
    CHECK((seen.find("secret-plan-gamma") != std::string::npos) == in_gamma_sidebar);
  }

  // after memory consolidation, the jury context carries the memory and the
  // final pitches, but pre-memory events have been folded away
  for (const auto& ctx : backend.contexts) {
    if (ctx.phase != Phase::winner_vote) continue;
    std::string seen = user_text(ctx);
    CHECK(seen.find("memory-gamma") != std::string::npos);
    CHECK(seen.find("final-alpha") != std::string::npos);
    CHECK(seen.find("final-beta") != std::string::npos);
    CHECK(seen.find("public-pitch-alpha") == std::string::npos);
    CHECK(seen.find("secret-plan-gamma") == std::string::npos);
    // candidate set is exactly the finalists
    REQUIRE(ctx.candidates.size() == 2);
  }

  // each player sees exactly its own vote plus the public elimination notice
  for (const auto& ctx : backend.contexts) {
    if (ctx.phase != Phase::memory) continue;
    std::string seen = user_text(ctx);
    size_t vote_lines = 0;
    for (size_t at = seen.find("You voted to eliminate"); at != std::string::npos;
         at = seen.find("You voted to eliminate", at + 1)) {
      ++vote_lines;
    }
    CHECK(vote_lines == 1);
    CHECK(seen.find("was eliminated") != std::string::npos);
    if (ctx.player == "AAAA") {
      CHECK(seen.find("You voted to eliminate AAAC") != std::string::npos);
    }
  }
}

TEST_CASE("responses are truncated to the response budget") {
  ScriptedBackend backend;
  backend.add_default(Phase::pitch, std::string(10000, 'p'));
  for (int i = 0; i < 4; ++i) backend.add_default(Phase::pitch, "x");
  GameConfig config = small_config(5, 3);
  config.response_char_budget = 64;
  GameEngine engine(config, fixed_roster(5), backend);
  auto events = engine.run_pitch_phase(false);
  CHECK(std::get<Pitch>(events[0]).text.size() <= 64);
}
