#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "island/game_log.hpp"
#include "island/model_ref.hpp"

namespace island {

// One game reduced to the data the rating model sees: who played, who won.
struct OutcomeRecord {
  std::string game_id;
  std::vector<ModelRef> players;
  ModelRef winner;
};

struct SamplerConfig {
  double alpha0 = 1.0;
  double tau0 = 1.0;
  int iterations = 2000;
  int burn_in = 500;
  std::uint64_t seed = 42;

  void validate() const;
};

// Post-burn-in posterior draws and summaries for one model.
struct SkillPosterior {
  ModelRef model;
  std::vector<double> samples;  // length iterations - burn_in
  double mean = 0.0;
  std::pair<double, double> ci50{0.0, 0.0};
  std::pair<double, double> ci95{0.0, 0.0};
  int games = 0;
  int wins = 0;
};

struct HeadToHead {
  ModelRef model_a;
  ModelRef model_b;
  double win_rate = 0.0;     // E[lambda_a / (lambda_a + lambda_b)]
  double cliffs_delta = 0.0; // Pr(lambda_a > lambda_b) - Pr(lambda_a < lambda_b)
  double diff_mean = 0.0;
  std::pair<double, double> diff_ci95{0.0, 0.0};
};

struct RankRow {
  int rank = 0;
  ModelRef model;
  double mean = 0.0;
  std::pair<double, double> ci50{0.0, 0.0};
  std::pair<double, double> ci95{0.0, 0.0};
  int games = 0;
  int wins = 0;
};

// Logs must already be scorable (completed with winner).
std::vector<OutcomeRecord> extract_outcomes(const std::vector<GameLog>& logs);

std::map<std::string, int> count_wins(const std::vector<OutcomeRecord>& outcomes);

// Latent-skill Gibbs sampler. Per iteration: one exponential auxiliary draw
// per game (rate = summed skill of its players, games in input order), then
// one Gamma draw per model in sorted-id order with shape alpha0 + wins and
// rate tau0 + summed auxiliaries of the model's games. All T iterations are
// drawn; the returned samples are the post-burn-in slice. Deterministic for
// a fixed seed and input order.
//
// The two-argument form takes the model universe from the outcomes. The
// three-argument form uses the given universe; models that appear in no
// outcome are then drawn from the prior alone.
std::vector<SkillPosterior> gibbs_sample(const std::vector<OutcomeRecord>& outcomes,
                                         const SamplerConfig& cfg);
std::vector<SkillPosterior> gibbs_sample(const std::vector<OutcomeRecord>& outcomes,
                                         const SamplerConfig& cfg,
                                         const std::vector<ModelRef>& models);

// Empirical quantile with linear interpolation between order statistics
// (h = (n-1)q). Input must be sorted ascending.
double empirical_quantile(const std::vector<double>& sorted_values, double q);

// Rows ranked by posterior mean descending; mean ties break by model id.
std::vector<RankRow> summarize(const std::vector<SkillPosterior>& posteriors);

// Pairwise statistics over samples paired by iteration; both posteriors must
// come from the same sampler run. Computed on a canonical orientation of the
// pair, so swapping arguments negates cliffs_delta, complements win_rate and
// mirrors the difference interval exactly.
HeadToHead head_to_head(const SkillPosterior& a, const SkillPosterior& b);

}  // namespace island
