#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "island/game_log.hpp"
#include "island/model_ref.hpp"

namespace island {

// One (voter, finalist) row from a mixed-provider final.
struct VoteObservation {
  std::string game_id;
  ModelRef voter_model;
  ModelRef finalist_model;
  int y = 0;  // voted for this finalist
  int s = 0;  // voter and finalist share a provider
  std::string finalist_provider_category;
};

struct Coefficient {
  std::string name;
  double estimate_pp = 0.0;
  double se_pp = 0.0;
  double ci_lo_pp = 0.0;
  double ci_hi_pp = 0.0;
  double p_value = 0.0;
};

struct RegressionResult {
  std::vector<Coefficient> coefficients;
  int n_obs = 0;
  int n_clusters = 0;

  const Coefficient* find(const std::string& name) const;
};

// Raw OLS output in probability units.
struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;  // cluster-robust, CR1-scaled
  std::vector<std::string> columns;
  int n_obs = 0;
  int n_clusters = 0;
};

// Builds analysis rows from scorable logs. A game enters iff it has exactly
// two finalists from distinct providers; each juror with a parsed winner
// vote contributes one row per finalist, y = 1 on the chosen one. The
// same-provider flag compares raw provider slugs (before any bundling).
std::vector<VoteObservation> build_vote_observations(const std::vector<GameLog>& logs);

// Relabels finalist providers with fewer than `threshold` same-provider
// rows (s = 1) to "other". Idempotent; never changes the row count.
std::vector<VoteObservation> bundle_providers(std::vector<VoteObservation> obs,
                                              int threshold = 50);

// OLS with the cluster-robust sandwich covariance
//   (X'X)^-1 (sum_g X_g' e_g e_g' X_g) (X'X)^-1
// scaled by the CR1 factor [G/(G-1)] [(N-1)/(N-k)]. Column-rank deficiency
// throws, naming the collinear columns.
OlsFit ols_cluster(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<std::string>& cluster_ids,
                   const std::vector<std::string>& column_names);

// Pooled model: per-category finalist-provider indicators (no global
// intercept) plus the shared same-provider regressor. Clustered by game.
RegressionResult fit_pooled(const std::vector<VoteObservation>& obs);

// Per-provider model: per-category indicators plus per-category
// same-provider interactions. Categories with no same-provider rows lose
// their interaction column (with a warning). Clustered by game.
RegressionResult fit_by_provider(const std::vector<VoteObservation>& obs);

}  // namespace island
