#include "island/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>

namespace island {

namespace {

double normal_two_sided_p(double z) {
  if (std::isinf(z)) return 0.0;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

Coefficient make_coefficient(const std::string& name, double estimate, double variance) {
  Coefficient c;
  c.name = name;
  double se = std::sqrt(std::max(variance, 0.0));
  c.estimate_pp = estimate * 100.0;
  c.se_pp = se * 100.0;
  c.ci_lo_pp = c.estimate_pp - 1.96 * c.se_pp;
  c.ci_hi_pp = c.estimate_pp + 1.96 * c.se_pp;
  c.p_value = se > 0.0 ? normal_two_sided_p(estimate / se) : (estimate == 0.0 ? 1.0 : 0.0);
  return c;
}

std::vector<std::string> sorted_categories(const std::vector<VoteObservation>& obs) {
  std::set<std::string> cats;
  for (const auto& o : obs) cats.insert(o.finalist_provider_category);
  return {cats.begin(), cats.end()};
}

}  // namespace

const Coefficient* RegressionResult::find(const std::string& name) const {
  for (const auto& c : coefficients) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<VoteObservation> build_vote_observations(const std::vector<GameLog>& logs) {
  std::vector<VoteObservation> obs;
  for (const auto& log : logs) {
    if (!log.completed || !log.winner) {
      throw std::invalid_argument("build_vote_observations: log " + log.game_id +
                                  " is not scorable");
    }
    auto finalists = log.finalists();
    if (finalists.size() != 2) continue;
    const ModelRef& model_a = log.roster.at(finalists[0]);
    const ModelRef& model_b = log.roster.at(finalists[1]);
    if (model_a.provider == model_b.provider) continue;

    for (const auto& event : log.events) {
      const auto* vote = std::get_if<WinnerVote>(&event);
      if (!vote || !vote->parsed_choice) continue;
      const PlayerLabel& choice = *vote->parsed_choice;
      if (choice != finalists[0] && choice != finalists[1]) continue;
      const ModelRef& voter_model = log.roster.at(vote->voter);
      for (const auto& finalist : finalists) {
        const ModelRef& finalist_model = log.roster.at(finalist);
        VoteObservation row;
        row.game_id = log.game_id;
        row.voter_model = voter_model;
        row.finalist_model = finalist_model;
        row.y = (choice == finalist) ? 1 : 0;
        row.s = (voter_model.provider == finalist_model.provider) ? 1 : 0;
        row.finalist_provider_category = finalist_model.provider;
        obs.push_back(std::move(row));
      }
    }
  }
  return obs;
}

std::vector<VoteObservation> bundle_providers(std::vector<VoteObservation> obs,
                                              int threshold) {
  if (threshold < 1) throw std::invalid_argument("bundle_providers: threshold must be >= 1");
  std::map<std::string, int> same_counts;
  for (const auto& o : obs) {
    if (o.s == 1) ++same_counts[o.finalist_provider_category];
  }
  for (auto& o : obs) {
    auto it = same_counts.find(o.finalist_provider_category);
    int count = (it == same_counts.end()) ? 0 : it->second;
    if (count < threshold) o.finalist_provider_category = "other";
  }
  return obs;
}

OlsFit ols_cluster(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<std::string>& cluster_ids,
                   const std::vector<std::string>& column_names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (n == 0) throw std::invalid_argument("ols_cluster: no observations");
  if (y.size() != n) throw std::invalid_argument("ols_cluster: X/y size mismatch");
  if (static_cast<Eigen::Index>(cluster_ids.size()) != n) {
    throw std::invalid_argument("ols_cluster: cluster id count mismatch");
  }
  if (static_cast<Eigen::Index>(column_names.size()) != k) {
    throw std::invalid_argument("ols_cluster: column name count mismatch");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) {
    // Pivots past the rank point name the columns that add no information.
    std::string names;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      if (!names.empty()) names += ", ";
      names += column_names[static_cast<size_t>(perm[i])];
    }
    throw std::invalid_argument("ols_cluster: design matrix is rank-deficient; collinear columns: " +
                                names);
  }

  Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::MatrixXd xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::VectorXd beta = xtx_inv * (X.transpose() * y);
  Eigen::VectorXd residuals = y - X * beta;

  // Score sums per cluster, first-appearance cluster order.
  std::map<std::string, Eigen::VectorXd> scores;
  std::vector<const std::string*> cluster_order;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, inserted] = scores.try_emplace(cluster_ids[static_cast<size_t>(i)],
                                             Eigen::VectorXd::Zero(k));
    if (inserted) cluster_order.push_back(&it->first);
    it->second += X.row(i).transpose() * residuals(i);
  }
  const auto n_clusters = static_cast<Eigen::Index>(scores.size());
  if (n_clusters < 2) {
    throw std::invalid_argument("ols_cluster: need at least two clusters");
  }
  if (n <= k) throw std::invalid_argument("ols_cluster: need more observations than columns");

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const std::string* id : cluster_order) {
    const Eigen::VectorXd& s = scores.at(*id);
    meat += s * s.transpose();
  }

  const double g = static_cast<double>(n_clusters);
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  double cr1 = (g / (g - 1.0)) * ((nn - 1.0) / (nn - kk));
  Eigen::MatrixXd vcov = cr1 * xtx_inv * meat * xtx_inv;

  OlsFit fit;
  fit.beta = std::move(beta);
  fit.vcov = std::move(vcov);
  fit.columns = column_names;
  fit.n_obs = static_cast<int>(n);
  fit.n_clusters = static_cast<int>(n_clusters);
  return fit;
}

RegressionResult fit_pooled(const std::vector<VoteObservation>& obs) {
  if (obs.empty()) throw std::invalid_argument("fit_pooled: no observations");
  auto categories = sorted_categories(obs);

  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto k = static_cast<Eigen::Index>(categories.size()) + 1;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd y(n);
  std::vector<std::string> cluster_ids(obs.size());
  std::map<std::string, Eigen::Index> cat_col;
  for (size_t c = 0; c < categories.size(); ++c) {
    cat_col[categories[c]] = static_cast<Eigen::Index>(c);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = obs[static_cast<size_t>(i)];
    X(i, cat_col.at(o.finalist_provider_category)) = 1.0;
    X(i, k - 1) = o.s;
    y(i) = o.y;
    cluster_ids[static_cast<size_t>(i)] = o.game_id;
  }

  std::vector<std::string> names;
  for (const auto& cat : categories) names.push_back("alpha_" + cat);
  names.push_back("same_provider");

  OlsFit fit = ols_cluster(X, y, cluster_ids, names);

  RegressionResult result;
  result.n_obs = fit.n_obs;
  result.n_clusters = fit.n_clusters;
  // beta first, then the provider baselines
  result.coefficients.push_back(
      make_coefficient("same_provider", fit.beta(k - 1), fit.vcov(k - 1, k - 1)));
  for (Eigen::Index c = 0; c + 1 < k; ++c) {
    result.coefficients.push_back(
        make_coefficient(names[static_cast<size_t>(c)], fit.beta(c), fit.vcov(c, c)));
  }
  return result;
}

RegressionResult fit_by_provider(const std::vector<VoteObservation>& obs) {
  if (obs.empty()) throw std::invalid_argument("fit_by_provider: no observations");
  auto categories = sorted_categories(obs);

  std::set<std::string> with_same;
  for (const auto& o : obs) {
    if (o.s == 1) with_same.insert(o.finalist_provider_category);
  }
  std::vector<std::string> interacted;
  for (const auto& cat : categories) {
    if (with_same.count(cat)) {
      interacted.push_back(cat);
    } else {
      std::cerr << "fit_by_provider: category \"" << cat
                << "\" has no same-provider rows; dropping its interaction\n";
    }
  }

  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto k = static_cast<Eigen::Index>(categories.size() + interacted.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd y(n);
  std::vector<std::string> cluster_ids(obs.size());

  std::map<std::string, Eigen::Index> cat_col, beta_col;
  std::vector<std::string> names;
  for (size_t c = 0; c < categories.size(); ++c) {
    cat_col[categories[c]] = static_cast<Eigen::Index>(c);
    names.push_back("alpha_" + categories[c]);
  }
  for (size_t c = 0; c < interacted.size(); ++c) {
    beta_col[interacted[c]] = static_cast<Eigen::Index>(categories.size() + c);
    names.push_back("beta_" + interacted[c]);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = obs[static_cast<size_t>(i)];
    X(i, cat_col.at(o.finalist_provider_category)) = 1.0;
    if (o.s == 1) X(i, beta_col.at(o.finalist_provider_category)) = 1.0;
    y(i) = o.y;
    cluster_ids[static_cast<size_t>(i)] = o.game_id;
  }

  OlsFit fit = ols_cluster(X, y, cluster_ids, names);

  RegressionResult result;
  result.n_obs = fit.n_obs;
  result.n_clusters = fit.n_clusters;
  // interactions first, mirroring how the panel reads
  for (const auto& cat : interacted) {
    Eigen::Index c = beta_col.at(cat);
    result.coefficients.push_back(
        make_coefficient("beta_" + cat, fit.beta(c), fit.vcov(c, c)));
  }
  for (const auto& cat : categories) {
    Eigen::Index c = cat_col.at(cat);
    result.coefficients.push_back(
        make_coefficient("alpha_" + cat, fit.beta(c), fit.vcov(c, c)));
  }
  return result;
}

}  // namespace island
