#include "island/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <set>
#include <stdexcept>

namespace island {

void SamplerConfig::validate() const {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("burn_in must be in [0, iterations)");
  }
}

std::vector<OutcomeRecord> extract_outcomes(const std::vector<GameLog>& logs) {
  std::vector<OutcomeRecord> outcomes;
  outcomes.reserve(logs.size());
  for (const auto& log : logs) {
    if (!log.completed || !log.winner) {
      throw std::invalid_argument("extract_outcomes: log " + log.game_id +
                                  " is not scorable");
    }
    auto winner_it = log.roster.find(*log.winner);
    if (winner_it == log.roster.end()) {
      throw std::invalid_argument("extract_outcomes: log " + log.game_id +
                                  " winner label missing from roster");
    }
    OutcomeRecord record;
    record.game_id = log.game_id;
    for (const auto& [label, model] : log.roster) record.players.push_back(model);
    record.winner = winner_it->second;
    outcomes.push_back(std::move(record));
  }
  return outcomes;
}

std::map<std::string, int> count_wins(const std::vector<OutcomeRecord>& outcomes) {
  std::map<std::string, int> wins;
  for (const auto& outcome : outcomes) ++wins[outcome.winner.id()];
  return wins;
}

namespace {

void summarize_posterior(SkillPosterior& post) {
  std::vector<double> sorted = post.samples;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : sorted) total += v;
  post.mean = total / static_cast<double>(sorted.size());
  post.ci50 = {empirical_quantile(sorted, 0.25), empirical_quantile(sorted, 0.75)};
  post.ci95 = {empirical_quantile(sorted, 0.025), empirical_quantile(sorted, 0.975)};
}

}  // namespace

std::vector<SkillPosterior> gibbs_sample(const std::vector<OutcomeRecord>& outcomes,
                                         const SamplerConfig& cfg) {
  std::set<ModelRef> universe;
  for (const auto& outcome : outcomes) {
    universe.insert(outcome.players.begin(), outcome.players.end());
  }
  return gibbs_sample(outcomes, cfg,
                      std::vector<ModelRef>(universe.begin(), universe.end()));
}

std::vector<SkillPosterior> gibbs_sample(const std::vector<OutcomeRecord>& outcomes,
                                         const SamplerConfig& cfg,
                                         const std::vector<ModelRef>& models) {
  cfg.validate();

  std::vector<ModelRef> sorted_models = models;
  std::sort(sorted_models.begin(), sorted_models.end());
  sorted_models.erase(std::unique(sorted_models.begin(), sorted_models.end()),
                      sorted_models.end());
  const size_t n_models = sorted_models.size();
  if (n_models == 0) throw std::invalid_argument("gibbs_sample: no models");

  std::map<std::string, size_t> index;
  for (size_t i = 0; i < n_models; ++i) index[sorted_models[i].id()] = i;

  // Validate outcomes and pre-resolve player indices per game.
  std::vector<std::vector<size_t>> game_players;
  game_players.reserve(outcomes.size());
  std::vector<int> wins(n_models, 0);
  std::vector<int> games(n_models, 0);
  for (const auto& outcome : outcomes) {
    if (outcome.players.size() < 2) {
      throw std::invalid_argument("gibbs_sample: game " + outcome.game_id +
                                  " has fewer than two players");
    }
    std::vector<size_t> ids;
    std::set<size_t> seen;
    for (const auto& player : outcome.players) {
      auto it = index.find(player.id());
      if (it == index.end()) {
        throw std::invalid_argument("gibbs_sample: player " + player.id() +
                                    " missing from model universe");
      }
      if (!seen.insert(it->second).second) {
        throw std::invalid_argument("gibbs_sample: duplicate player " + player.id() +
                                    " in game " + outcome.game_id);
      }
      ids.push_back(it->second);
      ++games[it->second];
    }
    auto winner_it = index.find(outcome.winner.id());
    if (winner_it == index.end() || !seen.count(winner_it->second)) {
      throw std::invalid_argument("gibbs_sample: winner not among players in game " +
                                  outcome.game_id);
    }
    ++wins[winner_it->second];
    game_players.push_back(std::move(ids));
  }

  const int T = cfg.iterations;
  const int B = cfg.burn_in;
  std::mt19937_64 rng(cfg.seed);

  std::vector<double> lambda(n_models, 1.0);
  std::vector<double> z_sum(n_models, 0.0);
  std::vector<std::vector<double>> draws(n_models);
  for (auto& d : draws) d.reserve(static_cast<size_t>(T));

  for (int t = 0; t < T; ++t) {
    std::fill(z_sum.begin(), z_sum.end(), 0.0);
    for (const auto& players : game_players) {
      double rate = 0.0;
      for (size_t id : players) rate += lambda[id];
      if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::runtime_error("gibbs_sample: degenerate exponential rate");
      }
      double z = std::exponential_distribution<double>(rate)(rng);
      for (size_t id : players) z_sum[id] += z;
    }
    for (size_t i = 0; i < n_models; ++i) {
      double shape = cfg.alpha0 + wins[i];
      double rate = cfg.tau0 + z_sum[i];
      if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::runtime_error("gibbs_sample: degenerate gamma rate");
      }
      lambda[i] = std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
      draws[i].push_back(lambda[i]);
    }
  }

  std::vector<SkillPosterior> posteriors(n_models);
  for (size_t i = 0; i < n_models; ++i) {
    posteriors[i].model = sorted_models[i];
    posteriors[i].samples.assign(draws[i].begin() + B, draws[i].end());
    posteriors[i].games = games[i];
    posteriors[i].wins = wins[i];
    summarize_posterior(posteriors[i]);
  }
  return posteriors;
}

double empirical_quantile(const std::vector<double>& sorted_values, double q) {
  if (sorted_values.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  if (q <= 0.0) return sorted_values.front();
  if (q >= 1.0) return sorted_values.back();
  double h = q * static_cast<double>(sorted_values.size() - 1);
  size_t lo = static_cast<size_t>(h);
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted_values.size()) return sorted_values.back();
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

std::vector<RankRow> summarize(const std::vector<SkillPosterior>& posteriors) {
  std::vector<const SkillPosterior*> order;
  order.reserve(posteriors.size());
  for (const auto& post : posteriors) {
    if (post.samples.empty()) throw std::invalid_argument("summarize: empty posterior");
    order.push_back(&post);
  }
  std::sort(order.begin(), order.end(), [](const SkillPosterior* a, const SkillPosterior* b) {
    if (a->mean != b->mean) return a->mean > b->mean;
    return a->model.id() < b->model.id();
  });
  std::vector<RankRow> rows;
  rows.reserve(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    rows.push_back(RankRow{static_cast<int>(i) + 1, order[i]->model, order[i]->mean,
                           order[i]->ci50, order[i]->ci95, order[i]->games,
                           order[i]->wins});
  }
  return rows;
}

HeadToHead head_to_head(const SkillPosterior& a, const SkillPosterior& b) {
  if (a.samples.size() != b.samples.size()) {
    throw std::invalid_argument("head_to_head: mismatched sample counts");
  }
  if (a.samples.empty()) throw std::invalid_argument("head_to_head: empty samples");

  // Orient by model id so that (a, b) and (b, a) are exact mirror images.
  const bool flipped = a.model.id() > b.model.id();
  const SkillPosterior& first = flipped ? b : a;
  const SkillPosterior& second = flipped ? a : b;

  const size_t n = first.samples.size();
  double ratio_sum = 0.0;
  double diff_sum = 0.0;
  long greater = 0, less = 0;
  std::vector<double> diffs(n);
  for (size_t t = 0; t < n; ++t) {
    double x = first.samples[t];
    double y = second.samples[t];
    ratio_sum += x / (x + y);
    diffs[t] = x - y;
    diff_sum += diffs[t];
    if (x > y) ++greater;
    else if (x < y) ++less;
  }
  std::sort(diffs.begin(), diffs.end());

  double win_rate = ratio_sum / static_cast<double>(n);
  double delta = static_cast<double>(greater - less) / static_cast<double>(n);
  double diff_mean = diff_sum / static_cast<double>(n);
  double lo = empirical_quantile(diffs, 0.025);
  double hi = empirical_quantile(diffs, 0.975);

  HeadToHead h;
  h.model_a = a.model;
  h.model_b = b.model;
  if (!flipped) {
    h.win_rate = win_rate;
    h.cliffs_delta = delta;
    h.diff_mean = diff_mean;
    h.diff_ci95 = {lo, hi};
  } else {
    h.win_rate = 1.0 - win_rate;
    h.cliffs_delta = -delta;
    h.diff_mean = -diff_mean;
    h.diff_ci95 = {-hi, -lo};
  }
  return h;
}

}  // namespace island
