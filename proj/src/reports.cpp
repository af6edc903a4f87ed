#include "island/reports.hpp"

#include <algorithm>
#include <cstdio>

namespace island {

namespace {

std::string fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string signed_fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.*f", decimals, value);
  return buf;
}

std::string pad(std::string s, size_t width, bool left_align = false) {
  if (s.size() >= width) return s;
  std::string fill(width - s.size(), ' ');
  return left_align ? s + fill : fill + s;
}

}  // namespace

std::string rankings_csv(const std::vector<RankRow>& rows) {
  std::string out = "rank,model,mean,ci50_lo,ci50_hi,ci95_lo,ci95_hi,games,wins\n";
  for (const auto& row : rows) {
    out += std::to_string(row.rank) + "," + row.model.id() + "," + fmt(row.mean, 6) + "," +
           fmt(row.ci50.first, 6) + "," + fmt(row.ci50.second, 6) + "," +
           fmt(row.ci95.first, 6) + "," + fmt(row.ci95.second, 6) + "," +
           std::to_string(row.games) + "," + std::to_string(row.wins) + "\n";
  }
  return out;
}

std::string rankings_table(const std::vector<RankRow>& rows) {
  size_t model_width = 5;
  for (const auto& row : rows) model_width = std::max(model_width, row.model.id().size());

  std::string out = pad("Rank", 4) + "  " + pad("Model", model_width, true) + "  " +
                    pad("Mean", 6) + "  " + pad("95% CI", 14) + "  " + pad("Games", 5) +
                    "  " + pad("Wins", 4) + "\n";
  for (const auto& row : rows) {
    std::string ci = "[" + fmt(row.ci95.first, 2) + ", " + fmt(row.ci95.second, 2) + "]";
    out += pad(std::to_string(row.rank), 4) + "  " + pad(row.model.id(), model_width, true) +
           "  " + pad(fmt(row.mean, 2), 6) + "  " + pad(ci, 14) + "  " +
           pad(std::to_string(row.games), 5) + "  " + pad(std::to_string(row.wins), 4) +
           "\n";
  }
  return out;
}

std::string h2h_csv(const std::vector<HeadToHead>& pairs) {
  std::string out = "model_a,model_b,win_rate,cliffs_delta,diff_mean,diff_ci95_lo,diff_ci95_hi\n";
  for (const auto& h : pairs) {
    out += h.model_a.id() + "," + h.model_b.id() + "," + fmt(h.win_rate, 6) + "," +
           fmt(h.cliffs_delta, 6) + "," + fmt(h.diff_mean, 6) + "," +
           fmt(h.diff_ci95.first, 6) + "," + fmt(h.diff_ci95.second, 6) + "\n";
  }
  return out;
}

std::string h2h_table(const std::vector<HeadToHead>& pairs) {
  size_t a_width = 1, b_width = 1;
  for (const auto& h : pairs) {
    a_width = std::max(a_width, h.model_a.id().size());
    b_width = std::max(b_width, h.model_b.id().size());
  }
  std::string out = pad("A", a_width, true) + "  " + pad("B", b_width, true) + "  " +
                    pad("Pr(A>B)", 7) + "  " + pad("Cliff's d", 9) + "  " +
                    pad("diff (95% CI)", 26) + "\n";
  for (const auto& h : pairs) {
    std::string diff = signed_fmt(h.diff_mean, 2) + " [" + signed_fmt(h.diff_ci95.first, 2) +
                       ", " + signed_fmt(h.diff_ci95.second, 2) + "]";
    out += pad(h.model_a.id(), a_width, true) + "  " + pad(h.model_b.id(), b_width, true) +
           "  " + pad(fmt(h.win_rate, 3), 7) + "  " + pad(signed_fmt(h.cliffs_delta, 3), 9) +
           "  " + pad(diff, 26) + "\n";
  }
  return out;
}

std::string regression_csv(const RegressionResult& result, int threshold) {
  std::string out = "parameter,estimate_pp,se_pp,ci95_lo_pp,ci95_hi_pp,p_value\n";
  for (const auto& c : result.coefficients) {
    out += c.name + "," + fmt(c.estimate_pp, 6) + "," + fmt(c.se_pp, 6) + "," +
           fmt(c.ci_lo_pp, 6) + "," + fmt(c.ci_hi_pp, 6) + "," + fmt(c.p_value, 6) + "\n";
  }
  out += "N," + std::to_string(result.n_obs) + ",,,,\n";
  out += "clusters," + std::to_string(result.n_clusters) + ",,,,\n";
  out += "min_obs_threshold," + std::to_string(threshold) + ",,,,\n";
  return out;
}

std::string regression_table(const std::string& title, const RegressionResult& result,
                             int threshold) {
  size_t name_width = 9;
  for (const auto& c : result.coefficients) name_width = std::max(name_width, c.name.size());

  std::string out = title + "\n";
  out += pad("Parameter", name_width, true) + "  " + pad("Est (pp)", 9) + "  " +
         pad("SE (pp)", 8) + "  " + pad("95% CI (pp)", 20) + "  " + pad("p", 6) + "\n";
  for (const auto& c : result.coefficients) {
    std::string ci = "[" + signed_fmt(c.ci_lo_pp, 2) + ", " + signed_fmt(c.ci_hi_pp, 2) + "]";
    out += pad(c.name, name_width, true) + "  " + pad(signed_fmt(c.estimate_pp, 2), 9) +
           "  " + pad("(" + fmt(c.se_pp, 2) + ")", 8) + "  " + pad(ci, 20) + "  " +
           pad(fmt(c.p_value, 3), 6) + "\n";
  }
  out += "N = " + std::to_string(result.n_obs) + ", clusters = " +
         std::to_string(result.n_clusters) + ", min. obs. threshold = " +
         std::to_string(threshold) + "\n";
  return out;
}

}  // namespace island
