#pragma once

#include <string>
#include <vector>

#include "island/analysis.hpp"
#include "island/ranking.hpp"

namespace island {

// All emitters are deterministic: the same inputs produce identical bytes.

std::string rankings_csv(const std::vector<RankRow>& rows);
std::string rankings_table(const std::vector<RankRow>& rows);

std::string h2h_csv(const std::vector<HeadToHead>& pairs);
std::string h2h_table(const std::vector<HeadToHead>& pairs);

std::string regression_csv(const RegressionResult& result, int threshold);
std::string regression_table(const std::string& title, const RegressionResult& result,
                             int threshold);

}  // namespace island
