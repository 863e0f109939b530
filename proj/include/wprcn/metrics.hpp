#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wprcn {

// Tie-averaged ranks for one row of accuracies (rank 1 = highest value;
// equal values share the mean of the ranks they span).
std::vector<double> tie_averaged_ranks(const std::vector<double>& row);

// One accuracy table: rows are datasets, columns are methods.
struct EvalReport {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> accuracy;  // [dataset][method]
  std::vector<double> avg_accuracy;           // per method
  std::vector<double> avg_rank;
  std::vector<std::size_t> win_tie;  // datasets where the method attains the row max
  std::uint64_t seed = 0;
  std::string config_digest;
};

EvalReport evaluate_table(std::vector<std::string> datasets, std::vector<std::string> methods,
                          std::vector<std::vector<double>> accuracy, std::uint64_t seed = 0,
                          std::string config_digest = "");

std::string report_to_tsv(const EvalReport& report);

}  // namespace wprcn
