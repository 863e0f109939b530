#include "wprcn/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wprcn {

std::vector<double> tie_averaged_ranks(const std::vector<double>& row) {
  const std::size_t n = row.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && row[order[j + 1]] == row[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + 1 + j + 1);  // mean of spanned ranks
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

EvalReport evaluate_table(std::vector<std::string> datasets, std::vector<std::string> methods,
                          std::vector<std::vector<double>> accuracy, std::uint64_t seed,
                          std::string config_digest) {
  if (accuracy.size() != datasets.size())
    throw std::invalid_argument("evaluate: row count mismatch");
  for (const auto& row : accuracy)
    if (row.size() != methods.size())
      throw std::invalid_argument("evaluate: column count mismatch");

  EvalReport rep;
  rep.datasets = std::move(datasets);
  rep.methods = std::move(methods);
  rep.accuracy = std::move(accuracy);
  rep.seed = seed;
  rep.config_digest = std::move(config_digest);

  const std::size_t cols = rep.methods.size();
  const std::size_t rows = rep.datasets.size();
  rep.avg_accuracy.assign(cols, 0.0);
  rep.avg_rank.assign(cols, 0.0);
  rep.win_tie.assign(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = rep.accuracy[r];
    const auto ranks = tie_averaged_ranks(row);
    const double best = *std::max_element(row.begin(), row.end());
    for (std::size_t c = 0; c < cols; ++c) {
      rep.avg_accuracy[c] += row[c];
      rep.avg_rank[c] += ranks[c];
      if (row[c] == best) ++rep.win_tie[c];
    }
  }
  if (rows > 0)
    for (std::size_t c = 0; c < cols; ++c) {
      rep.avg_accuracy[c] /= static_cast<double>(rows);
      rep.avg_rank[c] /= static_cast<double>(rows);
    }
  return rep;
}

std::string report_to_tsv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << "dataset";
  for (const auto& m : report.methods) out << "\t" << m;
  out << "\n";
  for (std::size_t r = 0; r < report.datasets.size(); ++r) {
    out << report.datasets[r];
    for (double v : report.accuracy[r]) out << "\t" << v;
    out << "\n";
  }
  out << "avg_accuracy";
  for (double v : report.avg_accuracy) out << "\t" << v;
  out << "\navg_rank";
  for (double v : report.avg_rank) out << "\t" << v;
  out << "\nwin_tie";
  for (std::size_t v : report.win_tie) out << "\t" << v;
  out << "\n";
  return out.str();
}

}  // namespace wprcn
