#include "seedrl/model.hpp"

#include <algorithm>

#include "seedrl/errors.hpp"

namespace seedrl {

Topology::Topology(std::vector<std::vector<Arc>> arcs) : arcs_(std::move(arcs)) {}

std::size_t Topology::max_degree() const {
  std::size_t best = 0;
  for (const auto& a : arcs_) best = std::max(best, a.size());
  return best;
}

std::size_t Topology::num_arcs() const {
  std::size_t n = 0;
  for (const auto& a : arcs_) n += a.size();
  return n;
}

void normalize_row(std::span<double> row) {
  double total = 0.0;
  std::size_t last = row.size();
  for (std::size_t i = 0; i < row.size(); ++i) {
    total += row[i];
    if (row[i] > 0.0) last = i;
  }
  if (!(total > 0.0)) throw InvalidModel("row has no positive entry");
  double running = 0.0;
  for (std::size_t i = 0; i < last; ++i) {
    row[i] /= total;
    running += row[i];
  }
  row[last] = std::max(0.0, 1.0 - running);
}

}  // namespace seedrl
