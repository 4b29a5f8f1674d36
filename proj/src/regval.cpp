#include "miranda/regval.hpp"

#include <cmath>
#include <limits>

#include "miranda/linalg.hpp"
#include "miranda/rng.hpp"

namespace miranda {

RegularValueProposal propose(const FaceMargins& margins, double epsilon,
                             std::uint64_t seed, int attempt) {
  if (epsilon <= 0.0) throw std::invalid_argument("propose: epsilon must be positive");
  const int n = static_cast<int>(margins.per_axis.size());
  RegularValueProposal prop;
  prop.epsilon = epsilon;
  prop.margins = margins;
  prop.seed = seed;
  prop.attempt = attempt;
  prop.q.resize(static_cast<std::size_t>(n));

  SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
  for (int i = 0; i < n; ++i) {
    const double m = margins.min_for_axis(i);
    if (!(m > 0.0) || !std::isfinite(m))
      throw SolveError(SolveFailure::MarginFloor,
                       "propose: margin of axis " + std::to_string(i + 1) +
                           " is not positive");
    // next_symmetric() is strictly inside (-1, 1), keeping |q_i| < 0.9 m strict.
    prop.q[static_cast<std::size_t>(i)] = 0.9 * m * rng.next_symmetric();
  }
  const double norm = norm2(prop.q);
  if (norm >= epsilon) {
    const double shrink = 0.99 * epsilon / norm;
    for (double& qi : prop.q) qi *= shrink;
  }
  return prop;
}

RegularValueProposal propose(const MapModel& map, const Cuboid& box, double epsilon,
                             std::uint64_t seed, int attempt, int samples_per_axis) {
  return propose(face_margins(map, box, samples_per_axis), epsilon, seed, attempt);
}

int RegularityAudit::worst_index() const {
  int worst = -1;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double scale = entries[i].frobenius > 0.0 ? entries[i].frobenius : 1.0;
    const double ratio = entries[i].sigma_min / scale;
    if (ratio < worst_ratio) {
      worst_ratio = ratio;
      worst = static_cast<int>(i);
    }
  }
  return worst;
}

RegularityAudit audit(std::span<const AuditTarget> targets, double sigma_min) {
  RegularityAudit result;
  result.sigma_min = sigma_min;
  result.regular = true;
  for (const AuditTarget& target : targets) {
    const int rows = target.map.n_out();
    const int cols = target.map.n_in();
    for (const std::vector<double>& point : target.points) {
      const std::vector<double> jac = target.map.jacobian(point);
      AuditEntry entry;
      entry.point = point;
      entry.sigma_min = min_singular_value(jac, rows, cols);
      entry.frobenius = frobenius_norm(jac);
      entry.label = target.label;
      if (!entry.passes(sigma_min)) result.regular = false;
      result.entries.push_back(std::move(entry));
    }
  }
  return result;
}

}  // namespace miranda
