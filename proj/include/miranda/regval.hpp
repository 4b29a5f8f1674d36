#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "miranda/geometry.hpp"
#include "miranda/map_model.hpp"

namespace miranda {

// A candidate regular value near zero. Constructed so that ||q|| < epsilon and
// |q_i| < 0.9 * min(margin_i_lower, margin_i_upper) for every axis; the 0.9
// factor hedges the sampling error in the face margins.
struct RegularValueProposal {
  std::vector<double> q;
  double epsilon = 0.0;
  FaceMargins margins;
  std::uint64_t seed = 0;
  int attempt = 0;
};

// Deterministic in (seed, attempt): the same pair always yields the same q,
// bit for bit. Throws SolveError(MarginFloor) on a collapsed margin.
RegularValueProposal propose(const FaceMargins& margins, double epsilon,
                             std::uint64_t seed, int attempt);
RegularValueProposal propose(const MapModel& map, const Cuboid& box, double epsilon,
                             std::uint64_t seed, int attempt, int samples_per_axis = 33);

// One audited solution point: the smallest singular value of the Jacobian of
// the stated (possibly reduced or face-restricted) map at that point.
struct AuditEntry {
  std::vector<double> point;
  double sigma_min = 0.0;
  double frobenius = 0.0;  // Jacobian Frobenius norm, used as the scale
  std::string label;       // which map this Jacobian belongs to

  bool passes(double sigma_min_threshold) const {
    return sigma_min > sigma_min_threshold * frobenius;
  }
};

struct RegularityAudit {
  double sigma_min = 1e-8;  // relative threshold, scaled by each entry's Frobenius norm
  std::vector<AuditEntry> entries;
  bool regular = false;

  // Index of the entry with the worst sigma_min / frobenius ratio, or -1.
  int worst_index() const;
};

struct AuditTarget {
  MapModel map;
  std::vector<std::vector<double>> points;
  std::string label;
};

// Regular iff every solved point of every target map has sigma_min above the
// scaled threshold. Suspect is a verdict, not an error.
RegularityAudit audit(std::span<const AuditTarget> targets, double sigma_min);

}  // namespace miranda
