#include "miranda/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "miranda/grid.hpp"

namespace miranda {

Cuboid::Cuboid(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("Cuboid: dimension must be >= 1 with matching bounds");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("Cuboid: lower bound must be strictly below upper");
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw std::invalid_argument("Cuboid: bounds must be finite");
  }
}

Cuboid Cuboid::symmetric(int n, double half_width) {
  return Cuboid(std::vector<double>(static_cast<std::size_t>(n), -half_width),
                std::vector<double>(static_cast<std::size_t>(n), half_width));
}

double Cuboid::diameter() const {
  double s = 0.0;
  for (int i = 0; i < n(); ++i) s += extent(i) * extent(i);
  return std::sqrt(s);
}

bool Cuboid::contains(std::span<const double> x, double tol) const {
  for (int i = 0; i < n(); ++i) {
    if (x[static_cast<std::size_t>(i)] < lower[static_cast<std::size_t>(i)] - tol ||
        x[static_cast<std::size_t>(i)] > upper[static_cast<std::size_t>(i)] + tol)
      return false;
  }
  return true;
}

double Cuboid::face_distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n(); ++i) {
    best = std::min(best, x[static_cast<std::size_t>(i)] - lower[static_cast<std::size_t>(i)]);
    best = std::min(best, upper[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
  }
  return best;
}

Cuboid Cuboid::without_axis(int axis) const {
  Cuboid out;
  for (int i = 0; i < n(); ++i) {
    if (i == axis) continue;
    out.lower.push_back(lower[static_cast<std::size_t>(i)]);
    out.upper.push_back(upper[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<double> Face::embed(std::span<const double> y) const {
  std::vector<double> x(y.size() + 1);
  for (std::size_t i = 0, j = 0; i < x.size(); ++i) {
    if (static_cast<int>(i) == axis)
      x[i] = value;
    else
      x[i] = y[j++];
  }
  return x;
}

Face face_of(const Cuboid& box, int axis, FaceSide side) {
  Face f;
  f.axis = axis;
  f.side = side;
  f.value = side == FaceSide::Lower ? box.lower[static_cast<std::size_t>(axis)]
                                    : box.upper[static_cast<std::size_t>(axis)];
  if (box.n() > 1) f.slice = box.without_axis(axis);
  return f;
}

std::vector<Face> faces(const Cuboid& box) {
  std::vector<Face> out;
  out.reserve(static_cast<std::size_t>(2 * box.n()));
  for (int axis = 0; axis < box.n(); ++axis) {
    out.push_back(face_of(box, axis, FaceSide::Lower));
    out.push_back(face_of(box, axis, FaceSide::Upper));
  }
  return out;
}

void for_each_face_sample(const Face& face, int samples_per_axis,
                          const std::function<void(std::span<const double>)>& fn) {
  const int slice_dims = face.slice.n();
  if (slice_dims == 0) {
    std::vector<double> x{face.value};
    fn(x);
    return;
  }
  std::vector<int> counts(static_cast<std::size_t>(slice_dims), samples_per_axis);
  std::vector<double> y(static_cast<std::size_t>(slice_dims));
  for_each_multi_index(counts, [&](const std::vector<int>& idx) {
    for (int i = 0; i < slice_dims; ++i)
      y[static_cast<std::size_t>(i)] =
          grid_node(face.slice.lower[static_cast<std::size_t>(i)],
                    face.slice.upper[static_cast<std::size_t>(i)], samples_per_axis, idx[static_cast<std::size_t>(i)]);
    const std::vector<double> x = face.embed(y);
    fn(x);
  });
}

bool BoundaryReport::pass() const {
  for (const AxisVerdict& v : axes)
    if (!v.pass) return false;
  return !axes.empty();
}

std::string BoundaryReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    os << "axis " << (i + 1) << ": " << (axes[i].pass ? "pass" : "FAIL");
    if (axes[i].pass)
      os << " (" << (axes[i].orientation == AxisOrientation::NegativeLower ? "-/+" : "+/-")
         << ", margins " << axes[i].min_abs_lower << ", " << axes[i].min_abs_upper << ")";
    os << "\n";
  }
  return os.str();
}

namespace {

struct SignSample {
  bool seen = false;
  std::vector<double> point;
  double value = 0.0;
};

struct FaceScan {
  SignSample pos, neg, zero, first;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;

  bool strictly_positive() const { return pos.seen && !neg.seen && !zero.seen; }
  bool strictly_negative() const { return neg.seen && !pos.seen && !zero.seen; }
};

FaceScan scan_face(const MapModel& map, const Face& face, int component,
                   int samples_per_axis) {
  FaceScan s;
  std::vector<double> out(static_cast<std::size_t>(map.n_out()));
  for_each_face_sample(face, samples_per_axis, [&](std::span<const double> x) {
    map.eval_into(x, out);
    const double v = out[static_cast<std::size_t>(component)];
    SignSample& slot = v > 0.0 ? s.pos : (v < 0.0 ? s.neg : s.zero);
    if (!slot.seen) {
      slot.seen = true;
      slot.point.assign(x.begin(), x.end());
      slot.value = v;
    }
    if (!s.first.seen) {
      s.first.seen = true;
      s.first.point.assign(x.begin(), x.end());
      s.first.value = v;
    }
    const double a = std::abs(v);
    s.min_abs = std::min(s.min_abs, a);
    s.max_abs = std::max(s.max_abs, a);
  });
  return s;
}

}  // namespace

BoundaryReport check_miranda(const MapModel& map, const Cuboid& box, int samples_per_axis) {
  if (map.n_in() != box.n() || map.n_out() != box.n())
    throw std::invalid_argument("check_miranda: map dimension must match cuboid dimension");
  if (samples_per_axis < 1)
    throw std::invalid_argument("check_miranda: samples_per_axis must be positive");

  BoundaryReport report;
  report.samples_per_axis = samples_per_axis;
  report.axes.resize(static_cast<std::size_t>(box.n()));

  for (int axis = 0; axis < box.n(); ++axis) {
    const Face lo = face_of(box, axis, FaceSide::Lower);
    const Face hi = face_of(box, axis, FaceSide::Upper);
    const FaceScan slo = scan_face(map, lo, axis, samples_per_axis);
    const FaceScan shi = scan_face(map, hi, axis, samples_per_axis);
    report.map_scale = std::max({report.map_scale, slo.max_abs, shi.max_abs});

    AxisVerdict& v = report.axes[static_cast<std::size_t>(axis)];
    v.min_abs_lower = slo.min_abs;
    v.min_abs_upper = shi.min_abs;

    if (slo.strictly_negative() && shi.strictly_positive()) {
      v.pass = true;
      v.orientation = AxisOrientation::NegativeLower;
    } else if (slo.strictly_positive() && shi.strictly_negative()) {
      v.pass = true;
      v.orientation = AxisOrientation::PositiveLower;
    } else {
      v.pass = false;
      // Exhibit a pair of opposite-face samples with product >= 0. Failure
      // guarantees one of these cases exists.
      const SignSample* wl = nullptr;
      const SignSample* wu = nullptr;
      if (slo.zero.seen) {
        wl = &slo.zero;
        wu = &shi.first;
      } else if (shi.zero.seen) {
        wl = &slo.first;
        wu = &shi.zero;
      } else if (slo.pos.seen && shi.pos.seen) {
        wl = &slo.pos;
        wu = &shi.pos;
      } else if (slo.neg.seen && shi.neg.seen) {
        wl = &slo.neg;
        wu = &shi.neg;
      } else {
        wl = &slo.first;
        wu = &shi.first;
      }
      v.witness_lower = wl->point;
      v.witness_value_lower = wl->value;
      v.witness_upper = wu->point;
      v.witness_value_upper = wu->value;
    }
  }
  return report;
}

FaceMargins face_margins(const MapModel& map, const Cuboid& box, int samples_per_axis) {
  const BoundaryReport report = check_miranda(map, box, samples_per_axis);
  const double floor = 1e-12 * (1.0 + report.map_scale);
  FaceMargins margins;
  margins.per_axis.reserve(static_cast<std::size_t>(box.n()));
  for (int axis = 0; axis < box.n(); ++axis) {
    const AxisVerdict& v = report.axes[static_cast<std::size_t>(axis)];
    if (!v.pass)
      throw SolveError(SolveFailure::MirandaFailed,
                       "face_margins: boundary condition fails on axis " +
                           std::to_string(axis + 1));
    if (v.min_abs_lower <= floor || v.min_abs_upper <= floor)
      throw SolveError(SolveFailure::MarginFloor,
                       "face_margins: face of axis " + std::to_string(axis + 1) +
                           " contains an approximate zero of f_" + std::to_string(axis + 1));
    margins.per_axis.emplace_back(v.min_abs_lower, v.min_abs_upper);
  }
  return margins;
}

}  // namespace miranda
