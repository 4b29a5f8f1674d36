#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "miranda/dual.hpp"
#include "miranda/expr.hpp"

namespace miranda {

// Where a map came from; echoed into certificates for reproducibility.
struct Provenance {
  enum class Kind { Parsed, Builtin, Bernstein, Derived };
  Kind kind = Kind::Parsed;
  std::string detail;  // expression text / builtin name / adapter description
  int degree = 0;      // Bernstein degree per axis, 0 otherwise

  std::string describe() const;
};

// Deterministic effort counters reported in place of wall-clock timings, so
// identical configurations produce byte-identical reports.
struct WorkCounters {
  std::uint64_t map_evaluations = 0;
  std::uint64_t newton_iterations = 0;
  std::uint64_t trace_steps = 0;

  void reset() { *this = WorkCounters{}; }
};

WorkCounters& work_counters();

class MapImpl {
 public:
  virtual ~MapImpl() = default;
  virtual int n_in() const = 0;
  virtual int n_out() const = 0;
  virtual void eval(std::span<const double> x, std::span<double> out) const = 0;
  virtual void eval(std::span<const Dual> x, std::span<Dual> out) const = 0;
  virtual bool smooth() const = 0;
  virtual const Provenance& provenance() const = 0;
};

// Immutable, cheaply copyable handle to an evaluatable map with forward-mode
// derivative access. All adapters below share the wrapped implementation.
class MapModel {
 public:
  MapModel() = default;
  explicit MapModel(std::shared_ptr<const MapImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  int n_in() const { return impl_->n_in(); }
  int n_out() const { return impl_->n_out(); }
  bool smooth() const { return impl_->smooth(); }
  const Provenance& provenance() const { return impl_->provenance(); }
  const std::shared_ptr<const MapImpl>& impl() const { return impl_; }

  // Throws EvalError on non-finite output or dimension mismatch.
  void eval_into(std::span<const double> x, std::span<double> out) const;
  void eval_into(std::span<const Dual> x, std::span<Dual> out) const;
  std::vector<double> operator()(std::span<const double> x) const;

  // Row-major n_out x n_in matrix of exact forward-mode partials.
  std::vector<double> jacobian(std::span<const double> x) const;

 private:
  std::shared_ptr<const MapImpl> impl_;
};

struct JacobianMethod {
  enum class Kind { ForwardDual, CentralDifference };
  Kind kind = Kind::ForwardDual;
  double step = 1e-5;  // central-difference base step, scaled per coordinate
};

struct JacobianEvaluation {
  std::vector<double> point;
  std::vector<double> matrix;  // row-major n_out x n_in
  int rows = 0;
  int cols = 0;
  JacobianMethod method;

  double entry(int r, int c) const { return matrix[static_cast<std::size_t>(r) * cols + c]; }
};

JacobianEvaluation jacobian(const MapModel& map, std::span<const double> x,
                            JacobianMethod method = {});

// Map construction ------------------------------------------------------------

MapModel parse_map(const std::string& text);
MapModel make_expr_map(std::vector<ExprPtr> components, int n_in, Provenance prov);

// Adapters (all pure views over the underlying map):
MapModel reduce_map(const MapModel& m, int keep_components);
MapModel component_map(const MapModel& m, int component);
MapModel restrict_map(const MapModel& m, int axis, double value);
MapModel negate_map(const MapModel& m);
MapModel scale_map(const MapModel& m, double factor);
// g_i(y) = f_{perm[i]}(x) with x_{perm[j]} = y_j; preserves the boundary
// condition structure under a relabeling of axes.
MapModel permute_map(const MapModel& m, std::vector<int> perm);
std::vector<double> unpermute_point(std::span<const double> y, std::span<const int> perm);

}  // namespace miranda
