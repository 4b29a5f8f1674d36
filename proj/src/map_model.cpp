#include "miranda/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace miranda {

WorkCounters& work_counters() {
  static WorkCounters counters;
  return counters;
}

std::string Provenance::describe() const {
  switch (kind) {
    case Kind::Parsed:
      return "parsed: " + detail;
    case Kind::Builtin:
      return "builtin: " + detail;
    case Kind::Bernstein:
      return "bernstein(degree " + std::to_string(degree) + ") of " + detail;
    case Kind::Derived:
      return detail;
  }
  return detail;
}

namespace {

template <typename T>
void check_finite_out(std::span<const T> out) {
  for (const T& v : out) {
    if (!std::isfinite(value_of(v))) throw EvalError("non-finite map output");
  }
}

class ExprMap final : public MapImpl {
 public:
  ExprMap(std::vector<ExprPtr> comps, int n_in, Provenance prov)
      : comps_(std::move(comps)), n_in_(n_in), prov_(std::move(prov)) {
    smooth_ = true;
    for (const auto& c : comps_) {
      if (contains_abs(*c)) smooth_ = false;
    }
  }

  int n_in() const override { return n_in_; }
  int n_out() const override { return static_cast<int>(comps_.size()); }
  bool smooth() const override { return smooth_; }
  const Provenance& provenance() const override { return prov_; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

 private:
  template <typename T>
  void eval_impl(std::span<const T> x, std::span<T> out) const {
    for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = eval_expr(*comps_[i], x);
  }

  std::vector<ExprPtr> comps_;
  int n_in_;
  bool smooth_;
  Provenance prov_;
};

// Shared base for single-parent adapters.
class Adapter : public MapImpl {
 public:
  Adapter(MapModel parent, Provenance prov)
      : parent_(std::move(parent)), prov_(std::move(prov)) {}

  bool smooth() const override { return parent_.smooth(); }
  const Provenance& provenance() const override { return prov_; }

 protected:
  MapModel parent_;
  Provenance prov_;
};

class ReduceMap final : public Adapter {
 public:
  ReduceMap(MapModel parent, int keep, Provenance prov)
      : Adapter(std::move(parent), std::move(prov)), keep_(keep) {}

  int n_in() const override { return parent_.n_in(); }
  int n_out() const override { return keep_; }
  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

 private:
  template <typename T>
  void eval_impl(std::span<const T> x, std::span<T> out) const {
    std::vector<T> full(static_cast<std::size_t>(parent_.n_out()));
    parent_.impl()->eval(x, std::span<T>(full));
    std::copy(full.begin(), full.begin() + keep_, out.begin());
  }

  int keep_;
};

class ComponentMap final : public Adapter {
 public:
  ComponentMap(MapModel parent, int comp, Provenance prov)
      : Adapter(std::move(parent), std::move(prov)), comp_(comp) {}

  int n_in() const override { return parent_.n_in(); }
  int n_out() const override { return 1; }
  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

 private:
  template <typename T>
  void eval_impl(std::span<const T> x, std::span<T> out) const {
    std::vector<T> full(static_cast<std::size_t>(parent_.n_out()));
    parent_.impl()->eval(x, std::span<T>(full));
    out[0] = full[static_cast<std::size_t>(comp_)];
  }

  int comp_;
};

class RestrictMap final : public Adapter {
 public:
  RestrictMap(MapModel parent, int axis, double value, Provenance prov)
      : Adapter(std::move(parent), std::move(prov)), axis_(axis), value_(value) {}

  int n_in() const override { return parent_.n_in() - 1; }
  int n_out() const override { return parent_.n_out(); }
  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

 private:
  template <typename T>
  void eval_impl(std::span<const T> x, std::span<T> out) const {
    std::vector<T> full(static_cast<std::size_t>(parent_.n_in()));
    for (int i = 0, j = 0; i < parent_.n_in(); ++i) {
      if (i == axis_)
        full[static_cast<std::size_t>(i)] = T(value_);
      else
        full[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(j++)];
    }
    parent_.impl()->eval(std::span<const T>(full), out);
  }

  int axis_;
  double value_;
};

class ScaleMap final : public Adapter {
 public:
  ScaleMap(MapModel parent, double factor, Provenance prov)
      : Adapter(std::move(parent), std::move(prov)), factor_(factor) {}

  int n_in() const override { return parent_.n_in(); }
  int n_out() const override { return parent_.n_out(); }
  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

 private:
  template <typename T>
  void eval_impl(std::span<const T> x, std::span<T> out) const {
    parent_.impl()->eval(x, out);
    for (auto& v : out) v = v * T(factor_);
  }

  double factor_;
};

class PermuteMap final : public Adapter {
 public:
  PermuteMap(MapModel parent, std::vector<int> perm, Provenance prov)
      : Adapter(std::move(parent), std::move(prov)), perm_(std::move(perm)) {}

  int n_in() const override { return parent_.n_in(); }
  int n_out() const override { return parent_.n_out(); }
  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

 private:
  template <typename T>
  void eval_impl(std::span<const T> y, std::span<T> out) const {
    const std::size_t n = perm_.size();
    std::vector<T> x(n);
    for (std::size_t j = 0; j < n; ++j) x[static_cast<std::size_t>(perm_[j])] = y[j];
    std::vector<T> f(n);
    parent_.impl()->eval(std::span<const T>(x), std::span<T>(f));
    for (std::size_t i = 0; i < n; ++i) out[i] = f[static_cast<std::size_t>(perm_[i])];
  }

  std::vector<int> perm_;
};

}  // namespace

void MapModel::eval_into(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != n_in() || static_cast<int>(out.size()) != n_out())
    throw EvalError("dimension mismatch in map evaluation");
  ++work_counters().map_evaluations;
  impl_->eval(x, out);
  check_finite_out(std::span<const double>(out.data(), out.size()));
}

void MapModel::eval_into(std::span<const Dual> x, std::span<Dual> out) const {
  if (static_cast<int>(x.size()) != n_in() || static_cast<int>(out.size()) != n_out())
    throw EvalError("dimension mismatch in map evaluation");
  ++work_counters().map_evaluations;
  impl_->eval(x, out);
  check_finite_out(std::span<const Dual>(out.data(), out.size()));
}

std::vector<double> MapModel::operator()(std::span<const double> x) const {
  std::vector<double> out(static_cast<std::size_t>(n_out()));
  eval_into(x, out);
  return out;
}

std::vector<double> MapModel::jacobian(std::span<const double> x) const {
  const int rows = n_out();
  const int cols = n_in();
  std::vector<double> m(static_cast<std::size_t>(rows) * cols);
  std::vector<Dual> dx(x.begin(), x.end());
  std::vector<Dual> dout(static_cast<std::size_t>(rows));
  for (int j = 0; j < cols; ++j) {
    dx[static_cast<std::size_t>(j)].d = 1.0;
    eval_into(std::span<const Dual>(dx), std::span<Dual>(dout));
    for (int r = 0; r < rows; ++r)
      m[static_cast<std::size_t>(r) * cols + j] = dout[static_cast<std::size_t>(r)].d;
    dx[static_cast<std::size_t>(j)].d = 0.0;
  }
  return m;
}

JacobianEvaluation jacobian(const MapModel& map, std::span<const double> x,
                            JacobianMethod method) {
  JacobianEvaluation je;
  je.point.assign(x.begin(), x.end());
  je.rows = map.n_out();
  je.cols = map.n_in();
  je.method = method;
  if (method.kind == JacobianMethod::Kind::ForwardDual) {
    je.matrix = map.jacobian(x);
    return je;
  }
  je.matrix.assign(static_cast<std::size_t>(je.rows) * je.cols, 0.0);
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> fplus(static_cast<std::size_t>(je.rows));
  std::vector<double> fminus(static_cast<std::size_t>(je.rows));
  for (int j = 0; j < je.cols; ++j) {
    const double h = method.step * (1.0 + std::abs(x[static_cast<std::size_t>(j)]));
    xp[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + h;
    map.eval_into(xp, fplus);
    xp[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] - h;
    map.eval_into(xp, fminus);
    xp[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
    for (int r = 0; r < je.rows; ++r)
      je.matrix[static_cast<std::size_t>(r) * je.cols + j] =
          (fplus[static_cast<std::size_t>(r)] - fminus[static_cast<std::size_t>(r)]) /
          (2.0 * h);
  }
  return je;
}

MapModel make_expr_map(std::vector<ExprPtr> components, int n_in, Provenance prov) {
  for (const auto& c : components) {
    if (max_variable(*c) > n_in)
      throw ParseError("expression references x" + std::to_string(max_variable(*c)) +
                           " beyond declared dimension " + std::to_string(n_in),
                       0);
  }
  return MapModel(std::make_shared<ExprMap>(std::move(components), n_in, std::move(prov)));
}

MapModel parse_map(const std::string& text) {
  std::vector<ExprPtr> comps = parse_map_text(text);
  int n_in = 0;
  for (const auto& c : comps) n_in = std::max(n_in, max_variable(*c));
  n_in = std::max(n_in, 1);
  Provenance prov;
  prov.kind = Provenance::Kind::Parsed;
  prov.detail = text;
  return make_expr_map(std::move(comps), n_in, std::move(prov));
}

MapModel reduce_map(const MapModel& m, int keep_components) {
  if (keep_components < 1 || keep_components > m.n_out())
    throw std::invalid_argument("reduce_map: bad component count");
  Provenance prov{Provenance::Kind::Derived,
                  "first " + std::to_string(keep_components) + " components of [" +
                      m.provenance().describe() + "]",
                  0};
  return MapModel(std::make_shared<ReduceMap>(m, keep_components, std::move(prov)));
}

MapModel component_map(const MapModel& m, int component) {
  if (component < 0 || component >= m.n_out())
    throw std::invalid_argument("component_map: index out of range");
  Provenance prov{Provenance::Kind::Derived,
                  "component " + std::to_string(component + 1) + " of [" +
                      m.provenance().describe() + "]",
                  0};
  return MapModel(std::make_shared<ComponentMap>(m, component, std::move(prov)));
}

MapModel restrict_map(const MapModel& m, int axis, double value) {
  if (axis < 0 || axis >= m.n_in())
    throw std::invalid_argument("restrict_map: axis out of range");
  Provenance prov{Provenance::Kind::Derived,
                  "[" + m.provenance().describe() + "] with x" + std::to_string(axis + 1) +
                      " = " + std::to_string(value),
                  0};
  return MapModel(std::make_shared<RestrictMap>(m, axis, value, std::move(prov)));
}

MapModel negate_map(const MapModel& m) { return scale_map(m, -1.0); }

MapModel scale_map(const MapModel& m, double factor) {
  Provenance prov{Provenance::Kind::Derived,
                  std::to_string(factor) + " * [" + m.provenance().describe() + "]", 0};
  return MapModel(std::make_shared<ScaleMap>(m, factor, std::move(prov)));
}

MapModel permute_map(const MapModel& m, std::vector<int> perm) {
  if (static_cast<int>(perm.size()) != m.n_in() || m.n_in() != m.n_out())
    throw std::invalid_argument("permute_map: needs a square map and a full permutation");
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    if (p < 0 || p >= static_cast<int>(perm.size()) || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("permute_map: not a permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  Provenance prov{Provenance::Kind::Derived, "axis permutation of [" + m.provenance().describe() + "]",
                  0};
  return MapModel(std::make_shared<PermuteMap>(m, std::move(perm), std::move(prov)));
}

std::vector<double> unpermute_point(std::span<const double> y, std::span<const int> perm) {
  std::vector<double> x(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) x[static_cast<std::size_t>(perm[j])] = y[j];
  return x;
}

}  // namespace miranda
