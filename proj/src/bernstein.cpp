#include "miranda/bernstein.hpp"

#include <cmath>
#include <stdexcept>

#include "miranda/grid.hpp"
#include "miranda/linalg.hpp"

namespace miranda {

namespace {

// Bernstein basis values b_{k,d}(u), k = 0..d, via the stable de Casteljau-style
// recurrence. Works for double and Dual alike.
template <typename T>
void bernstein_basis(T u, int degree, std::vector<T>& basis) {
  basis.assign(static_cast<std::size_t>(degree) + 1, T(0.0));
  basis[0] = T(1.0);
  const T one_minus = T(1.0) - u;
  for (int d = 1; d <= degree; ++d) {
    basis[static_cast<std::size_t>(d)] = basis[static_cast<std::size_t>(d - 1)] * u;
    for (int k = d - 1; k > 0; --k)
      basis[static_cast<std::size_t>(k)] =
          basis[static_cast<std::size_t>(k)] * one_minus +
          basis[static_cast<std::size_t>(k - 1)] * u;
    basis[0] = basis[0] * one_minus;
  }
}

class BernsteinMap final : public MapImpl {
 public:
  BernsteinMap(const Cuboid& box, int degree, int n_out, std::vector<double> coeffs,
               Provenance prov)
      : box_(box),
        degree_(degree),
        n_out_(n_out),
        coeffs_(std::move(coeffs)),
        prov_(std::move(prov)) {}

  int n_in() const override { return box_.n(); }
  int n_out() const override { return n_out_; }
  bool smooth() const override { return true; }
  const Provenance& provenance() const override { return prov_; }

  void eval(std::span<const double> x, std::span<double> out) const override {
    eval_impl(x, out);
  }
  void eval(std::span<const Dual> x, std::span<Dual> out) const override {
    eval_impl(x, out);
  }

  // Coefficient multi-indices are row-major with the last axis fastest; one
  // block of (degree+1)^n per output component.
  template <typename T>
  void eval_impl(std::span<const T> x, std::span<T> out) const {
    const int n = box_.n();
    const std::size_t stride = coeffs_.size() / static_cast<std::size_t>(n_out_);

    std::vector<std::vector<T>> basis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const T u = (x[static_cast<std::size_t>(i)] - T(box_.lower[static_cast<std::size_t>(i)])) /
                  T(box_.extent(i));
      bernstein_basis(u, degree_, basis[static_cast<std::size_t>(i)]);
    }

    // Contract one axis at a time, last axis first.
    const std::size_t width = static_cast<std::size_t>(degree_) + 1;
    std::vector<T> buf, next;
    for (int c = 0; c < n_out_; ++c) {
      buf.assign(coeffs_.begin() + static_cast<std::ptrdiff_t>(c * stride),
                 coeffs_.begin() + static_cast<std::ptrdiff_t>((c + 1) * stride));
      std::size_t rows = stride / width;
      for (int axis = n - 1; axis >= 0; --axis) {
        const std::vector<T>& b = basis[static_cast<std::size_t>(axis)];
        next.assign(rows, T(0.0));
        for (std::size_t r = 0; r < rows; ++r) {
          T acc(0.0);
          const std::size_t base = r * width;
          for (std::size_t k = 0; k < width; ++k) acc = acc + buf[base + k] * b[k];
          next[r] = acc;
        }
        buf.swap(next);
        rows /= width;
      }
      out[static_cast<std::size_t>(c)] = buf[0];
    }
  }

 private:
  Cuboid box_;
  int degree_;
  int n_out_;
  std::vector<double> coeffs_;
  Provenance prov_;
};

}  // namespace

BernsteinBuild bernstein_approximate(const MapModel& source, const Cuboid& box, int degree,
                                     int error_samples_per_axis) {
  if (degree < 1) throw std::invalid_argument("bernstein_approximate: degree must be >= 1");
  if (source.n_in() != box.n())
    throw std::invalid_argument("bernstein_approximate: dimension mismatch");

  const int n = box.n();
  const int n_out = source.n_out();
  const std::size_t width = static_cast<std::size_t>(degree) + 1;
  std::size_t stride = 1;
  for (int i = 0; i < n; ++i) stride *= width;

  std::vector<double> coeffs(stride * static_cast<std::size_t>(n_out));
  std::vector<int> counts(static_cast<std::size_t>(n), degree + 1);
  std::vector<double> node(static_cast<std::size_t>(n));
  std::vector<double> val(static_cast<std::size_t>(n_out));
  std::size_t flat = 0;
  for_each_multi_index(counts, [&](const std::vector<int>& idx) {
    for (int i = 0; i < n; ++i)
      node[static_cast<std::size_t>(i)] =
          grid_node(box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)],
                    degree + 1, idx[static_cast<std::size_t>(i)]);
    source.eval_into(node, val);
    for (int c = 0; c < n_out; ++c)
      coeffs[static_cast<std::size_t>(c) * stride + flat] = val[static_cast<std::size_t>(c)];
    ++flat;
  });

  Provenance prov;
  prov.kind = Provenance::Kind::Bernstein;
  prov.degree = degree;
  prov.detail = source.provenance().describe();

  BernsteinBuild build;
  build.approximant =
      MapModel(std::make_shared<BernsteinMap>(box, degree, n_out, std::move(coeffs), prov));

  if (error_samples_per_axis <= 0) error_samples_per_axis = n <= 2 ? 101 : 21;
  build.error_samples_per_axis = error_samples_per_axis;

  std::vector<int> err_counts(static_cast<std::size_t>(n), error_samples_per_axis);
  std::vector<double> approx(static_cast<std::size_t>(n_out));
  double worst = 0.0;
  for_each_multi_index(err_counts, [&](const std::vector<int>& idx) {
    for (int i = 0; i < n; ++i)
      node[static_cast<std::size_t>(i)] =
          grid_node(box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)],
                    error_samples_per_axis, idx[static_cast<std::size_t>(i)]);
    source.eval_into(node, val);
    build.approximant.eval_into(node, approx);
    for (int c = 0; c < n_out; ++c)
      val[static_cast<std::size_t>(c)] -= approx[static_cast<std::size_t>(c)];
    worst = std::max(worst, norm2(val));
  });
  build.measured_sup_error = worst;
  return build;
}

MapModel bernstein_smooth(const SmoothingRequest& request, const Cuboid& box,
                          double* measured_error) {
  if (request.eta <= 0.0)
    throw std::invalid_argument("bernstein_smooth: eta must be positive");
  BernsteinBuild build = bernstein_approximate(request.source, box, request.degree);
  if (measured_error != nullptr) *measured_error = build.measured_sup_error;
  if (build.measured_sup_error > 0.5 * request.eta)
    throw SolveError(SolveFailure::Unsupported,
                     "bernstein_smooth: measured sup error " +
                         std::to_string(build.measured_sup_error) +
                         " exceeds eta/2; raise the degree");
  const BoundaryReport source_report = check_miranda(request.source, box);
  if (source_report.pass()) {
    const BoundaryReport approx_report = check_miranda(build.approximant, box);
    if (!approx_report.pass())
      throw SolveError(SolveFailure::MirandaFailed,
                       "bernstein_smooth: boundary condition lost under smoothing");
  }
  return build.approximant;
}

}  // namespace miranda
