#include "miranda/builtins.hpp"

#include <stdexcept>

namespace miranda {

namespace {

MapModel from_text(const std::string& name, const std::string& text) {
  std::vector<ExprPtr> comps = parse_map_text(text);
  int n_in = 0;
  for (const auto& c : comps) n_in = std::max(n_in, max_variable(*c));
  Provenance prov;
  prov.kind = Provenance::Kind::Builtin;
  prov.detail = name;
  return make_expr_map(std::move(comps), std::max(n_in, 1), std::move(prov));
}

std::string identity_text(int n, const std::string& factor) {
  std::string text;
  for (int i = 1; i <= n; ++i) {
    if (i > 1) text += " ; ";
    if (!factor.empty()) text += factor + "*";
    text += "x" + std::to_string(i);
  }
  return text;
}

std::string separable_cubic_text(int n) {
  std::string text;
  for (int i = 1; i <= n; ++i) {
    if (i > 1) text += " ; ";
    const std::string v = "x" + std::to_string(i);
    text += v + "*(" + v + "^2 - 0.25)";
  }
  return text;
}

int require_dim(const std::string& name, int n, int fixed) {
  if (n == 0) return fixed;
  if (n != fixed)
    throw std::invalid_argument("builtin '" + name + "' is only defined for n = " +
                                std::to_string(fixed));
  return fixed;
}

}  // namespace

MapModel builtin(const std::string& name, int n) {
  if (name == "identity") {
    if (n < 1) throw std::invalid_argument("builtin 'identity' needs a dimension");
    return from_text(name, identity_text(n, ""));
  }
  if (name == "scaled_identity") {
    if (n < 1) throw std::invalid_argument("builtin 'scaled_identity' needs a dimension");
    return from_text(name, identity_text(n, "2"));
  }
  if (name == "separable_cubic") {
    if (n < 1) throw std::invalid_argument("builtin 'separable_cubic' needs a dimension");
    return from_text(name, separable_cubic_text(n));
  }
  if (name == "cubic2d") {
    require_dim(name, n, 2);
    return from_text(name, "x1^3 - 0.25*x1 + 0.1*x2 ; x2");
  }
  if (name == "nonsmooth_abs") {
    require_dim(name, n, 2);
    return from_text(name, "x1 + 0.3*abs(x2) - 0.15 ; x2");
  }
  if (name == "loop2d") {
    require_dim(name, n, 2);
    return from_text(name, "x1*((x1 - 0.3)^2 + x2^2 - 0.04) ; x2");
  }
  if (name == "tanh_steep") {
    require_dim(name, n, 2);
    return from_text(name, "tanh(10*x1) ; x2");
  }
  throw std::invalid_argument("unknown builtin map '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"identity",      "scaled_identity", "cubic2d", "separable_cubic",
          "nonsmooth_abs", "loop2d",          "tanh_steep"};
}

}  // namespace miranda
