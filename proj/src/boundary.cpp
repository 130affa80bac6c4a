#include "idpflow/boundary.hpp"

#include "idpflow/errors.hpp"

namespace idpflow {

std::string to_string(NonReflectingMethod m) {
  return m == NonReflectingMethod::godunov ? "godunov" : "characteristic";
}

NonReflectingMethod nonreflecting_method_from_string(const std::string& s) {
  if (s == "godunov") return NonReflectingMethod::godunov;
  if (s == "characteristic") return NonReflectingMethod::characteristic;
  throw ConfigError("unknown non-reflecting method '" + s + "' (godunov, characteristic)");
}

}  // namespace idpflow
