#include "idpflow/gas.hpp"

#include <sstream>

namespace idpflow {

GasLaw::GasLaw(double gamma) : gamma_(gamma), gm1_(gamma - 1.) {
  if (!(gamma > 1.) || !(gamma <= 3.))
    throw DomainError("gamma must lie in (1, 3], got " + std::to_string(gamma));
}

void throw_not_admissible(const char* op, const double* u, int n) {
  std::ostringstream os;
  os.precision(17);
  os << op << ": state not admissible (";
  for (int k = 0; k < n; ++k) os << (k ? ", " : "") << u[k];
  os << ")";
  throw DomainError(os.str());
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::supersonic_inflow: return "supersonic_inflow";
    case Regime::subsonic_inflow: return "subsonic_inflow";
    case Regime::subsonic_outflow: return "subsonic_outflow";
    case Regime::supersonic_outflow: return "supersonic_outflow";
  }
  return "unknown";
}

}  // namespace idpflow
