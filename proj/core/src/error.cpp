#include "llmc/error.hpp"

#include <sstream>

namespace llmc {

namespace {

std::string describe_quadrature(const std::string& what, double l, double r, double err) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (worst subinterval [" << l << ", " << r << "], error estimate " << err << ")";
  return os.str();
}

std::string describe_stiffness(double x, double drift, double dt) {
  std::ostringstream os;
  os.precision(17);
  os << "flow step too stiff: x=" << x << ", phi(x)=" << drift << ", dt=" << dt;
  return os.str();
}

}  // namespace

QuadratureError::QuadratureError(const std::string& what, double worst_left, double worst_right,
                                 double worst_error)
    : NumericalError(describe_quadrature(what, worst_left, worst_right, worst_error)),
      worst_left_(worst_left),
      worst_right_(worst_right),
      worst_error_(worst_error) {}

StiffnessError::StiffnessError(double x, double drift, double dt)
    : NumericalError(describe_stiffness(x, drift, dt)), x_(x), drift_(drift), dt_(dt) {}

}  // namespace llmc
