#include "legfunnel/errors.hpp"

#include <sstream>

namespace legfunnel {

namespace {
std::string violation_message(double error, double psi, double elapsed)
{
    std::ostringstream os;
    os << "tracking error left the funnel: |e| = " << (error < 0 ? -error : error) << " N >= psi = " << psi
       << " N at " << elapsed << " s after the last event";
    return os.str();
}
}  // namespace

FunnelViolation::FunnelViolation(double error, double psi, double elapsed)
    : std::runtime_error(violation_message(error, psi, elapsed)), error_(error), psi_(psi), elapsed_(elapsed)
{
}

}  // namespace legfunnel
