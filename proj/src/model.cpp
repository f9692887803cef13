#include "watched/model.hpp"

#include <cmath>
#include <sstream>

#include "watched/analytic.hpp"

namespace watched {

double IonizationDos::density(double omega, double omega0) const {
  switch (shape) {
    case DosShape::Flat:
      return normalization;
    case DosShape::PowerLaw:
      return normalization * std::pow(omega / omega0, exponent);
  }
  return normalization;
}

double PhysicalSystem::mu_a() const { return analytic::mu_a_from_gamma(omega0, gamma); }

double PhysicalSystem::mu_c(const DetectorAtom& atom) const {
  return atom.mu_c_scale * analytic::mu_c_from_beta(omega0, beta, dos.normalization);
}

bool is_unit(const Vec3& v, double tol) { return std::abs(v.norm() - 1.0) <= tol; }

ValidationReport validate(const PhysicalSystem& s) {
  ValidationReport report;
  auto violate = [&](const std::string& what) { report.violations.push_back(what); };

  if (!(s.omega0 > 0.0)) violate("omega0 > 0");
  if (!(s.gamma > 0.0)) violate("gamma > 0");
  if (s.gamma > kMaxGammaRatio * s.omega0) {
    violate("gamma <= 0.1*omega0");
    report.warnings.push_back("outside WW regime: gamma/omega0 = " + std::to_string(s.gamma / s.omega0));
  }
  if (!(s.omega_i > 0.0)) violate("omega_i > 0");
  if (!(s.omega_i < s.omega0)) violate("omega_i < omega0");
  if (!(s.beta >= 0.0)) violate("beta >= 0");
  if (!is_unit(s.atom.dipole_dir)) violate("|atom.dipole_dir| = 1");

  for (std::size_t i = 0; i < s.detector_atoms.size(); ++i) {
    const auto& d = s.detector_atoms[i];
    if (!is_unit(d.dipole_dir)) violate("|detector_atoms[" + std::to_string(i) + "].dipole_dir| = 1");
    if (!(d.mu_c_scale >= 0.0)) violate("detector_atoms[" + std::to_string(i) + "].mu_c_scale >= 0");
  }

  if (!(s.dos.omega_cut_c > s.omega0)) violate("dos.omega_cut_c > omega0");
  if (!(s.dos.normalization >= 0.0)) violate("dos.normalization >= 0");
  if (s.dos.shape == DosShape::PowerLaw && s.omega_i > 0.0) {
    if (!(s.dos.density(s.omega_i, s.omega0) >= 0.0) ||
        !(s.dos.density(s.dos.omega_cut_c, s.omega0) >= 0.0)) {
      violate("rho(omega) >= 0 on [omega_i, omega_cut_c]");
    }
  }

  if (report.usable()) {
    const auto regime = analytic::magnitude_checks(s);
    if (!regime.li_small) {
      std::ostringstream os;
      os << "L*I = " << regime.li << " is not small";
      report.warnings.push_back(os.str());
    }
    if (!regime.self_energy_small) {
      std::ostringstream os;
      os << "mu_a^2*I/omega0 = " << regime.self_energy << " is not small";
      report.warnings.push_back(os.str());
    }
  }
  return report;
}

}  // namespace watched
