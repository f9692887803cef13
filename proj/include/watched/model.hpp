#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

// Natural units throughout: hbar = c = 1 and every frequency is measured in
// units of the atomic transition frequency, so omega0 == 1 for all shipped
// configurations. Lengths are in units of c / omega0, times in 1 / omega0.
namespace watched {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

inline constexpr double kUnitTolerance = 1e-12;

struct AtomDipole {
  Vec3 dipole_dir = Vec3::UnitZ();

  bool operator==(const AtomDipole&) const = default;
};

struct DetectorAtom {
  Vec3 position = Vec3::Zero();
  Vec3 dipole_dir = Vec3::UnitZ();
  // Relative ionization dipole; the absolute scale is fixed by the system's beta.
  double mu_c_scale = 1.0;

  bool operator==(const DetectorAtom&) const = default;
};

enum class DosShape { Flat, PowerLaw };

// Density of ionization states rho(omega) on [omega_i, omega_cut_c].
struct IonizationDos {
  DosShape shape = DosShape::Flat;
  double exponent = 0.0;
  double omega_cut_c = 3.0;
  double normalization = 1.0;  // rho(omega0)

  double density(double omega, double omega0 = 1.0) const;

  bool operator==(const IonizationDos&) const = default;
};

struct PhysicalSystem {
  double omega0 = 1.0;
  double gamma = 0.01;
  double omega_i = 0.3;
  double beta = 0.05;
  AtomDipole atom;
  std::vector<DetectorAtom> detector_atoms;
  IonizationDos dos;

  // Atomic dipole magnitude back-derived from gamma.
  double mu_a() const;
  // Ionization dipole magnitude of one detector atom, back-derived from beta
  // and rho(omega0), times the atom's relative scale.
  double mu_c(const DetectorAtom& atom) const;

  bool operator==(const PhysicalSystem&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool usable() const { return violations.empty(); }
  bool empty() const { return violations.empty() && warnings.empty(); }
};

// Hard cap on gamma / omega0 for the Weisskopf-Wigner regime.
inline constexpr double kMaxGammaRatio = 0.1;

ValidationReport validate(const PhysicalSystem& system);

bool is_unit(const Vec3& v, double tol = kUnitTolerance);

}  // namespace watched
