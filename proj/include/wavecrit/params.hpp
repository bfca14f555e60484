#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace wavecrit {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sign of the frequency branch omega = ±(k cos g - m sin g)/|(k,m)|.
enum class Branch { Plus, Minus };

inline double branch_sign(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

/// Slope angle, viscosity prefactors and the two small parameters.
/// The stratification frequency is fixed to one.
struct PhysParams {
    double gamma = 0.65;
    double nu0 = 1.0;
    double kappa0 = 1.0;
    double eps = 0.2;
    double delta = 0.0;

    double nu() const;
    double kappa() const;
    double sin_g() const;
    double cos_g() const;
    /// Throws DomainError if any field is outside its admissible range.
    void validate() const;
};

struct PropagatingM {
    double m;
};
struct Decaying {
    cplx lambda;
};

/// One plane-wave label: frequency, tangential wavenumber and vertical structure.
struct ModeKey {
    double omega = 0.0;
    double k = 0.0;
    std::variant<PropagatingM, Decaying> vertical;
};

/// Checks the ModeKey invariants; throws DomainError on violation.
void check_mode_key(const ModeKey& key, double gamma, Branch branch);

struct CriticalCarrier {
    double k0 = 1.0;
    double m0 = 0.0;
    double omega0 = 0.0;
};

double dispersion_omega(double k, double m, double gamma, Branch branch);

std::pair<double, double> group_velocity(double k, double m, double gamma, Branch branch);

double criticality_zeta(double omega, double gamma);

/// Vertical wavenumber on the critical cone for the given tangential wavenumber,
/// chosen so that the group velocity points towards the slope.
CriticalCarrier critical_carrier(double gamma, double k0, Branch branch);

}  // namespace wavecrit
