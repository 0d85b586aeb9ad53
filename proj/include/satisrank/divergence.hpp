#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace satisrank {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Convex conjugates phi* of the tabulated phi-divergences, plus the CVaR
/// positive-part conjugate.
enum class DivergenceKind {
  KullbackLeibler,
  BurgEntropy,
  ChiSquared,
  ModifiedChiSquared,
  Hellinger,
  ChiDivergence,
  VariationDistance,
  CressieRead,
  CVaRIndicator,
};

/// Which conjugate is in force. `theta` is read only by ChiDivergence
/// (theta > 1) and CressieRead (theta >= 1/2, theta != 1).
struct DivergenceSpec {
  DivergenceKind kind = DivergenceKind::CVaRIndicator;
  double theta = 0.0;

  /// Throws ConfigError when theta is invalid for the kind.
  void validate() const;

  friend bool operator==(const DivergenceSpec&, const DivergenceSpec&) = default;
};

/// Interval of the real line. Infinite ends are always open.
struct Interval {
  double lower = -kInfinity;
  double upper = kInfinity;
  bool lower_open = true;
  bool upper_open = true;

  bool contains(double s) const noexcept {
    const bool above = lower_open ? s > lower : s >= lower;
    const bool below = upper_open ? s < upper : s <= upper;
    return above && below;
  }
  bool interior(double s) const noexcept { return s > lower && s < upper; }
  double width() const noexcept { return upper - lower; }
};

/// Lowercase CLI name: kl, burg, chi2, mod_chi2, hellinger, chi_div,
/// variation, cressie_read, cvar.
std::string_view kind_name(DivergenceKind kind);

/// Inverse of kind_name. Throws ConfigError on unknown names.
DivergenceKind parse_kind(std::string_view name);

/// phi*(s). Returns +inf outside the domain; never throws for finite s on a
/// valid spec.
double conjugate_value(const DivergenceSpec& spec, double s);

/// One element of the subdifferential of phi* at s. Kinks use fixed
/// selections: cvar at 0 -> 0, variation at -1 -> 0, mod_chi2 at -2 -> 0.
/// Throws DomainError when s is outside the domain.
double conjugate_subgradient(const DivergenceSpec& spec, double s);

/// Effective domain of phi*.
Interval conjugate_domain(const DivergenceSpec& spec);

}  // namespace satisrank
