#include "satisrank/divergence.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "satisrank/error.hpp"

namespace satisrank {
namespace {

constexpr std::array<std::pair<DivergenceKind, std::string_view>, 9> kNames{{
    {DivergenceKind::KullbackLeibler, "kl"},
    {DivergenceKind::BurgEntropy, "burg"},
    {DivergenceKind::ChiSquared, "chi2"},
    {DivergenceKind::ModifiedChiSquared, "mod_chi2"},
    {DivergenceKind::Hellinger, "hellinger"},
    {DivergenceKind::ChiDivergence, "chi_div"},
    {DivergenceKind::VariationDistance, "variation"},
    {DivergenceKind::CressieRead, "cressie_read"},
    {DivergenceKind::CVaRIndicator, "cvar"},
}};

[[noreturn]] void bad_theta(const DivergenceSpec& spec, const char* rule) {
  std::ostringstream os;
  os << "invalid theta " << spec.theta << " for " << kind_name(spec.kind) << ": " << rule;
  throw ConfigError("divergence", os.str());
}

// Exponent theta/(theta-1) of the chi-divergence conjugate.
double chi_power(double theta) { return theta / (theta - 1.0); }

// Exponent theta/(1-theta) of the Cressie-Read conjugate.
double cressie_power(double theta) { return theta / (1.0 - theta); }

}  // namespace

void DivergenceSpec::validate() const {
  switch (kind) {
    case DivergenceKind::ChiDivergence:
      if (!std::isfinite(theta) || theta <= 1.0) bad_theta(*this, "requires theta > 1");
      break;
    case DivergenceKind::CressieRead:
      if (!std::isfinite(theta) || theta == 1.0 || theta < 0.5) {
        bad_theta(*this, "requires theta >= 1/2 and theta != 1 (conjugate is not convex below 1/2)");
      }
      break;
    default:
      break;
  }
}

std::string_view kind_name(DivergenceKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

DivergenceKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ConfigError("divergence", "unknown divergence kind '" + std::string(name) + "'");
}

Interval conjugate_domain(const DivergenceSpec& spec) {
  spec.validate();
  Interval dom;
  switch (spec.kind) {
    case DivergenceKind::BurgEntropy:
    case DivergenceKind::ChiSquared:
    case DivergenceKind::Hellinger:
      dom.upper = 1.0;
      break;
    case DivergenceKind::VariationDistance:
      dom.upper = 1.0;
      dom.upper_open = false;
      break;
    case DivergenceKind::CressieRead:
      if (spec.theta < 1.0) {
        dom.upper = 1.0 / (1.0 - spec.theta);
      } else {
        dom.lower = -1.0 / (spec.theta - 1.0);
      }
      break;
    default:
      break;
  }
  return dom;
}

double conjugate_value(const DivergenceSpec& spec, double s) {
  spec.validate();
  switch (spec.kind) {
    case DivergenceKind::KullbackLeibler:
      return std::expm1(s);
    case DivergenceKind::BurgEntropy:
      return s < 1.0 ? -std::log1p(-s) : kInfinity;
    case DivergenceKind::ChiSquared:
      return s < 1.0 ? 2.0 - 2.0 * std::sqrt(1.0 - s) : kInfinity;
    case DivergenceKind::ModifiedChiSquared:
      return s < -2.0 ? -1.0 : s + 0.25 * s * s;
    case DivergenceKind::Hellinger:
      return s < 1.0 ? s / (1.0 - s) : kInfinity;
    case DivergenceKind::ChiDivergence: {
      const double theta = spec.theta;
      return s + (theta + 1.0) * std::pow(std::abs(s) / theta, chi_power(theta));
    }
    case DivergenceKind::VariationDistance:
      return s <= 1.0 ? std::max(-1.0, s) : kInfinity;
    case DivergenceKind::CressieRead: {
      const double theta = spec.theta;
      const double base = 1.0 - s * (1.0 - theta);
      if (!(base > 0.0)) return kInfinity;
      return (std::pow(base, cressie_power(theta)) - 1.0) / theta;
    }
    case DivergenceKind::CVaRIndicator:
      return s > 0.0 ? s : 0.0;
  }
  return kInfinity;
}

double conjugate_subgradient(const DivergenceSpec& spec, double s) {
  const Interval dom = conjugate_domain(spec);
  if (!std::isfinite(s) || !dom.contains(s)) {
    std::ostringstream os;
    os << "s = " << s << " is outside the domain of " << kind_name(spec.kind);
    throw DomainError("divergence", os.str());
  }
  switch (spec.kind) {
    case DivergenceKind::KullbackLeibler:
      return std::exp(s);
    case DivergenceKind::BurgEntropy:
      return 1.0 / (1.0 - s);
    case DivergenceKind::ChiSquared:
      return 1.0 / std::sqrt(1.0 - s);
    case DivergenceKind::ModifiedChiSquared:
      return s <= -2.0 ? 0.0 : 1.0 + 0.5 * s;
    case DivergenceKind::Hellinger: {
      const double d = 1.0 - s;
      return 1.0 / (d * d);
    }
    case DivergenceKind::ChiDivergence: {
      const double theta = spec.theta;
      const double p = chi_power(theta);
      if (s == 0.0) return 1.0;
      const double mag = (theta + 1.0) * p / theta * std::pow(std::abs(s) / theta, p - 1.0);
      return 1.0 + (s > 0.0 ? mag : -mag);
    }
    case DivergenceKind::VariationDistance:
      return s <= -1.0 ? 0.0 : 1.0;
    case DivergenceKind::CressieRead: {
      // d/ds (1/theta) b^p with b = 1 - s(1-theta) and p(1-theta)/theta = 1.
      const double base = 1.0 - s * (1.0 - spec.theta);
      return -std::pow(base, cressie_power(spec.theta) - 1.0);
    }
    case DivergenceKind::CVaRIndicator:
      return s > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace satisrank
