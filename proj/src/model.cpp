#include "pnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "pnet/errors.hpp"

namespace pnet {
namespace {

constexpr double kSumTol = 1e-12;
constexpr double kRangeSlack = 1e-12;

void validate_dist(const ConnectednessDist& f, const char* name) {
  if (f.empty()) throw ValidationError(fmt::format("{}: empty connectedness distribution", name));
  double total = 0.0;
  for (const auto& m : f) {
    if (!std::isfinite(m.lambda) || m.lambda < 0.0)
      throw ValidationError(fmt::format("{}: lambda must be finite and >= 0 (got {})", name, m.lambda));
    if (!std::isfinite(m.prob) || m.prob < 0.0 || m.prob > 1.0)
      throw ValidationError(fmt::format("{}: prob must lie in [0,1] (got {})", name, m.prob));
    total += m.prob;
  }
  if (std::abs(total - 1.0) > kSumTol)
    throw ValidationError(fmt::format("{}: probabilities sum to {:.17g}, expected 1", name, total));
}

}  // namespace

double mean_lambda(const ConnectednessDist& f) {
  double s = 0.0;
  for (const auto& m : f) s += m.prob * m.lambda;
  return s;
}

double mean_lambda_sq(const ConnectednessDist& f) {
  double s = 0.0;
  for (const auto& m : f) s += m.prob * m.lambda * m.lambda;
  return s;
}

std::string_view kind_name(PayoffFn::Kind kind) {
  switch (kind) {
    case PayoffFn::Kind::Linear: return "linear";
    case PayoffFn::Kind::PowerConvex: return "power";
    case PayoffFn::Kind::CappedLinear: return "capped";
    case PayoffFn::Kind::Crra: return "crra";
    case PayoffFn::Kind::Step: return "step";
  }
  return "?";
}

PayoffFn::Kind payoff_kind_from_name(std::string_view name) {
  if (name == "linear") return PayoffFn::Kind::Linear;
  if (name == "power") return PayoffFn::Kind::PowerConvex;
  if (name == "capped") return PayoffFn::Kind::CappedLinear;
  if (name == "crra") return PayoffFn::Kind::Crra;
  if (name == "step") return PayoffFn::Kind::Step;
  throw ValidationError(fmt::format("unknown payoff kind '{}'", name));
}

void PayoffFn::validate() const {
  switch (kind) {
    case Kind::Linear: return;
    case Kind::PowerConvex:
      if (!(param >= 1.0) || !std::isfinite(param))
        throw ValidationError(fmt::format("power payoff needs p >= 1 (got {})", param));
      return;
    case Kind::CappedLinear:
    case Kind::Step:
      if (!(param > 0.0 && param < 1.0))
        throw ValidationError(fmt::format("{} payoff needs threshold in (0,1) (got {})", kind_name(kind), param));
      return;
    case Kind::Crra:
      if (!(param > 0.0 && param <= 1.0))
        throw ValidationError(fmt::format("crra payoff needs b in (0,1] (got {})", param));
      return;
  }
}

double PayoffFn::operator()(double x) const {
  switch (kind) {
    case Kind::Linear: return x;
    case Kind::PowerConvex: return std::pow(x, param);
    case Kind::CappedLinear: return std::min(x, param);
    case Kind::Crra: return (std::pow(x, param) - 1.0) / param;
    case Kind::Step: return x >= param ? 1.0 : 0.0;
  }
  return 0.0;
}

double payoff_eval(const PayoffFn& v, double x) {
  if (!(x >= -kRangeSlack && x <= 1.0 + kRangeSlack))
    throw ValidationError(fmt::format("payoff argument {} outside [0,1]", x));
  return v(std::clamp(x, 0.0, 1.0));
}

void ModelParams::validate() const {
  if (!(gamma_h >= 0.0 && gamma_h <= 1.0))
    throw ValidationError(fmt::format("gamma_h must lie in [0,1] (got {})", gamma_h));
  if (!(mu_h1 > 0.5 && mu_h1 < 1.0))
    throw ValidationError(fmt::format("mu_h1 must lie in (0.5,1) (got {})", mu_h1));
  if (!(mu_l1 > 0.0 && mu_l1 < 0.5))
    throw ValidationError(fmt::format("mu_l1 must lie in (0,0.5) (got {})", mu_l1));
  if (!(mu_s1 >= 0.0 && mu_s1 <= 1.0))
    throw ValidationError(fmt::format("mu_s1 must lie in [0,1] (got {})", mu_s1));
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError(fmt::format("q must lie in (0,1] (got {})", q));
  validate_dist(f_h, "f_h");
  validate_dist(f_l, "f_l");
  payoff.validate();
}

std::string_view class_name(SignalClass c) {
  switch (c) {
    case SignalClass::Good: return "good";
    case SignalClass::Int: return "int";
    case SignalClass::Bad: return "bad";
    case SignalClass::Empty: return "empty";
  }
  return "?";
}

double posterior_nonempty(double prior1, double pi1, double pi0) {
  if (!(pi1 >= 0.0 && pi0 >= 0.0)) throw ValidationError("signal likelihoods must be nonnegative");
  if (pi1 == 0.0 && pi0 == 0.0) throw ValidationError("signal never sent");
  const double w1 = pi1 * prior1;
  const double w0 = pi0 * (1.0 - prior1);
  return w1 / (w1 + w0);
}

int action(double posterior1) { return posterior1 >= 0.5 - kTieEps ? 1 : 0; }

SignalClass classify_signal(const ModelParams& params, double pi1, double pi0) {
  if (action(posterior_nonempty(params.mu_l1, pi1, pi0)) == 1) return SignalClass::Good;
  if (action(posterior_nonempty(params.mu_h1, pi1, pi0)) == 1) return SignalClass::Int;
  return SignalClass::Bad;
}

}  // namespace pnet
