#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pnet {

/// Indifference band around posterior 0.5; ties go to action 1.
inline constexpr double kTieEps = 1e-12;

enum class Type : std::uint8_t { H = 0, L = 1 };

inline constexpr std::array<Type, 2> kTypes{Type::H, Type::L};

constexpr std::size_t index(Type t) { return static_cast<std::size_t>(t); }
constexpr Type other(Type t) { return t == Type::H ? Type::L : Type::H; }
constexpr char type_char(Type t) { return t == Type::H ? 'h' : 'l'; }

/// One atom of a finite connectedness distribution.
struct Mass {
  double lambda = 0.0;
  double prob = 0.0;
  friend bool operator==(const Mass&, const Mass&) = default;
};

using ConnectednessDist = std::vector<Mass>;

double mean_lambda(const ConnectednessDist& f);
double mean_lambda_sq(const ConnectednessDist& f);

/// Sender payoff v(x) over the fraction x of receivers taking action 1.
///
/// Linear, PowerConvex and CappedLinear are the continuous, weakly increasing,
/// bounded payoffs with v(0)=0. Crra and Step break that normalization on
/// purpose: v(0)=-1/b for Crra and Step is discontinuous at its threshold.
struct PayoffFn {
  enum class Kind : std::uint8_t { Linear, PowerConvex, CappedLinear, Crra, Step };

  Kind kind = Kind::Linear;
  /// Exponent p, threshold x̄, or CRRA coefficient b depending on kind.
  double param = 0.0;

  static PayoffFn linear() { return {Kind::Linear, 0.0}; }
  static PayoffFn power_convex(double p) { return {Kind::PowerConvex, p}; }
  static PayoffFn capped_linear(double x_bar) { return {Kind::CappedLinear, x_bar}; }
  static PayoffFn crra(double b) { return {Kind::Crra, b}; }
  static PayoffFn step(double x_bar) { return {Kind::Step, x_bar}; }

  /// False for Crra and Step.
  bool normalized() const { return kind != Kind::Crra && kind != Kind::Step; }
  /// Linear or PowerConvex.
  bool convex() const { return kind == Kind::Linear || kind == Kind::PowerConvex; }

  void validate() const;
  double operator()(double x) const;

  friend bool operator==(const PayoffFn&, const PayoffFn&) = default;
};

std::string_view kind_name(PayoffFn::Kind kind);
PayoffFn::Kind payoff_kind_from_name(std::string_view name);

struct ModelParams {
  double gamma_h = 0.5;
  double mu_h1 = 0.6;
  double mu_l1 = 0.4;
  double mu_s1 = 0.5;
  double q = 1.0;
  ConnectednessDist f_h{{1.0, 1.0}};
  ConnectednessDist f_l{{1.0, 1.0}};
  PayoffFn payoff = PayoffFn::linear();

  double gamma(Type t) const { return t == Type::H ? gamma_h : 1.0 - gamma_h; }
  double prior1(Type t) const { return t == Type::H ? mu_h1 : mu_l1; }
  double prior0(Type t) const { return 1.0 - prior1(t); }
  const ConnectednessDist& f(Type t) const { return t == Type::H ? f_h : f_l; }
  /// Link-probability multiplier between a type-a and a type-b node.
  double affinity(Type a, Type b) const { return a == b ? 1.0 : q; }

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class SignalClass : std::uint8_t { Good, Int, Bad, Empty };

std::string_view class_name(SignalClass c);

/// Bayes posterior of state 1 after a non-empty signal with likelihoods (pi1, pi0).
double posterior_nonempty(double prior1, double pi1, double pi0);

/// Best response: 1 iff the posterior of state 1 is at least one half.
int action(double posterior1);

SignalClass classify_signal(const ModelParams& params, double pi1, double pi0);

/// v(x); throws ValidationError for x outside [0,1].
double payoff_eval(const PayoffFn& v, double x);

}  // namespace pnet
