#pragma once

#include <cstdint>
#include <vector>

#include "lamexp/common.hpp"

namespace lamexp {

class Beta {
 public:
  explicit Beta(double value);
  static Beta reciprocal(const Lambda& lambda) { return Beta(1.0 / lambda.value()); }
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

using DigitSeq = std::vector<std::uint8_t>;

// Points of the orbit landing within this distance of an integer are
// snapped onto it and flagged.
inline constexpr double kSnapTol = 1e-12;

// {beta x}. Throws DomainError unless 0 <= x < 1.
double beta_map(const Beta& beta, double x);

struct OrbitStep {
  std::uint8_t digit = 0;
  long double next = 0.0L;
  bool near_integer = false;
};

// One greedy step y = beta x, digit floor(y), next = y - digit, computed in
// extended precision. When y is within kSnapTol of an integer k <= 1 the
// step lands exactly on k and is flagged.
OrbitStep beta_step(long double beta, long double x);

struct OrbitReport {
  DigitSeq digits;
  std::vector<long double> points;  // x_0 = x, x_k after k steps
  std::vector<std::size_t> unreliable;  // step indices (1-based) that were snapped
  // Width of an outward-rounded enclosure of x_n; once it approaches 1 the
  // remaining digits carry no information about x.
  long double shadow_width = 0.0L;
};

OrbitReport greedy_orbit(const Beta& beta, double x, int n);

// First n greedy digits of x in base beta.
DigitSeq greedy_digits(const Beta& beta, double x, int n);

// sum_{k <= n} d_k beta^-k in extended precision.
long double digit_value(const Beta& beta, const DigitSeq& digits);

struct OneExpansion {
  DigitSeq digits_of_1;   // first n greedy digits of 1 (zeros after termination)
  DigitSeq quasi_greedy;  // first n digits of the limit expansion of 1 from below
  bool terminated = false;  // digits_of_1 is finite
  std::size_t length = 0;   // index of its last nonzero digit when terminated
  bool boundary_convention = false;  // beta = 2, where the first digit is clipped to 1
};

OneExpansion expansion_of_one(const Beta& beta, int n);

// Every shift of seq is lexicographically <= the quasi-greedy expansion of 1
// on the available window.
bool parry_admissible(const DigitSeq& seq, const Beta& beta);
bool parry_admissible(const DigitSeq& seq, const DigitSeq& quasi_greedy);

// The Renyi orbit x_0 = 1, x_k = {beta x_{k-1}} lands within tol of an
// integer (so on 0 modulo 1) within n_max steps.
bool is_sft(const Beta& beta, int n_max, double tol = 1e-12);

// Root in (1/2, 1) of lambda^m + ... + lambda = 1, by bisection.
Lambda multinacci(int m, double tol = 1e-15);

// Shift on binary windows of length m with the single forbidden word 0 1^m.
// State index = binary value of the window, most significant bit oldest.
class Sft {
 public:
  explicit Sft(int m);

  int m() const { return m_; }
  std::size_t states() const { return std::size_t{1} << m_; }
  bool allowed(std::size_t from, int digit) const;
  std::size_t next_state(std::size_t from, int digit) const;
  bool edge(std::size_t from, std::size_t to) const;
  int row_sum(std::size_t from) const;
  // Dense 0/1 matrix; intended for small m.
  std::vector<std::vector<int>> dense() const;
  std::uint64_t forbidden_window() const { return (std::uint64_t{1} << m_) - 1; }

 private:
  int m_;
};

Sft forbidden_word_adjacency(int m);

struct PerronResult {
  double mu = 0.0;
  std::vector<double> v;  // normalised so that v[0] = 1
  std::size_t iterations = 0;
  bool shifted = false;  // converged only after switching to A + I
  std::vector<std::size_t> recurrent_component;
};

// Strongly connected components (each sorted), largest first.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Sft& sft);

PerronResult perron_eigenvalue(const Sft& sft, double tol = 1e-12, std::size_t max_iterations = 100000);

// Number of admissible words of length n. Throws OverflowError past 2^64.
std::uint64_t count_words(const Sft& sft, int n);

struct CylinderStats {
  double min_len = 0.0;
  double max_len = 0.0;
  std::uint64_t count = 0;
  double min_ratio = 0.0;  // min_len * beta^n
  double max_ratio = 0.0;
};

// Lengths of the images of the length-n cylinders under x = sum d_k beta^-k.
// Throws PreconditionViolation unless beta is the reciprocal of multinacci(m).
CylinderStats cylinder_stats(const Sft& sft, const Beta& beta, int n);

// Times n in [1, depth] with f^n(x) <= beta^(-kappa n).
std::vector<int> a_beta_membership(const Beta& beta, double kappa, double x, int depth);

}  // namespace lamexp
