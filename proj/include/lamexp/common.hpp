#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lamexp {

// Error kinds. Each maps to a distinct failure mode callers may want to
// tell apart (the CLI turns all of them into usage errors).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct LevelTooLarge : std::length_error {
  using std::length_error::length_error;
};
struct PreconditionViolation : std::logic_error {
  using std::logic_error::logic_error;
};
struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double diameter() const { return hi - lo; }
  double midpoint() const { return lo + 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// A contraction ratio in (1/2, 1), optionally tagged with the multinacci
// order m for which value^m + ... + value = 1.
class Lambda {
 public:
  explicit Lambda(double value);
  static Lambda tagged(double value, int multinacci_order);

  double value() const { return value_; }
  std::optional<int> multinacci_order() const { return order_; }
  operator double() const { return value_; }

 private:
  Lambda(double value, std::optional<int> order);
  double value_;
  std::optional<int> order_;
};

// Finite 0/1 string. Index 0 holds the first letter omega_1.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> bits);
  explicit Word(std::vector<std::uint8_t> bits);
  static Word from_string(std::string_view text);
  static Word from_index(std::uint64_t index, int length);  // omega_1 = most significant bit

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  void push_back(int bit);
  Word concat(const Word& tail) const;
  std::string to_string() const;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Seeded generator. Uniform reals are built from raw 64-bit output so the
// stream is identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [lo, hi], inclusive.
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lamexp
