#include "lamexp/common.hpp"

#include <cmath>

namespace lamexp {

Lambda::Lambda(double value) : Lambda(value, std::nullopt) {}

Lambda::Lambda(double value, std::optional<int> order) : value_(value), order_(order) {
  if (!(value > 0.5 && value < 1.0)) {
    throw DomainError("lambda must lie in (1/2, 1), got " + std::to_string(value));
  }
  if (order_) {
    if (*order_ < 2) throw DomainError("multinacci order must be at least 2");
    double sum = 0.0;
    for (int i = *order_; i >= 1; --i) sum = value * (1.0 + sum);
    if (std::fabs(sum - 1.0) >= 1e-12) {
      throw DomainError("value is not the multinacci number of order " + std::to_string(*order_));
    }
  }
}

Lambda Lambda::tagged(double value, int multinacci_order) { return Lambda(value, multinacci_order); }

Word::Word(std::initializer_list<int> bits) {
  for (int b : bits) push_back(b);
}

Word::Word(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw DomainError("word letters must be 0 or 1");
  }
}

Word Word::from_string(std::string_view text) {
  Word w;
  for (char c : text) {
    if (c != '0' && c != '1') throw DomainError("word letters must be 0 or 1");
    w.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

Word Word::from_index(std::uint64_t index, int length) {
  Word w;
  w.bits_.resize(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    w.bits_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((index >> (length - 1 - i)) & 1u);
  }
  return w;
}

void Word::push_back(int bit) {
  if (bit != 0 && bit != 1) throw DomainError("word letters must be 0 or 1");
  bits_.push_back(static_cast<std::uint8_t>(bit));
}

Word Word::concat(const Word& tail) const {
  Word w = *this;
  w.bits_.insert(w.bits_.end(), tail.bits_.begin(), tail.bits_.end());
  return w;
}

std::string Word::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // rejection sampling keeps the draw unbiased
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

}  // namespace lamexp
