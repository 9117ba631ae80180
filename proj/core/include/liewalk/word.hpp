#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liewalk/matcore.hpp"

namespace liewalk {

class GeneratorRegistry;

using GeneratorId = std::uint32_t;

struct Letter {
  GeneratorId generator = 0;
  /// +1 or -1.
  std::int32_t exponent = 1;

  bool operator==(const Letter&) const = default;
};

/// Sequence of generator letters. eval multiplies left to right: g_1 g_2 ... g_l.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);
  static Word single(GeneratorId id, int exponent = 1);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  /// Reversed letters with flipped exponents.
  Word inverse() const;
  /// Appends `other` on the right, so eval(this) becomes eval(this) * eval(other).
  Word& append(const Word& other);
  /// `this` repeated r times.
  Word power(std::size_t r) const;

  const std::optional<ComplexMatrix>& cached_value() const { return cached_; }
  void set_cached_value(ComplexMatrix value) { cached_ = std::move(value); }

  bool operator==(const Word& other) const { return letters_ == other.letters_; }

 private:
  std::vector<Letter> letters_;
  std::optional<ComplexMatrix> cached_;
};

/// Concatenation: eval(concat(a, b)) = eval(a) * eval(b).
Word concat(const Word& a, const Word& b);

/// Ordered product of the letters' rotations, with polar repair every `repair_interval` letters.
Unitary eval(const Word& word, const GeneratorRegistry& reg, std::size_t repair_interval = 10000);

/// One letter per line, `gen_id exponent`. '#' lines are comments.
void write_word(std::ostream& out, const Word& word);
Word parse_word(std::istream& in);
Word read_word_file(const std::string& path);

}  // namespace liewalk
