#include "liewalk/word.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "liewalk/errors.hpp"
#include "liewalk/registry.hpp"

namespace liewalk {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
  for (const Letter& l : letters_) {
    if (l.exponent != 1 && l.exponent != -1) throw PreconditionError("Word: exponent must be +1 or -1");
  }
}

Word Word::single(GeneratorId id, int exponent) { return Word({Letter{id, exponent}}); }

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back({it->generator, -it->exponent});
  if (cached_) w.cached_ = cached_->adjoint();
  return w;
}

Word& Word::append(const Word& other) {
  letters_.insert(letters_.end(), other.letters_.begin(), other.letters_.end());
  if (cached_ && other.cached_) {
    cached_ = ComplexMatrix(*cached_ * *other.cached_);
  } else {
    cached_.reset();
  }
  return *this;
}

Word Word::power(std::size_t r) const {
  Word w;
  w.letters_.reserve(letters_.size() * r);
  for (std::size_t k = 0; k < r; ++k) w.letters_.insert(w.letters_.end(), letters_.begin(), letters_.end());
  return w;
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.append(b);
  return w;
}

Unitary eval(const Word& word, const GeneratorRegistry& reg, std::size_t repair_interval) {
  if (repair_interval == 0) throw PreconditionError("eval: repair_interval must be positive");
  Unitary u = Unitary::identity(reg.dim());
  std::size_t since_repair = 0;
  for (const Letter& l : word.letters()) {
    EmbeddedRotation rot = reg.rotation(l.generator);
    if (l.exponent == -1) rot = rot.inverse();
    u.update([&](ComplexMatrix& m) { apply_right(m, rot); }, 4.0 * kMachineEpsilon);
    if (++since_repair == repair_interval) {
      u = project_unitary(u.matrix());
      since_repair = 0;
    }
  }
  return u;
}

void write_word(std::ostream& out, const Word& word) {
  for (const Letter& l : word.letters()) out << l.generator << ' ' << l.exponent << '\n';
}

Word parse_word(std::istream& in) {
  std::vector<Letter> letters;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long id = -1;
    int exponent = 0;
    std::string extra;
    if (!(fields >> id >> exponent) || (fields >> extra)) throw ParseError("expected 'gen_id exponent'", line_no);
    if (id < 0 || id > static_cast<long long>(UINT32_MAX)) throw ParseError("generator id out of range", line_no);
    if (exponent != 1 && exponent != -1) throw ParseError("exponent must be 1 or -1", line_no);
    letters.push_back({static_cast<GeneratorId>(id), exponent});
  }
  return Word(std::move(letters));
}

Word read_word_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open word file '" + path + "'", 0);
  return parse_word(in);
}

}  // namespace liewalk
