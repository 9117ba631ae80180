#include "liewalk/registry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "liewalk/errors.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

namespace {

/// Upper limit on the closure net size.
constexpr std::size_t kMaxClosureEntries = 4'000'000;

Quaternion multiply(const Quaternion& x, const Quaternion& y) {
  // Matches the matrix product of the corresponding SU(2) blocks.
  return to_quaternion(from_quaternion(x) * from_quaternion(y));
}

/// Coordinates rounded to 1e-9; equal keys identify the same element.
using Fingerprint = std::array<std::int64_t, 4>;

Fingerprint fingerprint(const Quaternion& q) {
  Fingerprint f;
  for (int k = 0; k < 4; ++k) f[k] = static_cast<std::int64_t>(std::llround(q[k] * 1e9));
  return f;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct FingerprintHash {
  std::size_t operator()(const Fingerprint& f) const {
    std::uint64_t h = 0;
    for (std::int64_t v : f) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::atom:
      return "atom";
    case Provenance::sampled_net:
      return "sampled_net";
    case Provenance::composite:
      return "composite";
    case Provenance::signed_transposition:
      return "signed_transposition";
  }
  return "unknown";
}

GeneratorRegistry::GeneratorRegistry(std::size_t d, LocalMeasure eta, RegistryOptions opt)
    : d_(d), eta_(std::move(eta)), options_(opt), grid_(opt.eps1) {}

GeneratorRegistry GeneratorRegistry::build(std::size_t d, const LocalMeasure& eta, const RegistryOptions& opt) {
  if (d < 2) throw PreconditionError("GeneratorRegistry: d must be at least 2");
  GeneratorRegistry reg(d, eta, opt);
  if (eta.kind() == LocalMeasure::Kind::haar) {
    reg.build_haar();
  } else {
    reg.build_atoms();
  }
  return reg;
}

void GeneratorRegistry::certify(const std::vector<Quaternion>& points) {
  covered_.assign(grid_.cell_count(), 0);
  std::size_t count = 0;
  for (const Quaternion& q : points) {
    char& c = covered_[grid_.cell_of(q)];
    if (!c) {
      c = 1;
      ++count;
    }
  }
  certificate_.eps1 = grid_.eps1();
  certificate_.diameter_bound = grid_.diameter_bound();
  certificate_.bins = grid_.bins();
  certificate_.cells = grid_.cell_count();
  certificate_.covered = count;
}

void GeneratorRegistry::build_haar() {
  const std::size_t cells = grid_.cell_count();
  const std::size_t budget = options_.max_samples ? options_.max_samples : 60 * cells;
  covered_.assign(cells, 0);
  Rng rng(options_.seed, 0);
  std::size_t covered = 0;
  std::size_t drawn = 0;
  while (covered < cells && drawn < budget) {
    const Block g = haar_su2_block(rng);
    ++drawn;
    char& c = covered_[grid_.cell_of(to_quaternion(g))];
    if (!c) {
      c = 1;
      ++covered;
      pool_.push_back(g);
    }
  }
  std::vector<NetIndex::Entry> entries;
  entries.reserve(pool_.size() + 1);
  entries.push_back(NetIndex::Entry{});
  for (std::size_t p = 0; p < pool_.size(); ++p) {
    NetIndex::Entry e;
    e.point = to_quaternion(pool_[p]);
    e.letter = {static_cast<std::uint32_t>(p), 1};
    e.length = 1;
    entries.push_back(e);
  }
  std::vector<Quaternion> points;
  points.reserve(pool_.size());
  for (const Block& g : pool_) points.push_back(to_quaternion(g));
  certify(points);
  certificate_.samples_drawn = drawn;
  net_ = NetIndex(std::move(entries), certificate_.diameter_bound);
}

void GeneratorRegistry::build_atoms() {
  for (const Atom& a : eta_.atoms()) {
    const bool seen = std::any_of(pool_.begin(), pool_.end(),
                                  [&](const Block& b) { return (b - a.element).cwiseAbs().maxCoeff() < 1e-12; });
    if (!seen) pool_.push_back(a.element);
  }
  // Distinct letters among pool elements and their inverses.
  std::vector<PoolLetter> letters;
  std::vector<Quaternion> letter_values;
  for (std::size_t p = 0; p < pool_.size(); ++p) {
    for (int e : {1, -1}) {
      const Quaternion v = to_quaternion(e == 1 ? pool_[p] : Block(pool_[p].adjoint()));
      const bool dup = std::any_of(letter_values.begin(), letter_values.end(),
                                   [&](const Quaternion& w) { return quaternion_distance(v, w) < 1e-12; });
      if (!dup) {
        letters.push_back({static_cast<std::uint32_t>(p), e});
        letter_values.push_back(v);
      }
    }
  }
  std::vector<NetIndex::Entry> entries;
  entries.push_back(NetIndex::Entry{});
  std::unordered_set<Fingerprint, FingerprintHash> seen{fingerprint(entries[0].point)};
  std::size_t layer_begin = 0;
  std::size_t layer_end = 1;
  for (std::size_t len = 1; len <= options_.closure_length && entries.size() < kMaxClosureEntries; ++len) {
    for (std::size_t e = layer_begin; e < layer_end && entries.size() < kMaxClosureEntries; ++e) {
      for (std::size_t k = 0; k < letters.size(); ++k) {
        const Quaternion q = multiply(entries[e].point, letter_values[k]);
        if (!seen.insert(fingerprint(q)).second) continue;
        NetIndex::Entry child;
        child.point = q;
        child.parent = e == 0 ? -1 : static_cast<std::int64_t>(e);
        child.letter = letters[k];
        child.length = static_cast<std::uint32_t>(len);
        entries.push_back(child);
      }
    }
    layer_begin = layer_end;
    layer_end = entries.size();
  }
  std::vector<Quaternion> points;
  points.reserve(entries.size());
  for (const NetIndex::Entry& e : entries) points.push_back(e.point);
  certify(points);
  net_ = NetIndex(std::move(entries), 0.0);
  // Covering radius measured by Haar probes.
  Rng rng(options_.seed, 1);
  double worst = 0.0;
  for (std::size_t k = 0; k < options_.accuracy_probes; ++k) {
    worst = std::max(worst, net_.nearest(to_quaternion(haar_su2_block(rng))).distance);
  }
  net_.set_accuracy(certificate_.complete() ? std::min(worst, certificate_.diameter_bound) : worst);
}

EmbeddedRotation GeneratorRegistry::rotation(GeneratorId id) const {
  const std::size_t p = pool_.size();
  if (id < d_ * p) {
    const std::size_t k = id / p;
    return {k, (k + 1) % d_, pool_[id % p]};
  }
  if (id < size()) {
    const std::size_t k = id - d_ * p;
    return {k, k + 1, su2_block(Complex(0.0), Complex(1.0))};
  }
  throw PreconditionError("unknown generator id " + std::to_string(id));
}

Provenance GeneratorRegistry::provenance(GeneratorId id) const {
  if (id >= size()) throw PreconditionError("unknown generator id " + std::to_string(id));
  if (!is_pool_generator(id)) return Provenance::signed_transposition;
  return eta_.kind() == LocalMeasure::Kind::haar ? Provenance::sampled_net : Provenance::atom;
}

GeneratorId GeneratorRegistry::pool_generator(std::size_t block, std::size_t pool_index) const {
  if (block >= d_ || pool_index >= pool_.size()) throw PreconditionError("pool_generator: index out of range");
  return static_cast<GeneratorId>(block * pool_.size() + pool_index);
}

GeneratorId GeneratorRegistry::transposition(std::size_t k) const {
  if (k + 1 >= d_) throw PreconditionError("transposition: k must be below d - 1");
  return static_cast<GeneratorId>(d_ * pool_.size() + k);
}

std::size_t GeneratorRegistry::block_of(GeneratorId id) const {
  if (!is_pool_generator(id)) throw PreconditionError("block_of: not a pool generator");
  return id / pool_.size();
}

GeneratorId GeneratorRegistry::move_to_block(GeneratorId id, std::size_t k) const {
  if (!is_pool_generator(id)) throw PreconditionError("move_to_block: not a pool generator");
  return pool_generator(k, id % pool_.size());
}

bool GeneratorRegistry::covers(const Block& g) const { return covered_[grid_.cell_of(to_quaternion(g))] != 0; }

Word GeneratorRegistry::place(const std::vector<PoolLetter>& letters, std::size_t k) const {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (const PoolLetter& l : letters) out.push_back({pool_generator(k, l.pool_index), l.exponent});
  return Word(std::move(out));
}

}  // namespace liewalk
