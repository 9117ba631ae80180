#include <algorithm>
#include <cmath>
#include <thread>

#include "liewalk/errors.hpp"
#include "liewalk/spectra.hpp"

namespace liewalk {

const char* const kMixingCriterion =
    "|E tr U| < epsilon and |E |tr U|^2 - 1| < epsilon at step t; through step 3t neither deviation exceeds "
    "epsilon by more than 3 standard errors";

namespace {

constexpr std::size_t kStepBlock = 64;

/// Neumaier-compensated accumulator.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool record_step(std::size_t step) {
  if (step <= 1000) return true;
  std::size_t stride = 1;
  for (std::size_t s = step; s >= 1000; s /= 10) stride *= 10;
  return step % stride == 0;
}

constexpr double kConfirmationZ = 3.0;

struct ChunkMoments {
  double tr_re[kStepBlock];
  double tr_im[kStepBlock];
  double tr2[kStepBlock];
  double tr4[kStepBlock];
};

}  // namespace

MixingReport mixing_time(const WalkConfig& cfg, double epsilon, std::size_t n_chains, std::size_t max_steps, Rng& rng,
                         const MixingOptions& opt) {
  cfg.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("mixing_time: epsilon must lie in (0, 1)");
  if (n_chains < 2) throw PreconditionError("mixing_time: need at least 2 chains");
  if (max_steps < 1) throw PreconditionError("mixing_time: max_steps must be positive");
  if (opt.chunk < 1) throw PreconditionError("mixing_time: chunk must be positive");

  const std::size_t d = cfg.d;
  const auto n = static_cast<Eigen::Index>(d);
  const std::size_t dd = d * d;
  const std::uint64_t seed = rng.next_u64();
  const std::size_t n_chunks = (n_chains + opt.chunk - 1) / opt.chunk;

  std::vector<Complex> states(n_chains * dd, Complex(0.0));
  for (std::size_t c = 0; c < n_chains; ++c)
    for (std::size_t k = 0; k < d; ++k) states[c * dd + k * d + k] = 1.0;
  std::vector<Rng> chunk_rngs;
  chunk_rngs.reserve(n_chunks);
  for (std::size_t k = 0; k < n_chunks; ++k) chunk_rngs.emplace_back(seed, k);
  std::vector<ChunkMoments> partial(n_chunks);
  const bool random_env = cfg.variant == WalkVariant::random_environment;
  const Environment env(cfg);
  std::vector<EmbeddedRotation> env_steps(kStepBlock);

  MixingReport report;
  report.d = d;
  report.epsilon_target = epsilon;
  report.n_chains = n_chains;
  report.max_steps = max_steps;
  report.seed = seed;
  report.criterion = kMixingCriterion;
  report.trajectory.push_back({0, static_cast<double>(d), std::abs(static_cast<double>(d * d) - 1.0)});

  std::size_t candidate = 0;
  std::size_t step = 0;
  MomentPoint last = report.trajectory.back();
  bool done = false;
  while (!done && step < max_steps) {
    const std::size_t block = std::min(kStepBlock, max_steps - step);
    if (random_env) {
      for (std::size_t t = 0; t < block; ++t) env_steps[t] = env.at(step + t);
    }
    auto run_chunk = [&](std::size_t k) {
      Rng& r = chunk_rngs[k];
      ChunkMoments& pm = partial[k];
      std::fill(std::begin(pm.tr_re), std::end(pm.tr_re), 0.0);
      std::fill(std::begin(pm.tr_im), std::end(pm.tr_im), 0.0);
      std::fill(std::begin(pm.tr2), std::end(pm.tr2), 0.0);
      std::fill(std::begin(pm.tr4), std::end(pm.tr4), 0.0);
      const std::size_t first = k * opt.chunk;
      const std::size_t last = std::min(n_chains, first + opt.chunk);
      for (std::size_t t = 0; t < block; ++t) {
        const std::size_t global_step = step + t + 1;
        for (std::size_t c = first; c < last; ++c) {
          EmbeddedRotation rot;
          if (random_env) {
            rot = env_steps[t];
            if (r.coin()) rot.block = rot.block.adjoint().eval();
          } else {
            rot = sample_step(cfg, r);
          }
          Eigen::Map<ComplexMatrix> u(states.data() + c * dd, n, n);
          const auto i = static_cast<Eigen::Index>(rot.i), j = static_cast<Eigen::Index>(rot.j);
          const Block& b = rot.block;
          for (Eigen::Index col = 0; col < n; ++col) {
            const Complex xi = u(i, col), xj = u(j, col);
            u(i, col) = b(0, 0) * xi + b(0, 1) * xj;
            u(j, col) = b(1, 0) * xi + b(1, 1) * xj;
          }
          if (global_step % cfg.repair_interval == 0) u = project_unitary(u).matrix();
          const Complex tr = u.trace();
          pm.tr_re[t] += tr.real();
          pm.tr_im[t] += tr.imag();
          const double a2 = std::norm(tr);
          pm.tr2[t] += a2;
          pm.tr4[t] += a2 * a2;
        }
      }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, n_chunks));
    if (threads == 1) {
      for (std::size_t k = 0; k < n_chunks; ++k) run_chunk(k);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t k = w; k < n_chunks; k += threads) run_chunk(k);
        });
      }
      for (std::thread& th : pool) th.join();
    }
    const double nc = static_cast<double>(n_chains);
    for (std::size_t t = 0; t < block && !done; ++t) {
      Accumulator re, im, sq, quart;
      for (std::size_t k = 0; k < n_chunks; ++k) {
        re.add(partial[k].tr_re[t]);
        im.add(partial[k].tr_im[t]);
        sq.add(partial[k].tr2[t]);
        quart.add(partial[k].tr4[t]);
      }
      ++step;
      const double m1 = std::hypot(re.value() / nc, im.value() / nc);
      const double m2 = std::abs(sq.value() / nc - 1.0);
      last = {step, m1, m2};
      if (record_step(step)) report.trajectory.push_back(last);
      if (candidate == 0) {
        if (m1 < epsilon && m2 < epsilon) candidate = step;
      } else {
        const double mean_sq = sq.value() / nc;
        const double se1 = std::sqrt(std::max(0.0, mean_sq - m1 * m1) / nc);
        const double se2 = std::sqrt(std::max(0.0, quart.value() / nc - mean_sq * mean_sq) / nc);
        if (m1 > epsilon + kConfirmationZ * se1 || m2 > epsilon + kConfirmationZ * se2) {
          candidate = (m1 < epsilon && m2 < epsilon) ? step : 0;
        }
      }
      if (candidate != 0 && step >= 3 * candidate) done = true;
    }
  }
  if (report.trajectory.back().step != step) report.trajectory.push_back(last);
  report.steps_simulated = step;
  report.mixed = done;
  report.steps_to_target = done ? candidate : 0;
  return report;
}

}  // namespace liewalk
