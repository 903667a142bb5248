// Copyright 2026 The sampattn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sampattn/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sampattn {

void validate(const SyntheticSpec& spec) {
  if (spec.seq_len < 1) throw InputError("synthetic: S must be >= 1");
  if (spec.head_dim < 1) throw InputError("synthetic: d must be >= 1");
  if (spec.n_heads < 1) throw InputError("synthetic: n_heads must be >= 1");
  if (!(spec.noise_scale >= 0.0) || !std::isfinite(spec.noise_scale))
    throw InputError("synthetic: noise_scale must be finite and >= 0");
  double total = 0.0;
  auto check = [&](const std::vector<PlantedPattern>& ps, const char* what) {
    for (std::size_t a = 0; a < ps.size(); ++a) {
      const auto& p = ps[a];
      if (p.where < 0 || p.where >= spec.seq_len)
        throw InputError(std::string("synthetic: ") + what +
                         " position out of range");
      if (!(p.mass >= 0.0 && p.mass < 1.0))
        throw InputError(std::string("synthetic: ") + what +
                         " mass must lie in [0, 1)");
      for (std::size_t b = 0; b < a; ++b)
        if (ps[b].where == p.where)
          throw InputError(std::string("synthetic: duplicate ") + what);
      total += p.mass;
    }
  };
  check(spec.sinks, "sink column");
  check(spec.slashes, "slash offset");
  if (total > 1.0)
    throw InputError("synthetic: planted masses sum to more than 1");
}

namespace {

struct Target {
  bool sink = false;
  Index where = 0;
  double mass = 0.0;
  double beta = 0.0;
  double measured = 0.0;

  std::string describe() const {
    std::ostringstream os;
    os << (sink ? "sink column at position " : "slash at offset ") << where
       << " (target " << mass << ", measured " << measured << ")";
    return os.str();
  }
};

class HeadBuilder {
 public:
  HeadBuilder(const SyntheticSpec& spec, Index head_id)
      : s_(spec.seq_len), d_(spec.head_dim) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(head_id), 0x5a17u};
    std::mt19937_64 rng(seq);

    for (const auto& p : spec.sinks)
      if (p.mass > 0.0) targets_.push_back({true, p.where, p.mass});
    n_sinks_ = static_cast<Index>(targets_.size());
    for (const auto& p : spec.slashes)
      if (p.mass > 0.0) targets_.push_back({false, p.where, p.mass});
    const bool any_slash = static_cast<Index>(targets_.size()) > n_sinks_;

    const Index avail = d_ - n_sinks_;
    if (avail < (any_slash ? 2 : 0))
      throw InputError("synthetic: head dimension too small for the planted patterns");
    n_planes_ = any_slash ? std::max<Index>(1, std::min<Index>(24, (avail * 3 / 4) / 2)) : 0;
    noise_dims_ = avail - 2 * n_planes_;
    slash0_ = n_sinks_;
    noise0_ = n_sinks_ + 2 * n_planes_;

    base_q_ = MatrixXd::Zero(s_, d_);
    k_ = MatrixXd::Zero(s_, d_);
    std::normal_distribution<double> normal(0.0, 1.0);
    if (noise_dims_ > 0 && spec.noise_scale > 0.0) {
      const double entry_sd = std::sqrt(spec.noise_scale * std::sqrt(double(d_)) /
                                        std::sqrt(double(noise_dims_)));
      for (Index i = 0; i < s_; ++i)
        for (Index c = noise0_; c < d_; ++c) base_q_(i, c) = entry_sd * normal(rng);
      for (Index i = 0; i < s_; ++i)
        for (Index c = noise0_; c < d_; ++c) k_(i, c) = entry_sd * normal(rng);
    }
    v_.resize(s_, d_);
    for (Index i = 0; i < s_; ++i)
      for (Index c = 0; c < d_; ++c) v_(i, c) = normal(rng);

    std::uniform_real_distribution<double> freq(0.3, std::numbers::pi);
    omega_.resize(n_planes_);
    for (auto& w : omega_) w = freq(rng);

    const double plane_scale = std::pow(double(d_), 0.25) / std::sqrt(double(std::max<Index>(n_planes_, 1)));
    for (Index t = 0; t < n_sinks_; ++t) k_(targets_[t].where, t) = std::sqrt(double(d_));
    for (Index j = 0; j < s_; ++j) {
      bool is_sink = false;
      for (Index t = 0; t < n_sinks_; ++t) is_sink |= targets_[t].where == j;
      if (is_sink) continue;
      for (Index f = 0; f < n_planes_; ++f) {
        k_(j, slash0_ + 2 * f) = plane_scale * std::cos(omega_[f] * double(j));
        k_(j, slash0_ + 2 * f + 1) = plane_scale * std::sin(omega_[f] * double(j));
      }
    }
    plane_scale_ = plane_scale;

    // Mean squared off-peak response of the plane kernel; sets the log-mean-
    // exp inflation the slash amplitude has to overcome.
    if (n_planes_ > 0 && s_ > 1) {
      double acc = 0.0;
      for (Index delta = 1; delta < s_; ++delta) {
        double f = 0.0;
        for (double w : omega_) f += std::cos(w * double(delta));
        f /= double(n_planes_);
        acc += f * f;
      }
      sidelobe_var_ = acc / double(s_ - 1);
    }

    const Index n_rows = s_ <= 1024 ? s_ : 512;
    for (Index r = 0; r < n_rows; ++r)
      probe_rows_.push_back(n_rows == s_ ? r : r * (s_ - 1) / (n_rows - 1));

    for (auto& t : targets_) t.beta = std::log(t.mass / (1.0 - t.mass));
  }

  Head calibrate(Index head_id) {
    Head head;
    for (int it = 0; it < kMaxCalibrationIterations; ++it) {
      head = assemble(head_id);
      if (targets_.empty()) return head;
      measure(head);
      bool converged = true;
      for (const auto& t : targets_)
        converged &= std::abs(t.measured / t.mass - 1.0) <= kCalibrationTolerance;
      if (converged) return head;
      if (it + 1 == kMaxCalibrationIterations) break;
      update();
    }
    for (const auto& t : targets_)
      if (std::abs(t.measured / t.mass - 1.0) > kCalibrationAcceptance)
        throw GeneratorError("synthetic: calibration did not reach " + t.describe());
    return head;
  }

 private:
  double slash_amplitude(double x) const {
    if (x <= 0.0) return 0.0;
    if (sidelobe_var_ <= 0.0) return x;
    const double disc = 1.0 - 2.0 * sidelobe_var_ * x;
    if (disc <= 0.0) return 1.0 / sidelobe_var_;
    return (1.0 - std::sqrt(disc)) / sidelobe_var_;
  }

  Head assemble(Index head_id) const {
    MatrixXd q = base_q_;
    for (Index i = 0; i < s_; ++i) {
      const double log_support = std::log(double(i + 1));
      for (Index t = 0; t < n_sinks_; ++t) q(i, t) = targets_[t].beta + log_support;
      for (std::size_t t = n_sinks_; t < targets_.size(); ++t) {
        const Index o = targets_[t].where;
        if (i < o) continue;
        const double a = slash_amplitude(targets_[t].beta + log_support) * plane_scale_;
        for (Index f = 0; f < n_planes_; ++f) {
          const double phase = omega_[f] * double(i - o);
          q(i, slash0_ + 2 * f) += a * std::cos(phase);
          q(i, slash0_ + 2 * f + 1) += a * std::sin(phase);
        }
      }
    }
    return Head{q.cast<float>(), k_.cast<float>(), v_.cast<float>(), head_id};
  }

  void measure(const Head& head) {
    const MatrixXd k = head.k.cast<double>();
    MatrixXd q(probe_rows_.size(), d_);
    for (std::size_t r = 0; r < probe_rows_.size(); ++r)
      q.row(r) = head.q.row(probe_rows_[r]).cast<double>();
    const MatrixXd p = causal_row_softmax(scaled_scores(q, k, d_),
                                          std::span<const Index>(probe_rows_));
    for (auto& t : targets_) {
      double sum = 0.0;
      Index n = 0;
      for (std::size_t r = 0; r < probe_rows_.size(); ++r) {
        const Index i = probe_rows_[r];
        if (i < t.where) continue;
        sum += p(r, t.sink ? t.where : i - t.where);
        ++n;
      }
      t.measured = n ? sum / double(n) : 0.0;
    }
  }

  // Softmax-space update: each target's odds against the unplanted remainder.
  void update() {
    double target_total = 0.0, measured_total = 0.0;
    for (const auto& t : targets_) {
      target_total += t.mass;
      measured_total += t.measured;
    }
    const double target_rest = std::max(1.0 - target_total, 1e-6);
    const double measured_rest = std::max(1.0 - measured_total, 1e-6);
    for (auto& t : targets_) {
      const double measured = std::max(t.measured, 1e-12);
      t.beta += std::log(t.mass / target_rest) - std::log(measured / measured_rest);
    }
  }

  Index s_, d_;
  Index n_sinks_ = 0, n_planes_ = 0, noise_dims_ = 0;
  Index slash0_ = 0, noise0_ = 0;
  double plane_scale_ = 0.0;
  double sidelobe_var_ = 0.0;
  std::vector<Target> targets_;
  std::vector<double> omega_;
  std::vector<Index> probe_rows_;
  MatrixXd base_q_, k_, v_;
};

}  // namespace

HeadSet generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  HeadSet set;
  set.seq_len = spec.seq_len;
  set.head_dim = spec.head_dim;
  for (Index h = 0; h < spec.n_heads; ++h) {
    HeadBuilder builder(spec, h);
    set.heads.push_back(builder.calibrate(h));
  }
  return set;
}

}  // namespace sampattn
