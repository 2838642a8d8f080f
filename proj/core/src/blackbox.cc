// Copyright 2026 The Audiomark Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "audiomark/blackbox.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>

#include "audiomark/errors.h"
#include "audiomark/perturbations.h"

namespace audiomark {

void OracleBudget::Validate() const {
  if (max_iterations < 1 || max_queries < 1 || grad_est_init < 1 ||
      grad_est_cap < 1) {
    Fail(ErrorCode::kInvalidArgument, "oracle budget entries must be positive");
  }
}

DecisionFunction SchemeDecisionOracle(const WatermarkScheme& scheme,
                                      const WatermarkBits& truth, double tau) {
  return [&scheme, truth, tau](const Waveform& w) {
    return Decide(scheme.family(), scheme.Decode(w, truth), tau);
  };
}

ScoreFunction SchemeScoreOracle(const WatermarkScheme& scheme,
                                const WatermarkBits& truth) {
  return [&scheme, truth](const Waveform& w) {
    return scheme.Decode(w, truth).score;
  };
}

std::string_view HsjaDomainName(HsjaDomain domain) {
  return domain == HsjaDomain::kWaveform ? "waveform" : "spectrogram";
}

HsjaDomain ParseHsjaDomain(std::string_view name) {
  if (name == "waveform") return HsjaDomain::kWaveform;
  if (name == "spectrogram") return HsjaDomain::kSpectrogram;
  Fail(ErrorCode::kInvalidArgument,
       "domain must be waveform or spectrogram, got '" + std::string(name) +
           "'");
}

namespace {

using Complex = std::complex<double>;

struct BudgetExhausted {};

// Wraps the user oracle: counts calls, keeps one call in reserve for the final
// verification and maps the detector decision onto "adversarial".
class GoalOracle {
 public:
  GoalOracle(const DecisionFunction& fn, AttackGoal goal, long max_queries)
      : fn_(fn), want_(GoalDecision(goal)), max_queries_(max_queries) {}

  bool Adversarial(const Waveform& w) {
    if (used_ + 1 >= max_queries_) throw BudgetExhausted{};
    ++used_;
    return fn_(w) == want_;
  }
  // Uses the reserved call.
  bool Verify(const Waveform& w) {
    if (used_ >= max_queries_) return false;
    ++used_;
    return fn_(w) == want_;
  }
  long used() const { return used_; }

 private:
  const DecisionFunction& fn_;
  bool want_;
  long max_queries_;
  long used_ = 0;
};

double Norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// Random +-1 signs, 64 per word.
std::vector<uint64_t> RandomSigns(size_t count, Rng& rng) {
  std::vector<uint64_t> words((count + 63) / 64);
  for (uint64_t& w : words) w = rng.NextU64();
  return words;
}

inline double SignAt(const std::vector<uint64_t>& words, size_t i) {
  return (words[i >> 6] >> (i & 63)) & 1 ? 1.0 : -1.0;
}

// HSJA state space. Points are flat vectors; the waveform domain uses the
// samples themselves, the spectrogram domain concatenates STFT amplitudes and
// phases. Each space renders points and runs the two query-heavy steps
// (bisection, gradient probes) in its own coordinates.
class SearchSpace {
 public:
  virtual ~SearchSpace() = default;

  virtual size_t dim() const = 0;
  virtual const std::vector<double>& origin() const = 0;
  virtual Waveform Render(const std::vector<double>& v) const = 0;
  // Maps a waveform into state coordinates close to the origin.
  virtual std::vector<double> Lift(const Waveform& w) const = 0;

  // Bisects the segment origin -> v (v adversarial) for `steps` oracle calls
  // and moves `v`/`rendered` to the adversarial end.
  virtual void Bisect(std::vector<double>& v, Waveform& rendered, int steps,
                      GoalOracle& oracle) = 0;

  // Sum over probes of w_k u_k, where u_k are Rademacher directions around
  // `v` with per-coordinate offset `r` and w_k the centred oracle outcomes.
  virtual std::vector<double> ProbeGradient(const std::vector<double>& v,
                                            double r, int probes, Rng& rng,
                                            GoalOracle& oracle) = 0;
};

// Centred outcomes: plain outcomes when all agree, mean-subtracted otherwise.
std::vector<double> Baseline(const std::vector<double>& outcomes) {
  double mean = 0.0;
  for (double f : outcomes) mean += f;
  mean /= outcomes.size();
  if (std::abs(mean) == 1.0) return outcomes;
  std::vector<double> out(outcomes.size());
  for (size_t i = 0; i < outcomes.size(); ++i) out[i] = outcomes[i] - mean;
  return out;
}

// sum_k w_k u_k over stored sign patterns.
std::vector<double> Accumulate(const std::vector<double>& w,
                               const std::vector<std::vector<uint64_t>>& signs,
                               size_t dim) {
  std::vector<double> g(dim, 0.0);
  for (size_t k = 0; k < w.size(); ++k) {
    const double plus = w[k];
    for (size_t i = 0; i < dim; ++i) {
      g[i] += (signs[k][i >> 6] >> (i & 63)) & 1 ? plus : -plus;
    }
  }
  return g;
}

class WaveformSpace : public SearchSpace {
 public:
  explicit WaveformSpace(const Waveform& signal)
      : origin_(signal.samples), rate_(signal.sample_rate) {}

  size_t dim() const override { return origin_.size(); }
  const std::vector<double>& origin() const override { return origin_; }
  Waveform Render(const std::vector<double>& v) const override {
    return Waveform{v, rate_};
  }
  std::vector<double> Lift(const Waveform& w) const override {
    return w.samples;
  }

  void Bisect(std::vector<double>& v, Waveform& rendered, int steps,
              GoalOracle& oracle) override {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> best = v;
    Waveform mid{std::vector<double>(v.size()), rate_};
    for (int k = 0; k < steps; ++k) {
      const double t = 0.5 * (lo + hi);
      for (size_t i = 0; i < v.size(); ++i) {
        mid.samples[i] = origin_[i] + t * (v[i] - origin_[i]);
      }
      if (oracle.Adversarial(mid)) {
        hi = t;
        best = mid.samples;
      } else {
        lo = t;
      }
    }
    v = std::move(best);
    rendered.samples = v;
  }

  std::vector<double> ProbeGradient(const std::vector<double>& v, double r,
                                    int probes, Rng& rng,
                                    GoalOracle& oracle) override {
    std::vector<std::vector<uint64_t>> signs;
    std::vector<double> outcomes;
    Waveform probe{std::vector<double>(v.size()), rate_};
    for (int k = 0; k < probes; ++k) {
      signs.push_back(RandomSigns(v.size(), rng));
      for (size_t i = 0; i < v.size(); ++i) {
        probe.samples[i] = v[i] + r * SignAt(signs.back(), i);
      }
      outcomes.push_back(oracle.Adversarial(probe) ? 1.0 : -1.0);
    }
    return Accumulate(Baseline(outcomes), signs, v.size());
  }

 private:
  std::vector<double> origin_;
  int rate_;
};

// State = [amplitude (cells), phase (cells)]. Phases are unwrapped around
// the origin's phases so segments take the short way round. Hot loops work on
// split real/imaginary arrays.
class SpectrogramSpace : public SearchSpace {
 public:
  SpectrogramSpace(const Waveform& signal, const StftParams& params)
      : shape_(StftComplex(signal.samples, signal.sample_rate, params)) {
    cells_ = shape_.values.size();
    origin_.resize(2 * cells_);
    origin_re_.resize(cells_);
    origin_im_.resize(cells_);
    for (size_t c = 0; c < cells_; ++c) {
      const Complex x = shape_.values[c];
      const double a = std::abs(x);
      origin_[c] = a;
      origin_[cells_ + c] = std::arg(x);
      origin_re_[c] = a > 0.0 ? x.real() / a : 1.0;
      origin_im_[c] = a > 0.0 ? x.imag() / a : 0.0;
    }
  }

  size_t dim() const override { return origin_.size(); }
  const std::vector<double>& origin() const override { return origin_; }

  Waveform Render(const std::vector<double>& v) const override {
    ComplexSpectrogram z = shape_;
    for (size_t c = 0; c < cells_; ++c) {
      z.values[c] = std::polar(1.0, v[cells_ + c]) * v[c];
    }
    return Synthesize(z);
  }

  std::vector<double> Lift(const Waveform& w) const override {
    const ComplexSpectrogram x =
        StftComplex(w.samples, w.sample_rate, shape_.params);
    std::vector<double> v(2 * cells_);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (size_t c = 0; c < cells_; ++c) {
      v[c] = std::abs(x.values[c]);
      const double p0 = origin_[cells_ + c];
      const double p = std::arg(x.values[c]);
      v[cells_ + c] = p - kTwoPi * std::round((p - p0) / kTwoPi);
    }
    return v;
  }

  void Bisect(std::vector<double>& v, Waveform& rendered, int steps,
              GoalOracle& oracle) override {
    const size_t n = cells_;
    // e^{i dp 2^-k} for k = 1..steps: the finest level from a short Taylor
    // series (the angle is tiny), coarser levels by repeated squaring. This
    // keeps the bisection free of per-cell trigonometry.
    table_re_.resize(static_cast<size_t>(steps) * n);
    table_im_.resize(static_cast<size_t>(steps) * n);
    const double finest = std::ldexp(1.0, -steps);
    for (size_t c = 0; c < n; ++c) {
      const double x = (v[n + c] - origin_[n + c]) * finest;
      const double x2 = x * x;
      double hr = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
      double hi = x * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
      for (int k = steps - 1; k >= 0; --k) {
        table_re_[static_cast<size_t>(k) * n + c] = hr;
        table_im_[static_cast<size_t>(k) * n + c] = hi;
        const double r = hr * hr - hi * hi;
        hi = 2.0 * hr * hi;
        hr = r;
      }
    }
    std::vector<double> lo_re = origin_re_;
    std::vector<double> lo_im = origin_im_;
    std::vector<double> mid_re(n);
    std::vector<double> mid_im(n);
    ComplexSpectrogram z = shape_;
    double* zv = reinterpret_cast<double*>(z.values.data());
    const double* a0 = origin_.data();
    double lo = 0.0;
    double hi = 1.0;
    bool moved = false;
    Waveform best;
    for (int k = 0; k < steps; ++k) {
      const double t = lo + std::ldexp(1.0, -(k + 1));
      const double* hr = &table_re_[static_cast<size_t>(k) * n];
      const double* hi_ = &table_im_[static_cast<size_t>(k) * n];
      for (size_t c = 0; c < n; ++c) {
        const double a = a0[c] + t * (v[c] - a0[c]);
        const double mr = lo_re[c] * hr[c] - lo_im[c] * hi_[c];
        const double mi = lo_re[c] * hi_[c] + lo_im[c] * hr[c];
        mid_re[c] = mr;
        mid_im[c] = mi;
        zv[2 * c] = a * mr;
        zv[2 * c + 1] = a * mi;
      }
      Waveform mid = Synthesize(z);
      if (oracle.Adversarial(mid)) {
        hi = t;
        best = std::move(mid);
        moved = true;
      } else {
        lo = t;
        lo_re.swap(mid_re);
        lo_im.swap(mid_im);
      }
    }
    if (!moved) return;
    for (size_t i = 0; i < v.size(); ++i) {
      v[i] = origin_[i] + hi * (v[i] - origin_[i]);
    }
    rendered = std::move(best);
  }

  std::vector<double> ProbeGradient(const std::vector<double>& v, double r,
                                    int probes, Rng& rng,
                                    GoalOracle& oracle) override {
    const size_t n = cells_;
    std::vector<double> pr(n);
    std::vector<double> pi(n);
    for (size_t c = 0; c < n; ++c) {
      pr[c] = std::cos(v[n + c]);
      pi[c] = std::sin(v[n + c]);
    }
    // A +-r phase offset only needs one rotation and its conjugate.
    const double cr = std::cos(r);
    const double sr = std::sin(r);
    std::vector<std::vector<uint64_t>> signs;
    std::vector<double> outcomes;
    ComplexSpectrogram z = shape_;
    double* zv = reinterpret_cast<double*>(z.values.data());
    for (int k = 0; k < probes; ++k) {
      signs.push_back(RandomSigns(2 * n, rng));
      const std::vector<uint64_t>& s = signs.back();
      for (size_t c = 0; c < n; ++c) {
        const double a = v[c] + r * SignAt(s, c);
        const double si = sr * SignAt(s, n + c);
        zv[2 * c] = a * (pr[c] * cr - pi[c] * si);
        zv[2 * c + 1] = a * (pr[c] * si + pi[c] * cr);
      }
      outcomes.push_back(oracle.Adversarial(Synthesize(z)) ? 1.0 : -1.0);
    }
    return Accumulate(Baseline(outcomes), signs, 2 * n);
  }

 private:
  Waveform Synthesize(const ComplexSpectrogram& z) const {
    return Waveform{IstftComplex(z), shape_.sample_rate};
  }

  ComplexSpectrogram shape_;
  size_t cells_ = 0;
  std::vector<double> origin_;
  std::vector<double> origin_re_;
  std::vector<double> origin_im_;
  std::vector<double> table_re_;
  std::vector<double> table_im_;
};

double Distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

void Finish(AttackResult& result, const Waveform& signal) {
  result.final_snr = Snr(signal, result.perturbed);
  result.final_quality = ScoreQuality(signal, result.perturbed);
}

}  // namespace

AttackResult Hsja(const DecisionFunction& oracle_fn, const Waveform& signal,
                  AttackGoal goal, HsjaDomain domain,
                  const OracleBudget& budget, Seed seed,
                  const HsjaOptions& options) {
  budget.Validate();
  if (options.bisection_steps < 1 || options.ladder_step_db <= 0.0) {
    Fail(ErrorCode::kInvalidArgument, "invalid HSJA options");
  }
  GoalOracle oracle(oracle_fn, goal, budget.max_queries);
  AttackResult result;

  // Already past the boundary: nothing to do.
  bool start_adversarial = false;
  try {
    start_adversarial = oracle.Adversarial(signal);
  } catch (const BudgetExhausted&) {
    Fail(ErrorCode::kInitializationFailed,
         "query budget too small to initialise");
  }
  if (start_adversarial) {
    result.perturbed = signal;
    result.success = oracle.Verify(signal);
    result.queries_used = oracle.used();
    result.trace.push_back({0, std::numeric_limits<double>::infinity()});
    Finish(result, signal);
    return result;
  }

  std::unique_ptr<SearchSpace> space;
  if (domain == HsjaDomain::kWaveform) {
    space = std::make_unique<WaveformSpace>(signal);
  } else {
    space = std::make_unique<SpectrogramSpace>(signal, StftParams{});
  }
  const std::vector<double>& origin = space->origin();
  const double d = static_cast<double>(space->dim());

  // Greedy initialiser: one seeded noise direction, loudest level last.
  Rng noise_rng(DeriveSeed(seed, "hsja-init"));
  const std::vector<double> noise = noise_rng.GaussianVector(signal.size());
  std::vector<double> current;
  Waveform current_wave;
  double init_snr = 0.0;
  bool found = false;
  try {
    for (double level = options.ladder_start_db;
         level >= options.ladder_stop_db - 1e-9 && !found;
         level -= options.ladder_step_db) {
      const Waveform noisy = MixAtSnr(signal, noise, level);
      std::vector<double> v = space->Lift(noisy);
      Waveform rendered = space->Render(v);
      if (oracle.Adversarial(rendered)) {
        found = true;
        init_snr = Snr(signal, rendered);
        current = std::move(v);
        current_wave = std::move(rendered);
      }
    }
  } catch (const BudgetExhausted&) {
  }
  if (!found) {
    Fail(ErrorCode::kInitializationFailed,
         "no noise level down to " + std::to_string(options.ladder_stop_db) +
             " dB moves the detector to the goal decision");
  }
  result.trace.push_back({0, init_snr});

  Waveform best_wave = current_wave;
  double best_snr = init_snr;
  Rng probe_rng(DeriveSeed(seed, "hsja-probes"));
  try {
    space->Bisect(current, current_wave, options.bisection_steps, oracle);
    const double snr = Snr(signal, current_wave);
    if (snr > best_snr) {
      best_snr = snr;
      best_wave = current_wave;
    }
    const double theta = 1.0 / (d * std::sqrt(d));
    for (long t = 1; t <= budget.max_iterations; ++t) {
      const double dist = Distance(current, origin);
      // Per-coordinate probe offset: radius sqrt(d) * theta * dist spread
      // evenly over d coordinates.
      const double r = theta * dist;
      const int probes = static_cast<int>(std::min<double>(
          budget.grad_est_cap,
          std::ceil(budget.grad_est_init * std::sqrt(static_cast<double>(t)))));
      std::vector<double> g =
          space->ProbeGradient(current, r, probes, probe_rng, oracle);
      const double gn = Norm2(g);
      if (gn > 0.0) {
        for (double& x : g) x /= gn;
        double eps = dist / std::sqrt(static_cast<double>(t));
        for (int h = 0; h <= options.max_step_halvings; ++h, eps *= 0.5) {
          std::vector<double> candidate(current.size());
          for (size_t i = 0; i < current.size(); ++i) {
            candidate[i] = current[i] + eps * g[i];
          }
          Waveform rendered = space->Render(candidate);
          if (oracle.Adversarial(rendered)) {
            current = std::move(candidate);
            current_wave = std::move(rendered);
            break;
          }
        }
      }
      space->Bisect(current, current_wave, options.bisection_steps, oracle);
      const double s = Snr(signal, current_wave);
      if (s > best_snr) {
        best_snr = s;
        best_wave = current_wave;
      }
      result.iterations = t;
      result.trace.push_back({t, best_snr});
    }
  } catch (const BudgetExhausted&) {
  }

  result.perturbed = std::move(best_wave);
  result.success = oracle.Verify(result.perturbed);
  result.queries_used = oracle.used();
  Finish(result, signal);
  return result;
}

double SquarePatchFraction(double p_init, long it, long total_iterations) {
  const long i = total_iterations > 0 ? it * 10000 / total_iterations : it;
  double p = p_init;
  if (i > 10 && i <= 50) {
    p = p_init / 2;
  } else if (i > 50 && i <= 200) {
    p = p_init / 4;
  } else if (i > 200 && i <= 500) {
    p = p_init / 8;
  } else if (i > 500 && i <= 1000) {
    p = p_init / 16;
  } else if (i > 1000 && i <= 2000) {
    p = p_init / 32;
  } else if (i > 2000 && i <= 4000) {
    p = p_init / 64;
  } else if (i > 4000 && i <= 6000) {
    p = p_init / 128;
  } else if (i > 6000 && i <= 8000) {
    p = p_init / 256;
  } else if (i > 8000) {
    p = p_init / 512;
  }
  return p;
}

AttackResult SquareAttack(const ScoreFunction& score_oracle,
                          const Waveform& signal, AttackGoal goal,
                          double linf_bound, const OracleBudget& budget,
                          Seed seed, const DecisionFunction& decision,
                          const SquareOptions& options) {
  budget.Validate();
  if (!(linf_bound >= 0.0) || !std::isfinite(linf_bound)) {
    Fail(ErrorCode::kInvalidArgument, "l-inf bound must be finite and >= 0");
  }
  if (budget.max_queries < 2) {
    Fail(ErrorCode::kInvalidArgument,
         "square attack needs at least two queries");
  }
  const ComplexSpectrogram x =
      StftComplex(signal.samples, signal.sample_rate, options.stft);
  const size_t cells = x.values.size();
  const int frames = x.frames;
  const int bins = x.bins;
  std::vector<double> amplitude(cells);
  std::vector<Complex> phasor(cells);
  for (size_t c = 0; c < cells; ++c) {
    amplitude[c] = std::abs(x.values[c]);
    phasor[c] = amplitude[c] > 0.0 ? x.values[c] / amplitude[c] : Complex(1.0);
  }

  AttackResult result;
  long queries = 0;
  // The last query is kept for the final decision.
  const long score_budget = budget.max_queries - 1;
  ComplexSpectrogram z = x;
  auto render = [&](const std::vector<double>& delta) {
    for (size_t c = 0; c < cells; ++c) {
      z.values[c] = std::max(0.0, amplitude[c] + delta[c]) * phasor[c];
    }
    return Waveform{IstftComplex(z), signal.sample_rate};
  };
  auto score = [&](const Waveform& w) {
    ++queries;
    const double s = score_oracle(w);
    if (!std::isfinite(s)) {
      Fail(ErrorCode::kOracleError, "score oracle returned a non-finite value");
    }
    return s;
  };
  auto better = [goal](double s, double best) {
    return goal == AttackGoal::kRemoval ? s < best : s > best;
  };
  // Effective change after clipping amplitudes at zero. Written as a max so
  // that |change| <= linf_bound holds exactly in floating point.
  auto clipped = [&](size_t c, double d) { return std::max(-amplitude[c], d); };

  Rng rng(DeriveSeed(seed, "square"));
  std::vector<double> delta(cells, 0.0);
  Waveform best_wave = signal;
  if (linf_bound > 0.0) {
    // Vertical stripes: one random sign per frame across every bin.
    for (int f = 0; f < frames; ++f) {
      const double s = (rng.NextU64() >> 63) ? linf_bound : -linf_bound;
      for (int b = 0; b < bins; ++b) {
        const size_t c = x.Index(f, b);
        delta[c] = clipped(c, s);
      }
    }
    best_wave = render(delta);
  }
  double best = score(best_wave);
  result.trace.push_back({0, best});
  if (options.on_accept) options.on_accept(0, delta);

  const int height = bins;
  const int width = frames;
  std::vector<double> proposal;
  for (long it = 1; it <= budget.max_iterations && linf_bound > 0.0 &&
                    queries < score_budget;
       ++it) {
    const double p =
        SquarePatchFraction(options.p_init, it - 1, budget.max_iterations);
    int side = static_cast<int>(std::lround(std::sqrt(p * height * width)));
    side = std::clamp(side, 1, std::min(height, width) - 1);
    const int b0 = static_cast<int>(rng.UniformIndex(height - side + 1));
    const int f0 = static_cast<int>(rng.UniformIndex(width - side + 1));
    double s = (rng.NextU64() >> 63) ? linf_bound : -linf_bound;
    // A patch that changes nothing is redrawn with the other sign.
    auto unchanged = [&](double sign) {
      for (int f = f0; f < f0 + side; ++f) {
        for (int b = b0; b < b0 + side; ++b) {
          const size_t c = x.Index(f, b);
          if (clipped(c, sign) != delta[c]) return false;
        }
      }
      return true;
    };
    if (unchanged(s)) s = -s;
    proposal = delta;
    for (int f = f0; f < f0 + side; ++f) {
      for (int b = b0; b < b0 + side; ++b) {
        const size_t c = x.Index(f, b);
        proposal[c] = clipped(c, s);
      }
    }
    Waveform candidate = render(proposal);
    const double value = score(candidate);
    result.iterations = it;
    if (better(value, best)) {
      best = value;
      delta.swap(proposal);
      best_wave = std::move(candidate);
      if (options.on_accept) options.on_accept(it, delta);
    }
    result.trace.push_back({it, best});
  }

  result.perturbed = std::move(best_wave);
  ++queries;
  result.success = decision(result.perturbed) == GoalDecision(goal);
  result.queries_used = queries;
  Finish(result, signal);
  return result;
}

}  // namespace audiomark
