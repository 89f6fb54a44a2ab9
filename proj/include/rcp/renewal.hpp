#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <sstream>
#include <vector>

#include "rcp/error.hpp"
#include "rcp/heavytail.hpp"
#include "rcp/parallel.hpp"
#include "rcp/rng.hpp"

namespace rcp {

// Rate-lambda exponential waiting times (the transmission clocks).
struct ExponentialRate {
  double rate = 1.0;

  void validate() const {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      std::ostringstream os;
      os << "exponential rate must be finite and > 0, got " << rate;
      throw InputError(os.str());
    }
  }
};

inline double sample(const ExponentialRate& law, double u) { return -std::log(u) / law.rate; }

// Lazily materialised renewal process S_n = T_1 + ... + T_n driven by one
// random stream. Invariant: last_mark() <= now() < next_mark(), where
// last_mark() is S_{N(now)} (S_0 = 0) and count() is N(now).
//
// Marks older than last_mark() are kept only if a history depth was
// requested; history_depth = kFullHistory keeps every mark.
template <class Law>
class RenewalClock {
 public:
  static constexpr std::size_t kFullHistory = std::numeric_limits<std::size_t>::max();

  RenewalClock(Law law, std::uint64_t stream_seed, std::size_t history_depth = 0)
      : law_(law), stream_(stream_seed), history_depth_(history_depth) {
    law_.validate();
    next_ = draw();
  }

  double now() const noexcept { return now_; }
  double last_mark() const noexcept { return last_; }
  double next_mark() const noexcept { return next_; }
  std::uint64_t count() const noexcept { return count_; }
  const Law& law() const noexcept { return law_; }

  // Moves the frontier to t, calling on_mark(time) for every mark in (now, t].
  template <class OnMark>
  void advance_to(double t, OnMark&& on_mark) {
    if (t < now_) {
      std::ostringstream os;
      os << "advance_to: clocks never rewind (now=" << now_ << ", requested " << t << ")";
      throw InputError(os.str());
    }
    while (next_ <= t) {
      remember(last_);
      last_ = next_;
      ++count_;
      on_mark(last_);
      next_ = last_ + draw();
    }
    now_ = t;
  }

  void advance_to(double t) {
    advance_to(t, [](double) {});
  }

  std::vector<double> advance_collect(double t) {
    std::vector<double> marks;
    advance_to(t, [&](double m) { marks.push_back(m); });
    return marks;
  }

  // E(t) = S_{N(t)+1} - t.
  double excess(double t) { return bracket(t).next - t; }

  // C(t) = t - S_{N(t)}.
  double current_age(double t) { return t - bracket(t).last; }

  // N(t).
  std::uint64_t count_at(double t) { return bracket(t).count; }

 private:
  struct Bracket {
    double last;
    double next;
    std::uint64_t count;
  };

  double draw() {
    const double gap = sample(law_, stream_.uniform());
    return gap > kTimeCap ? kBeyondHorizon : gap;
  }

  void remember(double mark) {
    if (history_depth_ == 0 || count_ == 0) return;
    history_.push_back(mark);
    if (history_depth_ != kFullHistory && history_.size() > history_depth_) {
      history_.pop_front();
    }
  }

  Bracket bracket(double t) {
    detail::require_time(t, "renewal query time");
    if (t >= now_) {
      advance_to(t);
      return {last_, next_, count_};
    }
    if (t >= last_) return {last_, next_, count_};
    // t < last_: answer from retained marks S_{count-h}, ..., S_{count-1}.
    const bool complete = history_.size() + 1 == count_;
    if (history_.empty() || (!complete && history_.front() > t)) {
      std::ostringstream os;
      os << "renewal query at t=" << t << " precedes the retained history (frontier " << now_
         << ", last mark " << last_ << ")";
      throw StateError(os.str());
    }
    double following = last_;
    std::uint64_t n = count_ - 1;
    for (auto it = history_.rbegin(); it != history_.rend(); ++it, --n) {
      if (*it <= t) return {*it, following, n};
      following = *it;
    }
    // Before the first mark: S_0 = 0.
    return {0.0, following, 0};
  }

  Law law_;
  RandomStream stream_;
  std::size_t history_depth_;
  std::deque<double> history_;
  double now_ = 0.0;
  double last_ = 0.0;
  double next_ = 0.0;
  std::uint64_t count_ = 0;
};

// Monte Carlo estimate of U(t+h) - U(t), the expected number of marks in
// (t, t+h], from n_runs independent clocks seeded by (seed, replication, r).
inline MeanEstimate estimate_renewal_increment(const HeavyTailSpec& spec, double t, double h,
                                               std::size_t n_runs, std::uint64_t seed,
                                               unsigned workers = 1) {
  spec.validate();
  detail::require_time(t, "estimate_renewal_increment: t");
  if (!(h > 0.0) || !std::isfinite(t + h)) {
    throw InputError("estimate_renewal_increment: window h must be > 0 with t+h finite");
  }
  if (n_runs < 100) throw InputError("estimate_renewal_increment: n_runs must be >= 100");
  const auto counts = parallel_map(n_runs, workers, [&](std::size_t r) {
    RenewalClock<HeavyTailSpec> clock(spec, derive_seed(seed, StreamTag::replication, r));
    clock.advance_to(t);
    const auto before = clock.count();
    clock.advance_to(t + h);
    return static_cast<double>(clock.count() - before);
  });
  return mean_and_stderr(counts);
}

}  // namespace rcp
