#pragma once

#include "streamkit/stream.hpp"

namespace streamkit {

// A timed message: either an ordinary payload or the tick closing a time
// frame. The payload variant never wraps a tick.
template <typename M>
class TimedMsg {
 public:
  static TimedMsg tick() { return TimedMsg(std::nullopt); }
  static TimedMsg msg(M m) { return TimedMsg(std::optional<M>(std::move(m))); }

  bool is_tick() const { return !payload_.has_value(); }

  const M& message() const {
    if (is_tick()) throw std::domain_error("TimedMsg: message() called on a tick");
    return *payload_;
  }

  friend bool operator==(const TimedMsg& a, const TimedMsg& b) {
    return a.payload_ == b.payload_;
  }
  friend bool operator!=(const TimedMsg& a, const TimedMsg& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const TimedMsg& m) {
    if (m.is_tick()) return os << "tick";
    return os << "msg(" << *m.payload_ << ")";
  }

 private:
  explicit TimedMsg(std::optional<M> p) : payload_(std::move(p)) {}
  std::optional<M> payload_;
};

// A timed stream is an ordinary stream over timed messages, so the whole
// untimed operator algebra applies to it unchanged.
template <typename M>
using TimedStream = Stream<TimedMsg<M>>;

// Prefix of s up to and including the n-th tick; the whole of s when fewer
// than n ticks occur.
template <typename M>
TimedStream<M> ttake(std::size_t n, TimedStream<M> s) {
  return TimedStream<M>::lazy([s, n, i = std::size_t{0}, ticks = std::size_t{0}]() mutable
                              -> std::optional<TimedMsg<M>> {
    if (ticks >= n) return std::nullopt;
    auto v = s.at(i);
    if (!v) return std::nullopt;
    ++i;
    if (v->is_tick()) ++ticks;
    return v;
  });
}

// Drops all time information, keeping the message payloads in order.
template <typename M>
Stream<M> time_abs(TimedStream<M> s) {
  return Stream<M>::lazy([s, i = std::size_t{0}]() mutable -> std::optional<M> {
    while (auto v = s.at(i)) {
      ++i;
      if (!v->is_tick()) return v->message();
    }
    return std::nullopt;
  });
}

// Bounded evidence that a stream keeps producing time frames: yes once
// min_ticks ticks are found within the budget, no when the stream exhausts
// first, unknown otherwise.
template <typename M>
Ternary time_complete_bounded(const TimedStream<M>& s, const EvalBudget& budget,
                              std::size_t min_ticks) {
  if (min_ticks == 0) return Ternary::yes;
  std::size_t ticks = 0;
  for (std::size_t i = 0; i < budget.max_elements; ++i) {
    auto v = s.at(i);
    if (!v) return Ternary::no;
    if (v->is_tick() && ++ticks >= min_ticks) return Ternary::yes;
  }
  return Ternary::unknown_at_budget;
}

// Message contents of the first n time frames, each frame the payloads
// strictly before its closing tick. Throws when the stream ends before the
// n-th tick.
template <typename M>
std::vector<Stream<M>> frames(const TimedStream<M>& s, std::size_t n) {
  std::vector<Stream<M>> out;
  std::vector<M> frame;
  std::size_t i = 0;
  while (out.size() < n) {
    auto v = s.at(i++);
    if (!v)
      throw std::out_of_range("frames: stream ends after " + std::to_string(out.size()) +
                              " complete frames, " + std::to_string(n) + " requested");
    if (v->is_tick()) {
      out.push_back(Stream<M>::of(std::exchange(frame, {})));
    } else {
      frame.push_back(v->message());
    }
  }
  return out;
}

// True iff each of the first n_frames frames carries exactly one message.
template <typename M>
bool is_time_synchronous(const TimedStream<M>& s, std::size_t n_frames) {
  for (const auto& f : frames(s, n_frames)) {
    if (!f.at(0).has_value() || f.at(1).has_value()) return false;
  }
  return true;
}

}  // namespace streamkit
