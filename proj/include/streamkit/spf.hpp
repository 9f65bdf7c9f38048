#pragma once

#include <deque>

#include "streamkit/stream.hpp"

namespace streamkit {

enum class SpfKind { elementwise, composed, automaton_derived, user };

// A deterministic function from input streams to output streams. Instances
// built by lift_elementwise are prefix-monotone by construction; arbitrary
// user functions carry no such guarantee (probe them with check_monotone).
template <typename I, typename O>
class Spf {
 public:
  using Fn = std::function<Stream<O>(Stream<I>)>;

  Spf(Fn fn, SpfKind kind) : fn_(std::move(fn)), kind_(kind) {}

  Stream<O> operator()(Stream<I> in) const { return fn_(std::move(in)); }

  SpfKind kind() const { return kind_; }

  static Spf user(Fn fn) { return Spf(std::move(fn), SpfKind::user); }

 private:
  Fn fn_;
  SpfKind kind_;
};

// The function consuming one input message at a time and emitting out(x) for
// each. out must be total and return finite streams; the lift is lazily
// productive on infinite inputs.
template <typename I, typename O>
Spf<I, O> lift_elementwise(std::function<Stream<O>(const I&)> out) {
  auto fn = [out](Stream<I> in) {
    return Stream<O>::lazy([out, in, i = std::size_t{0},
                            pending = std::deque<O>{}]() mutable -> std::optional<O> {
      while (pending.empty()) {
        auto v = in.at(i);
        if (!v) return std::nullopt;
        ++i;
        for (auto& e : out(*v).force_vector()) pending.push_back(std::move(e));
      }
      O front = std::move(pending.front());
      pending.pop_front();
      return front;
    });
  };
  return Spf<I, O>(std::move(fn), SpfKind::elementwise);
}

// g after f. Evaluation stays lazy, so infinite intermediate streams are fine.
template <typename A, typename B, typename C>
Spf<A, C> compose_serial(Spf<A, B> f, Spf<B, C> g) {
  return Spf<A, C>([f, g](Stream<A> in) { return g(f(std::move(in))); }, SpfKind::composed);
}

// Emits the given prefix before echoing the input. Prefix-monotone, and the
// standard way to make a feedback loop productive.
template <typename M>
Spf<M, M> prepend(std::vector<M> prefix) {
  return Spf<M, M>(
      [p = Stream<M>::of(std::move(prefix))](Stream<M> in) { return concat(p, std::move(in)); },
      SpfKind::user);
}

// Truncates the input to its first n messages. Prefix-monotone.
template <typename M>
Spf<M, M> take_prefix(std::size_t n) {
  return Spf<M, M>([n](Stream<M> in) { return atake(n, std::move(in)); }, SpfKind::user);
}

// Result of probing a stream function for prefix-monotonicity on sample
// pairs (a, b) with a a prefix of b.
template <typename I>
struct MonotonicityReport {
  struct Violation {
    Stream<I> smaller;
    Stream<I> larger;
    std::size_t sample_index;
  };

  std::size_t checked = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

template <typename I, typename O>
MonotonicityReport<I> check_monotone(const Spf<I, O>& f,
                                     const std::vector<std::pair<Stream<I>, Stream<I>>>& samples,
                                     const EvalBudget& budget = EvalBudget(1000)) {
  MonotonicityReport<I> report;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    ++report.checked;
    if (prefix_le(f(samples[k].first), f(samples[k].second), budget) == Ternary::no) {
      report.violations.push_back({samples[k].first, samples[k].second, k});
    }
  }
  return report;
}

// Result of checking that outputs on growing finite prefixes of an input
// form a prefix chain converging to the output on the whole input.
struct ApproximationReport {
  bool ok = true;
  // index n of the first failing link, between prefixes of length n and n+1;
  // chain_length - 1 denotes a mismatch between the final link and the whole
  // input's output
  std::optional<std::size_t> failing_link;
  std::size_t chain_length = 0;
};

template <typename I, typename O>
ApproximationReport check_approximation(const Spf<I, O>& f, const Stream<I>& s,
                                        const EvalBudget& budget = EvalBudget(1000)) {
  auto items = s.force_vector();
  ApproximationReport rep;
  rep.chain_length = items.size() + 1;
  Stream<O> prev = f(atake(std::size_t{0}, s));
  for (std::size_t n = 1; n <= items.size(); ++n) {
    Stream<O> cur = f(atake(n, s));
    if (prefix_le(prev, cur, budget) == Ternary::no) {
      rep.ok = false;
      rep.failing_link = n - 1;
      return rep;
    }
    prev = cur;
  }
  if (bounded_eq(f(s), prev, budget) == EqVerdict::unequal) {
    rep.ok = false;
    rep.failing_link = items.size();
  }
  return rep;
}

}  // namespace streamkit
