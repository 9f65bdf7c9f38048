#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace streamkit {

// Length domain for streams: a finite count or infinity. Infinity is
// strictly greater than every finite value and absorbs under addition.
class ExtNat {
 public:
  static ExtNat finite(std::uint64_t n) { return ExtNat(n, false); }
  static ExtNat infinity() { return ExtNat(0, true); }

  bool is_infinite() const { return inf_; }

  std::uint64_t value() const {
    if (inf_) throw std::domain_error("ExtNat: value() called on infinity");
    return n_;
  }

  friend bool operator==(const ExtNat& a, const ExtNat& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.n_ == b.n_);
  }
  friend bool operator!=(const ExtNat& a, const ExtNat& b) { return !(a == b); }
  friend bool operator<(const ExtNat& a, const ExtNat& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.n_ < b.n_;
  }
  friend bool operator<=(const ExtNat& a, const ExtNat& b) { return a < b || a == b; }
  friend bool operator>(const ExtNat& a, const ExtNat& b) { return b < a; }
  friend bool operator>=(const ExtNat& a, const ExtNat& b) { return b <= a; }

  friend ExtNat operator+(const ExtNat& a, const ExtNat& b) {
    if (a.inf_ || b.inf_) return infinity();
    return finite(a.n_ + b.n_);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtNat& n) {
    if (n.inf_) return os << "inf";
    return os << n.n_;
  }

 private:
  ExtNat(std::uint64_t n, bool inf) : n_(n), inf_(inf) {}
  std::uint64_t n_;
  bool inf_;
};

// Evaluation horizon for semi-decidable queries on possibly-infinite streams.
struct EvalBudget {
  std::size_t max_elements;

  explicit EvalBudget(std::size_t k) : max_elements(k) {
    if (k == 0) throw std::invalid_argument("EvalBudget: max_elements must be >= 1");
  }
};

// A possibly-infinite, immutable sequence of messages. Elements are produced
// on demand and memoized, so repeated enumeration observes the identical
// sequence. Access is synchronized per node; values are safe to share
// across threads.
template <typename M>
class Stream {
 public:
  // the empty stream
  Stream() : state_(std::make_shared<State>()) { state_->exhausted = true; }

  static Stream of(std::vector<M> items) {
    auto st = std::make_shared<State>();
    st->cache = std::move(items);
    st->exhausted = true;
    return Stream(std::move(st));
  }

  static Stream of(std::initializer_list<M> items) { return of(std::vector<M>(items)); }

  // pull() yields the next element, or nullopt once the source is dry
  // (after which it is never called again). Pass declared_infinite only
  // when the producer yields at every index by construction.
  static Stream lazy(std::function<std::optional<M>()> pull, bool declared_infinite = false) {
    auto st = std::make_shared<State>();
    st->pull = std::move(pull);
    st->infinite = declared_infinite;
    return Stream(std::move(st));
  }

  // Element at index i, forcing production up to i. nullopt when the
  // stream exhausts earlier.
  std::optional<M> at(std::size_t i) const {
    std::lock_guard<std::mutex> lock(state_->mu);
    while (state_->cache.size() <= i && !state_->exhausted) {
      auto v = state_->pull();
      if (v) {
        state_->cache.push_back(std::move(*v));
      } else {
        state_->exhausted = true;
        state_->pull = nullptr;
      }
    }
    if (i < state_->cache.size()) return state_->cache[i];
    return std::nullopt;
  }

  bool declared_infinite() const { return state_->infinite; }

  // First min(n, length) elements, materialized.
  std::vector<M> take_vector(std::size_t n) const {
    std::vector<M> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = at(i);
      if (!v) break;
      out.push_back(std::move(*v));
    }
    return out;
  }

  // Materializes the whole stream; the caller must know it is finite.
  std::vector<M> force_vector() const {
    if (state_->infinite)
      throw std::logic_error("force_vector: stream is declared infinite");
    std::vector<M> out;
    for (std::size_t i = 0;; ++i) {
      auto v = at(i);
      if (!v) break;
      out.push_back(std::move(*v));
    }
    return out;
  }

 private:
  struct State {
    std::mutex mu;
    std::vector<M> cache;
    std::function<std::optional<M>()> pull;
    bool exhausted = false;
    bool infinite = false;
  };

  explicit Stream(std::shared_ptr<State> st) : state_(std::move(st)) {}

  std::shared_ptr<State> state_;
};

// ---------------------------------------------------------------------------
// Operator algebra
// ---------------------------------------------------------------------------

// All of a, then all of b. An infinite first argument absorbs the second.
template <typename M>
Stream<M> concat(Stream<M> a, Stream<M> b) {
  bool inf = a.declared_infinite() || b.declared_infinite();
  return Stream<M>::lazy(
      [a, b, i = std::size_t{0}, in_b = false]() mutable -> std::optional<M> {
        if (!in_b) {
          if (auto v = a.at(i)) {
            ++i;
            return v;
          }
          in_b = true;
          i = 0;
        }
        if (auto v = b.at(i)) {
          ++i;
          return v;
        }
        return std::nullopt;
      },
      inf);
}

// First min(n, length) messages; always finite.
template <typename M>
Stream<M> atake(std::size_t n, Stream<M> s) {
  return Stream<M>::lazy([s, n, i = std::size_t{0}]() mutable -> std::optional<M> {
    if (i >= n) return std::nullopt;
    if (auto v = s.at(i)) {
      ++i;
      return v;
    }
    return std::nullopt;
  });
}

// s without its first min(n, length) messages.
template <typename M>
Stream<M> adrop(std::size_t n, Stream<M> s) {
  return Stream<M>::lazy(
      [s, n, i = std::size_t{0}]() mutable -> std::optional<M> {
        if (auto v = s.at(n + i)) {
          ++i;
          return v;
        }
        return std::nullopt;
      },
      s.declared_infinite());
}

// Message at index n (0-based). Throws when the stream ends first.
template <typename M>
M anth(std::size_t n, const Stream<M>& s) {
  if (auto v = s.at(n)) return *v;
  throw std::out_of_range("anth: stream ends before index " + std::to_string(n));
}

// Verdict of a bounded length query. When exact is false the stream did not
// exhaust within the budget and value is only a lower bound.
struct StreamLength {
  ExtNat value;
  bool exact;

  friend bool operator==(const StreamLength& a, const StreamLength& b) {
    return a.value == b.value && a.exact == b.exact;
  }
  friend bool operator!=(const StreamLength& a, const StreamLength& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const StreamLength& l) {
    return os << (l.exact ? "" : ">=") << l.value;
  }
};

// Exact length when the stream exhausts within the budget, infinity for
// streams that are infinite by construction, otherwise a lower bound.
template <typename M>
StreamLength slen(const Stream<M>& s, const EvalBudget& budget) {
  if (s.declared_infinite()) return {ExtNat::infinity(), true};
  for (std::size_t i = 0; i < budget.max_elements; ++i) {
    if (!s.at(i)) return {ExtNat::finite(i), true};
  }
  return {ExtNat::finite(budget.max_elements), false};
}

// Subsequence of s satisfying keep, order preserved. On an infinite stream a
// filter that rejects everything never produces; callers bound enumeration
// with their budget.
template <typename M, typename Pred>
Stream<M> afilter(Pred keep, Stream<M> s) {
  return Stream<M>::lazy([keep, s, i = std::size_t{0}]() mutable -> std::optional<M> {
    while (auto v = s.at(i)) {
      ++i;
      if (keep(*v)) return v;
    }
    return std::nullopt;
  });
}

// Pointwise image, same length.
template <typename M, typename F>
auto amap(F f, Stream<M> s) -> Stream<std::decay_t<decltype(f(std::declval<const M&>()))>> {
  using N = std::decay_t<decltype(f(std::declval<const M&>()))>;
  return Stream<N>::lazy(
      [f, s, i = std::size_t{0}]() mutable -> std::optional<N> {
        if (auto v = s.at(i)) {
          ++i;
          return f(*v);
        }
        return std::nullopt;
      },
      s.declared_infinite());
}

// Concatenation of all inner streams in order; an infinite inner stream
// absorbs everything after it.
template <typename M>
Stream<M> aflatten(Stream<Stream<M>> ss) {
  return Stream<M>::lazy(
      [ss, outer = std::size_t{0}, inner = std::size_t{0}]() mutable -> std::optional<M> {
        while (auto cur = ss.at(outer)) {
          if (auto v = cur->at(inner)) {
            ++inner;
            return v;
          }
          ++outer;
          inner = 0;
        }
        return std::nullopt;
      });
}

// s repeated without end; infinite by construction. Rejects the empty base.
template <typename M>
Stream<M> aipower(Stream<M> s) {
  if (!s.at(0)) throw std::invalid_argument("aipower: empty base stream");
  return Stream<M>::lazy(
      [s, i = std::size_t{0}]() mutable -> std::optional<M> {
        if (auto v = s.at(i)) {
          ++i;
          return v;
        }
        i = 1;
        return s.at(0);
      },
      true);
}

// Collapses every maximal run of equal adjacent messages to one occurrence.
template <typename M>
Stream<M> aremstutter(Stream<M> s) {
  return Stream<M>::lazy(
      [s, i = std::size_t{0}, last = std::optional<M>{}]() mutable -> std::optional<M> {
        while (auto v = s.at(i)) {
          ++i;
          if (!last || !(*v == *last)) {
            last = v;
            return v;
          }
        }
        return std::nullopt;
      });
}

// Pointwise pairs; length is the minimum of the two lengths.
template <typename A, typename B>
Stream<std::pair<A, B>> azip(Stream<A> a, Stream<B> b) {
  bool inf = a.declared_infinite() && b.declared_infinite();
  return Stream<std::pair<A, B>>::lazy(
      [a, b, i = std::size_t{0}]() mutable -> std::optional<std::pair<A, B>> {
        auto x = a.at(i);
        if (!x) return std::nullopt;
        auto y = b.at(i);
        if (!y) return std::nullopt;
        ++i;
        return std::make_pair(*x, *y);
      },
      inf);
}

template <typename A, typename B>
Stream<A> apro1(Stream<std::pair<A, B>> s) {
  return amap([](const std::pair<A, B>& p) { return p.first; }, s);
}

template <typename A, typename B>
Stream<B> apro2(Stream<std::pair<A, B>> s) {
  return amap([](const std::pair<A, B>& p) { return p.second; }, s);
}

// Three-valued answer for semi-decidable questions.
enum class Ternary { yes, no, unknown_at_budget };

inline std::ostream& operator<<(std::ostream& os, Ternary t) {
  switch (t) {
    case Ternary::yes: return os << "yes";
    case Ternary::no: return os << "no";
    default: return os << "unknown-at-budget";
  }
}

// Is a an element-wise prefix of b? Compared up to the budget; unknown when
// both streams agree through the whole budget without a exhausting.
template <typename M>
Ternary prefix_le(const Stream<M>& a, const Stream<M>& b, const EvalBudget& budget) {
  for (std::size_t i = 0; i < budget.max_elements; ++i) {
    auto x = a.at(i);
    if (!x) return Ternary::yes;
    auto y = b.at(i);
    if (!y) return Ternary::no;
    if (!(*x == *y)) return Ternary::no;
  }
  if (!a.at(budget.max_elements)) return Ternary::yes;
  return Ternary::unknown_at_budget;
}

enum class EqVerdict { equal_finite, equal_at_budget, unequal };

inline std::ostream& operator<<(std::ostream& os, EqVerdict v) {
  switch (v) {
    case EqVerdict::equal_finite: return os << "equal-finite";
    case EqVerdict::equal_at_budget: return os << "equal-at-budget";
    default: return os << "unequal";
  }
}

// Bounded equality: unequal as soon as an index within the budget differs or
// one side exhausts first; equal-finite when both exhaust agreeing
// everywhere; equal-at-budget otherwise.
template <typename M>
EqVerdict bounded_eq(const Stream<M>& a, const Stream<M>& b, const EvalBudget& budget) {
  for (std::size_t i = 0; i <= budget.max_elements; ++i) {
    auto x = a.at(i);
    auto y = b.at(i);
    if (!x && !y) return EqVerdict::equal_finite;
    if (!x || !y) return EqVerdict::unequal;
    if (!(*x == *y)) return EqVerdict::unequal;
  }
  return EqVerdict::equal_at_budget;
}

// Structural equality by full materialization; both streams must be finite.
template <typename M>
bool finite_eq(const Stream<M>& a, const Stream<M>& b) {
  return a.force_vector() == b.force_vector();
}

}  // namespace streamkit
