#pragma once

#include <algorithm>
#include <deque>

#include "streamkit/spf.hpp"

namespace streamkit {

// State machine whose transitions consume one input message and emit a
// finite sequence of output messages. Start entries may carry initial
// output that is not a reaction to any input.
template <typename S, typename I, typename O>
struct Ioa {
  struct Transition {
    S src;
    I input;
    S dst;
    std::vector<O> output;

    friend bool operator==(const Transition& a, const Transition& b) {
      return a.src == b.src && a.input == b.input && a.dst == b.dst && a.output == b.output;
    }
  };

  struct Init {
    S state;
    std::vector<O> output;

    friend bool operator==(const Init& a, const Init& b) {
      return a.state == b.state && a.output == b.output;
    }
  };

  std::vector<S> states;
  std::vector<I> in_alphabet;
  std::vector<O> out_alphabet;
  std::vector<Transition> delta;
  std::vector<Init> inits;
};

namespace detail {

template <typename C, typename X>
bool contains(const C& xs, const X& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

// set equality under operator== only, duplicates ignored
template <typename C>
bool same_set(const C& a, const C& b) {
  for (const auto& x : a)
    if (!contains(b, x)) return false;
  for (const auto& x : b)
    if (!contains(a, x)) return false;
  return true;
}

}  // namespace detail

template <typename S, typename I, typename O>
std::vector<const typename Ioa<S, I, O>::Transition*> transitions_for(const Ioa<S, I, O>& a,
                                                                      const S& s, const I& x) {
  std::vector<const typename Ioa<S, I, O>::Transition*> out;
  for (const auto& t : a.delta) {
    if (t.src == s && t.input == x) out.push_back(&t);
  }
  return out;
}

template <typename S, typename I, typename O>
struct ValidationReport {
  bool well_defined = true;
  bool deterministic = true;
  bool complete = true;
  std::vector<std::string> defects;  // well-definedness findings
  std::vector<typename Ioa<S, I, O>::Transition> nondeterministic_witnesses;
  std::vector<typename Ioa<S, I, O>::Init> init_choice_witnesses;
  std::vector<std::pair<S, I>> missing;  // (state, input) pairs with no transition

  bool all_good() const { return well_defined && deterministic && complete; }
};

// Checks membership of every transition and init entry in the declared
// sets, at-most-one transition per (state, input) plus a single init entry
// (deterministic), and at-least-one transition per (state, input)
// (complete).
template <typename S, typename I, typename O>
ValidationReport<S, I, O> validate(const Ioa<S, I, O>& a) {
  ValidationReport<S, I, O> rep;
  auto flag = [&rep](const std::string& msg) {
    rep.well_defined = false;
    rep.defects.push_back(msg);
  };

  for (const auto& t : a.delta) {
    if (!detail::contains(a.states, t.src)) flag("transition source not in state set");
    if (!detail::contains(a.states, t.dst)) flag("transition destination not in state set");
    if (!detail::contains(a.in_alphabet, t.input)) flag("transition input not in input alphabet");
    for (const auto& o : t.output) {
      if (!detail::contains(a.out_alphabet, o)) flag("transition output not in output alphabet");
    }
  }
  for (const auto& in : a.inits) {
    if (!detail::contains(a.states, in.state)) flag("init state not in state set");
    for (const auto& o : in.output) {
      if (!detail::contains(a.out_alphabet, o)) flag("init output not in output alphabet");
    }
  }
  if (a.inits.empty()) flag("init set is empty");

  for (const auto& s : a.states) {
    for (const auto& x : a.in_alphabet) {
      auto ts = transitions_for(a, s, x);
      if (ts.size() > 1) {
        rep.deterministic = false;
        for (const auto* t : ts) rep.nondeterministic_witnesses.push_back(*t);
      }
      if (ts.empty()) {
        rep.complete = false;
        rep.missing.emplace_back(s, x);
      }
    }
  }
  if (a.inits.size() != 1) {
    rep.deterministic = false;
    for (const auto& in : a.inits) rep.init_choice_witnesses.push_back(in);
  }
  return rep;
}

// Picks among enabled alternatives by index; resolves nondeterminism.
using ChoiceResolver = std::function<std::size_t(std::size_t)>;

inline std::size_t first_choice(std::size_t) { return 0; }

// One transition from state s on input x. The resolver picks among enabled
// transitions; throws when none is enabled (stuck).
template <typename S, typename I, typename O>
std::pair<S, Stream<O>> step(const Ioa<S, I, O>& a, const S& s, const I& x,
                             const ChoiceResolver& resolver = first_choice) {
  auto ts = transitions_for(a, s, x);
  if (ts.empty()) throw std::domain_error("step: no transition enabled (stuck)");
  auto k = resolver(ts.size());
  if (k >= ts.size()) throw std::out_of_range("step: resolver chose an out-of-range index");
  return {ts[k]->dst, Stream<O>::of(ts[k]->output)};
}

// Lowers a deterministic, complete automaton to the stream function that
// emits the initial output and then each transition's output per consumed
// input message. Continuous by construction.
template <typename S, typename I, typename O>
Spf<I, O> ioafp(const Ioa<S, I, O>& a) {
  auto rep = validate(a);
  if (!rep.all_good())
    throw std::invalid_argument(
        "ioafp: automaton must be well-defined, deterministic and complete");
  auto machine = std::make_shared<const Ioa<S, I, O>>(a);
  auto fn = [machine](Stream<I> in) {
    return Stream<O>::lazy(
        [machine, in, state = machine->inits[0].state,
         pending = std::deque<O>(machine->inits[0].output.begin(), machine->inits[0].output.end()),
         i = std::size_t{0}]() mutable -> std::optional<O> {
          while (pending.empty()) {
            auto v = in.at(i);
            if (!v) return std::nullopt;
            ++i;
            auto ts = transitions_for(*machine, state, *v);
            if (ts.empty())
              throw std::domain_error("ioafp: input message outside the input alphabet");
            state = ts[0]->dst;
            for (const auto& o : ts[0]->output) pending.push_back(o);
          }
          O front = std::move(pending.front());
          pending.pop_front();
          return front;
        });
  };
  return Spf<I, O>(std::move(fn), SpfKind::automaton_derived);
}

// Step-by-step execution record. A run that hits a (state, input) hole
// carries the partial trace with the stuck position attached.
template <typename S, typename I, typename O>
struct RunTrace {
  struct Step {
    S from;
    I input;
    S to;
    std::vector<O> output;
  };

  S start;
  std::vector<O> initial_output;
  std::vector<Step> steps;
  bool stuck = false;
  std::optional<std::pair<S, I>> stuck_at;

  std::vector<O> output() const {
    std::vector<O> out = initial_output;
    for (const auto& st : steps) out.insert(out.end(), st.output.begin(), st.output.end());
    return out;
  }
};

template <typename S, typename I, typename O>
RunTrace<S, I, O> run(const Ioa<S, I, O>& a, const Stream<I>& input,
                      const ChoiceResolver& resolver = first_choice) {
  auto rep = validate(a);
  if (!rep.well_defined) throw std::invalid_argument("run: automaton is not well-defined");
  RunTrace<S, I, O> tr;
  auto init_idx = resolver(a.inits.size());
  if (init_idx >= a.inits.size())
    throw std::out_of_range("run: resolver chose an out-of-range init entry");
  tr.start = a.inits[init_idx].state;
  tr.initial_output = a.inits[init_idx].output;
  S cur = tr.start;
  for (std::size_t i = 0;; ++i) {
    auto v = input.at(i);
    if (!v) break;
    auto ts = transitions_for(a, cur, *v);
    if (ts.empty()) {
      tr.stuck = true;
      tr.stuck_at = std::make_pair(cur, *v);
      break;
    }
    auto k = resolver(ts.size());
    if (k >= ts.size()) throw std::out_of_range("run: resolver chose an out-of-range index");
    tr.steps.push_back({cur, *v, ts[k]->dst, ts[k]->output});
    cur = ts[k]->dst;
  }
  return tr;
}

template <typename S1, typename S2, typename I>
struct BisimResult {
  bool bisimilar = false;
  // coarsest bisimulation over reachable state pairs, on success
  std::vector<std::pair<S1, S2>> relation;
  // distinguishing evidence, on failure
  std::optional<std::pair<S1, S2>> counterexample_pair;
  std::optional<I> counterexample_input;
  std::string reason;
};

namespace detail {

template <typename S, typename I, typename O>
std::vector<S> reachable_states(const Ioa<S, I, O>& a) {
  std::vector<S> seen;
  std::deque<S> work;
  for (const auto& in : a.inits) {
    if (!contains(seen, in.state)) {
      seen.push_back(in.state);
      work.push_back(in.state);
    }
  }
  while (!work.empty()) {
    S s = work.front();
    work.pop_front();
    for (const auto& t : a.delta) {
      if (t.src == s && !contains(seen, t.dst)) {
        seen.push_back(t.dst);
        work.push_back(t.dst);
      }
    }
  }
  return seen;
}

}  // namespace detail

// Greatest bisimulation by iterative refinement over reachable state pairs.
// Related states must have, for every input, mutually matching transitions
// with equal output streams leading to related states; start states with
// equal initial output must be related. Requires equal input alphabets.
template <typename S1, typename S2, typename I, typename O>
BisimResult<S1, S2, I> bisimilar(const Ioa<S1, I, O>& a, const Ioa<S2, I, O>& b) {
  if (!detail::same_set(a.in_alphabet, b.in_alphabet))
    throw std::invalid_argument("bisimilar: input alphabets differ");

  auto ra = detail::reachable_states(a);
  auto rb = detail::reachable_states(b);

  struct Cell {
    bool alive = true;
    std::optional<I> killer;
  };
  std::vector<std::vector<Cell>> rel(ra.size(), std::vector<Cell>(rb.size()));

  auto alive = [&](const S1& s, const S2& t) {
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (!(ra[i] == s)) continue;
      for (std::size_t j = 0; j < rb.size(); ++j) {
        if (rb[j] == t) return rel[i][j].alive;
      }
    }
    return false;  // unreachable states never participate
  };

  auto moves_match = [&](const S1& s, const S2& t, const I& x) {
    auto ta = transitions_for(a, s, x);
    auto tb = transitions_for(b, t, x);
    for (const auto* ma : ta) {
      bool matched = false;
      for (const auto* mb : tb) {
        if (ma->output == mb->output && alive(ma->dst, mb->dst)) {
          matched = true;
          break;
        }
      }
      if (!matched) return false;
    }
    for (const auto* mb : tb) {
      bool matched = false;
      for (const auto* ma : ta) {
        if (ma->output == mb->output && alive(ma->dst, mb->dst)) {
          matched = true;
          break;
        }
      }
      if (!matched) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < ra.size(); ++i) {
      for (std::size_t j = 0; j < rb.size(); ++j) {
        if (!rel[i][j].alive) continue;
        for (const auto& x : a.in_alphabet) {
          if (!moves_match(ra[i], rb[j], x)) {
            rel[i][j].alive = false;
            rel[i][j].killer = x;
            changed = true;
            break;
          }
        }
      }
    }
  }

  BisimResult<S1, S2, I> res;
  auto cell_for = [&](const S1& s, const S2& t) -> const Cell* {
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (!(ra[i] == s)) continue;
      for (std::size_t j = 0; j < rb.size(); ++j) {
        if (rb[j] == t) return &rel[i][j];
      }
    }
    return nullptr;
  };

  // every init of a must be matched by an init of b with equal initial
  // output and related start states, and vice versa
  auto fail_at = [&](const Cell* dead, std::optional<std::pair<S1, S2>> dead_pair) {
    res.bisimilar = false;
    if (dead) {
      res.counterexample_pair = std::move(dead_pair);
      res.counterexample_input = dead->killer;
      res.reason = "start states are not bisimilar";
    } else {
      res.reason = "no start entry with matching initial output";
    }
  };

  for (const auto& fi : a.inits) {
    bool matched = false;
    const Cell* dead = nullptr;
    std::optional<std::pair<S1, S2>> dead_pair;
    for (const auto& ti : b.inits) {
      if (!(fi.output == ti.output)) continue;
      const Cell* c = cell_for(fi.state, ti.state);
      if (c && c->alive) {
        matched = true;
        break;
      }
      if (c) {
        dead = c;
        dead_pair = std::make_pair(fi.state, ti.state);
      }
    }
    if (!matched) {
      fail_at(dead, std::move(dead_pair));
      return res;
    }
  }
  for (const auto& fi : b.inits) {
    bool matched = false;
    const Cell* dead = nullptr;
    std::optional<std::pair<S1, S2>> dead_pair;
    for (const auto& ti : a.inits) {
      if (!(fi.output == ti.output)) continue;
      const Cell* c = cell_for(ti.state, fi.state);
      if (c && c->alive) {
        matched = true;
        break;
      }
      if (c) {
        dead = c;
        dead_pair = std::make_pair(ti.state, fi.state);
      }
    }
    if (!matched) {
      fail_at(dead, std::move(dead_pair));
      return res;
    }
  }

  res.bisimilar = true;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    for (std::size_t j = 0; j < rb.size(); ++j) {
      if (rel[i][j].alive) res.relation.emplace_back(ra[i], rb[j]);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Auction component
// ---------------------------------------------------------------------------

template <typename B>
struct AuctionState {
  unsigned remaining = 0;
  std::optional<B> last_bidder;

  friend bool operator==(const AuctionState& a, const AuctionState& b) {
    return a.remaining == b.remaining && a.last_bidder == b.last_bidder;
  }

  friend std::ostream& operator<<(std::ostream& os, const AuctionState& s) {
    os << "(" << s.remaining << ",";
    if (s.last_bidder)
      os << *s.last_bidder;
    else
      os << "-";
    return os << ")";
  }
};

// An auction event is a bid or the tick advancing the countdown.
template <typename B>
struct AuctionEvent {
  std::optional<B> bidder;  // empty: a tick

  static AuctionEvent tick() { return AuctionEvent{std::nullopt}; }
  static AuctionEvent bid(B b) { return AuctionEvent{std::move(b)}; }

  bool is_tick() const { return !bidder.has_value(); }

  friend bool operator==(const AuctionEvent& a, const AuctionEvent& b) {
    return a.bidder == b.bidder;
  }

  friend std::ostream& operator<<(std::ostream& os, const AuctionEvent& e) {
    if (e.is_tick()) return os << "tick";
    return os << "bid(" << *e.bidder << ")";
  }
};

// Open-auction component: bids are accepted while the countdown is positive
// and overwrite the stored last bidder; each tick decrements the countdown
// and the stored bidder is announced as winner when it reaches zero. Bids do
// not reset the countdown. After the countdown hits zero every input
// self-loops silently. Deterministic and complete for every timeout >= 1.
template <typename B>
Ioa<AuctionState<B>, AuctionEvent<B>, B> build_auction(unsigned timeout,
                                                       const std::vector<B>& bidder_domain) {
  if (timeout == 0) throw std::invalid_argument("build_auction: timeout must be >= 1");
  Ioa<AuctionState<B>, AuctionEvent<B>, B> a;

  std::vector<std::optional<B>> bidders{std::nullopt};
  for (const auto& b : bidder_domain) bidders.emplace_back(b);

  for (unsigned r = 0; r <= timeout; ++r) {
    for (const auto& last : bidders) a.states.push_back({r, last});
  }
  a.in_alphabet.push_back(AuctionEvent<B>::tick());
  for (const auto& b : bidder_domain) a.in_alphabet.push_back(AuctionEvent<B>::bid(b));
  a.out_alphabet = bidder_domain;

  for (const auto& s : a.states) {
    for (const auto& b : bidder_domain) {
      AuctionState<B> dst = s.remaining > 0 ? AuctionState<B>{s.remaining, b} : s;
      a.delta.push_back({s, AuctionEvent<B>::bid(b), dst, {}});
    }
    if (s.remaining > 1) {
      a.delta.push_back({s, AuctionEvent<B>::tick(), {s.remaining - 1, s.last_bidder}, {}});
    } else if (s.remaining == 1) {
      std::vector<B> announce;
      if (s.last_bidder) announce.push_back(*s.last_bidder);
      a.delta.push_back({s, AuctionEvent<B>::tick(), {0, s.last_bidder}, announce});
    } else {
      a.delta.push_back({s, AuctionEvent<B>::tick(), s, {}});
    }
  }
  a.inits.push_back({{timeout, std::nullopt}, {}});
  return a;
}

}  // namespace streamkit
