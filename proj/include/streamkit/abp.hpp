#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <variant>

#include "streamkit/network.hpp"
#include "streamkit/stream.hpp"

namespace streamkit {

template <typename D>
struct DataPacket {
  D payload;
  bool bit;

  friend bool operator==(const DataPacket& a, const DataPacket& b) {
    return a.payload == b.payload && a.bit == b.bit;
  }
  friend bool operator!=(const DataPacket& a, const DataPacket& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const DataPacket& p) {
    return os << "(" << p.payload << "," << (p.bit ? 1 : 0) << ")";
  }
};

// How an oracle stream was built; carried into trace headers so a recorded
// run can be replayed exactly.
struct OracleDesc {
  enum class Kind { cycle, seeded };
  Kind kind = Kind::cycle;
  std::vector<bool> prefix;  // cycle kind
  std::vector<bool> cycle;   // cycle kind, nonempty
  std::uint64_t seed = 0;    // seeded kind
  double theta = 1.0;        // seeded kind, in (0, 1]
};

// Infinite Boolean stream resolving the media's nondeterminism: position k
// decides whether the k-th offered message is transmitted. Reproducible:
// the same construction yields the same bits.
class OracleStream {
 public:
  // finite prefix followed by an endlessly repeated nonempty cycle
  static OracleStream cycle(std::vector<bool> prefix, std::vector<bool> cycle_part) {
    if (cycle_part.empty())
      throw std::invalid_argument("OracleStream: cycle part must be nonempty");
    OracleDesc d;
    d.kind = OracleDesc::Kind::cycle;
    d.prefix = prefix;
    d.cycle = cycle_part;
    auto bits = concat(Stream<bool>::of(std::move(prefix)),
                       aipower(Stream<bool>::of(std::move(cycle_part))));
    return OracleStream(std::move(bits), std::move(d));
  }

  static OracleStream constant(bool v) { return cycle({}, {v}); }

  // cycle of period ceil(1/theta) carrying a single true: guarantees one
  // transmission in every window of that length
  static OracleStream cycle_density(double theta) {
    check_theta(theta);
    auto period = static_cast<std::size_t>(std::ceil(1.0 / theta));
    std::vector<bool> c(period, false);
    c[0] = true;
    return cycle({}, std::move(c));
  }

  // Bernoulli bits with density theta from a seeded generator. The 53-bit
  // uniform is computed from raw engine output so the sequence does not
  // depend on the standard library's distribution implementation.
  static OracleStream seeded(std::uint64_t seed, double theta) {
    check_theta(theta);
    OracleDesc d;
    d.kind = OracleDesc::Kind::seeded;
    d.seed = seed;
    d.theta = theta;
    auto eng = std::make_shared<std::mt19937_64>(seed);
    auto bits = Stream<bool>::lazy(
        [eng, theta]() -> std::optional<bool> {
          double u = static_cast<double>((*eng)() >> 11) * (1.0 / 9007199254740992.0);
          return u < theta;
        },
        true);
    return OracleStream(std::move(bits), std::move(d));
  }

  static OracleStream from_desc(const OracleDesc& d) {
    if (d.kind == OracleDesc::Kind::seeded) return seeded(d.seed, d.theta);
    return cycle(d.prefix, d.cycle);
  }

  bool at(std::size_t k) const { return *bits_.at(k); }
  const Stream<bool>& bits() const { return bits_; }
  const OracleDesc& desc() const { return desc_; }

 private:
  OracleStream(Stream<bool> bits, OracleDesc d) : bits_(std::move(bits)), desc_(std::move(d)) {}

  static void check_theta(double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
      throw std::invalid_argument("OracleStream: theta must be in (0, 1]");
  }

  Stream<bool> bits_;
  OracleDesc desc_;
};

// ---------------------------------------------------------------------------
// Media
// ---------------------------------------------------------------------------

// Transmits the k-th message iff the k-th oracle bit is true. Never creates,
// modifies, rearranges or replicates messages.
template <typename A>
Stream<A> medium_apply(Stream<A> input, const OracleStream& p) {
  return Stream<A>::lazy(
      [input, bits = p.bits(), k = std::size_t{0}]() mutable -> std::optional<A> {
        while (auto v = input.at(k)) {
          bool keep = *bits.at(k);
          ++k;
          if (keep) return v;
        }
        return std::nullopt;
      });
}

struct MediumWitness {
  bool holds = false;
  // oracle prefix witnessing the relation, one bit per input message
  std::vector<bool> oracle_prefix;
};

// Does some oracle relate input to output? For finite streams that is
// exactly the subsequence test; the constructed witness marks the
// transmitted positions.
template <typename A>
MediumWitness medium_relation_check(const Stream<A>& input, const Stream<A>& output) {
  auto in = input.force_vector();
  auto out = output.force_vector();
  MediumWitness w;
  w.oracle_prefix.assign(in.size(), false);
  std::size_t j = 0;
  for (std::size_t i = 0; i < in.size() && j < out.size(); ++i) {
    if (in[i] == out[j]) {
      w.oracle_prefix[i] = true;
      ++j;
    }
  }
  w.holds = (j == out.size());
  if (!w.holds) w.oracle_prefix.clear();
  return w;
}

struct FairnessReport {
  bool counts_match = false;       // transmitted == oracle trues on the examined prefix
  bool projection_lemma_holds = false;
  std::size_t examined = 0;
  std::size_t oracle_trues = 0;
  std::size_t transmitted = 0;
  StreamLength pair_len{ExtNat::finite(0), false};
  StreamLength proj1_len{ExtNat::finite(0), false};
  StreamLength proj2_len{ExtNat::finite(0), false};

  bool ok() const { return counts_match && projection_lemma_holds; }
};

// Bounded shadow of medium fairness: within the budget the number of
// transmitted messages equals the number of true oracle bits over the
// offered prefix, and pairing input with oracle bits gives projections of
// equal length.
template <typename A>
FairnessReport fairness_check(const OracleStream& p, Stream<A> input, const EvalBudget& budget) {
  FairnessReport r;
  auto taken = atake(budget.max_elements, input).force_vector();
  r.examined = taken.size();
  for (std::size_t k = 0; k < taken.size(); ++k) {
    if (p.at(k)) ++r.oracle_trues;
  }
  r.transmitted = medium_apply(Stream<A>::of(taken), p).force_vector().size();
  r.counts_match = (r.transmitted == r.oracle_trues);

  auto z = azip(input, p.bits());
  r.pair_len = slen(z, budget);
  r.proj1_len = slen(apro1(z), budget);
  r.proj2_len = slen(apro2(z), budget);
  r.projection_lemma_holds = (r.proj1_len == r.proj2_len && r.proj1_len == r.pair_len);
  return r;
}

// ---------------------------------------------------------------------------
// Sender and receiver
// ---------------------------------------------------------------------------

// Alternating-bit sender. Keeps the pending data in a queue; the head datum
// is (re)transmitted with the current bit each round until an acknowledgment
// carrying that bit arrives, then the bit flips and the queue advances.
template <typename D>
class Sender {
 public:
  Sender(bool initial_bit, std::vector<D> data)
      : queue_(data.begin(), data.end()), bit_(initial_bit) {}

  bool done() const { return queue_.empty(); }
  bool awaiting_ack() const { return awaiting_; }
  bool current_bit() const { return bit_; }

  // this round's emission; fresh datum or retransmission
  DataPacket<D> emit() {
    if (done()) throw std::logic_error("Sender: emit() with nothing left to send");
    awaiting_ = true;
    return {queue_.front(), bit_};
  }

  void on_ack(bool b) {
    if (!awaiting_ || b != bit_) return;  // wrong-bit acks are ignored
    queue_.pop_front();
    bit_ = !bit_;
    awaiting_ = false;
  }

 private:
  std::deque<D> queue_;
  bool bit_;
  bool awaiting_ = false;
};

// Alternating-bit receiver. Acknowledges every packet with the packet's own
// bit; delivers the payload only when the bit differs from the last
// accepted one.
template <typename D>
class Receiver {
 public:
  struct Reaction {
    bool ack;
    std::optional<D> delivered;
  };

  Reaction on_packet(const DataPacket<D>& p) {
    Reaction r{p.bit, std::nullopt};
    if (!last_bit_ || *last_bit_ != p.bit) {
      r.delivered = p.payload;
      last_bit_ = p.bit;
    }
    return r;
  }

 private:
  std::optional<bool> last_bit_;
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

// Complete channel record of one simulation. Channel names follow the wiring:
// i = external input, ds/dr = packets before/after the data medium,
// ar/as_ = acknowledgments before/after the ack medium, o = delivered output.
template <typename D>
struct AbpTrace {
  std::vector<D> i;
  std::vector<DataPacket<D>> ds;
  std::vector<DataPacket<D>> dr;
  std::vector<bool> ar;
  std::vector<bool> as_;
  std::vector<D> o;
  std::size_t rounds = 0;
  bool completed = false;  // all input delivered and acknowledged
  OracleDesc data_oracle;
  OracleDesc ack_oracle;

  struct Round {
    std::optional<DataPacket<D>> sent;       // ds emission
    std::optional<DataPacket<D>> received;   // dr arrival
    std::optional<bool> ack_sent;            // ar emission
    std::optional<bool> ack_through;         // as_ arrival
    std::optional<D> delivered;              // o emission
  };
  std::vector<Round> round_log;
};

// Round-based execution: each round the sender emits once, the data medium
// consults its next oracle position, the receiver reacts, and the ack medium
// decides whether the acknowledgment reaches the sender before the next
// round. Stops when all input is acknowledged or at max_rounds; running out
// of rounds is a trace property, not an error.
template <typename D>
AbpTrace<D> simulate_abp(const std::vector<D>& input, bool sender_initial_bit,
                         const OracleStream& data_oracle, const OracleStream& ack_oracle,
                         std::size_t max_rounds) {
  if (max_rounds == 0) throw std::invalid_argument("simulate_abp: max_rounds must be >= 1");
  AbpTrace<D> t;
  t.i = input;
  t.data_oracle = data_oracle.desc();
  t.ack_oracle = ack_oracle.desc();

  Sender<D> sender(sender_initial_bit, input);
  Receiver<D> receiver;
  for (std::size_t r = 1; r <= max_rounds && !sender.done(); ++r) {
    typename AbpTrace<D>::Round rec;
    auto pkt = sender.emit();
    t.ds.push_back(pkt);
    rec.sent = pkt;
    if (data_oracle.at(t.ds.size() - 1)) {
      t.dr.push_back(pkt);
      rec.received = pkt;
      auto react = receiver.on_packet(pkt);
      t.ar.push_back(react.ack);
      rec.ack_sent = react.ack;
      if (react.delivered) {
        t.o.push_back(*react.delivered);
        rec.delivered = *react.delivered;
      }
      if (ack_oracle.at(t.ar.size() - 1)) {
        t.as_.push_back(react.ack);
        rec.ack_through = react.ack;
        sender.on_ack(react.ack);
      }
    }
    t.round_log.push_back(std::move(rec));
    t.rounds = r;
  }
  t.completed = sender.done();
  return t;
}

// ---------------------------------------------------------------------------
// Relational checkers
// ---------------------------------------------------------------------------

struct CheckVerdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct SenderReport {
  std::array<CheckVerdict, 5> conjuncts;

  bool all_pass() const {
    for (const auto& c : conjuncts)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

template <typename T>
std::string render_seq(const std::vector<T>& xs, std::size_t limit = 8) {
  std::ostringstream os;
  os << "<";
  for (std::size_t k = 0; k < xs.size() && k < limit; ++k) {
    if (k) os << ",";
    os << xs[k];
  }
  if (xs.size() > limit) os << ",...";
  os << ">";
  return os.str();
}

}  // namespace detail

// Finite-trace checks of the sender obligations:
//   1. de-stuttered packets carry the input data in arrival order
//   2. de-stuttered bit sequence alternates from some initial bit
//   3. each fresh packet negates the previous packet's bit
//   4. after each correct ack with input remaining, the next datum is the
//      next packet actually transmitted (vacuous when the trace ends first)
//   5. an unacknowledged datum is retransmitted to the final emission and
//      never superseded
template <typename D>
SenderReport sender_spec_check(const AbpTrace<D>& t) {
  SenderReport rep;
  rep.conjuncts[0].name = "sender.order";
  rep.conjuncts[1].name = "sender.initial-bit";
  rep.conjuncts[2].name = "sender.alternation";
  rep.conjuncts[3].name = "sender.progress";
  rep.conjuncts[4].name = "sender.persistence";

  auto ds = Stream<DataPacket<D>>::of(t.ds);
  auto fresh = aremstutter(ds).force_vector();

  {
    std::vector<D> payloads;
    payloads.reserve(fresh.size());
    for (const auto& p : fresh) payloads.push_back(p.payload);
    bool ok = payloads.size() <= t.i.size() &&
              std::equal(payloads.begin(), payloads.end(), t.i.begin());
    rep.conjuncts[0].pass = ok;
    if (!ok)
      rep.conjuncts[0].detail = "fresh payloads " + detail::render_seq(payloads) +
                                " are not a prefix of the input " + detail::render_seq(t.i);
  }

  {
    auto bits =
        aremstutter(amap([](const DataPacket<D>& p) { return p.bit; }, ds)).force_vector();
    bool ok = true;
    for (std::size_t k = 1; k < bits.size(); ++k) ok = ok && (bits[k] != bits[k - 1]);
    rep.conjuncts[1].pass = ok;
    if (!ok) rep.conjuncts[1].detail = "de-stuttered bit sequence does not alternate";
  }

  {
    bool ok = true;
    for (std::size_t k = 1; k < fresh.size(); ++k) ok = ok && (fresh[k].bit != fresh[k - 1].bit);
    rep.conjuncts[2].pass = ok;
    if (!ok) rep.conjuncts[2].detail = "two consecutive fresh packets share a bit";
  }

  // replay the sender's ack consumption: acknowledgments arriving on as_
  // advance the expected bit whenever they match it
  std::size_t acked = 0;
  if (!fresh.empty()) {
    bool awaiting = fresh[0].bit;
    for (bool a : t.as_) {
      if (acked >= t.i.size()) break;
      if (a == awaiting) {
        ++acked;
        awaiting = !awaiting;
      }
    }
  }

  {
    bool ok = true;
    std::string why;
    for (std::size_t j = 1; j <= acked && ok; ++j) {
      if (j >= t.i.size()) break;  // nothing left to transmit after datum j
      if (fresh.size() > j && !(fresh[j].payload == t.i[j])) {
        ok = false;
        why = "packet after the ack of datum " + std::to_string(j) +
              " does not carry the next input datum";
      }
    }
    rep.conjuncts[3].pass = ok;
    rep.conjuncts[3].detail = why;
  }

  {
    bool ok = fresh.size() <= acked + 1;
    std::string why;
    if (!ok) {
      why = "a datum was superseded without a matching acknowledgment";
    } else if (fresh.size() == acked + 1 && !fresh.empty()) {
      // the unacknowledged datum's run must extend to the final emission
      if (!(t.ds.back() == fresh.back())) {
        ok = false;
        why = "the unacknowledged datum is not the final emission";
      }
    }
    rep.conjuncts[4].pass = ok;
    rep.conjuncts[4].detail = why;
  }

  return rep;
}

struct ReceiverReport {
  std::array<CheckVerdict, 2> verdicts;

  bool all_pass() const { return verdicts[0].pass && verdicts[1].pass; }
};

// Finite-trace checks of the receiver obligations:
//   1. every received packet is acknowledged with its own bit, in order
//   2. the delivered stream is the payload projection of the received
//      packets with consecutive equal-bit packets collapsed
template <typename D>
ReceiverReport receiver_spec_check(const AbpTrace<D>& t) {
  ReceiverReport rep;
  rep.verdicts[0].name = "receiver.acks";
  rep.verdicts[1].name = "receiver.delivery";

  std::vector<bool> expected_acks;
  expected_acks.reserve(t.dr.size());
  for (const auto& p : t.dr) expected_acks.push_back(p.bit);
  rep.verdicts[0].pass = (expected_acks == t.ar);
  if (!rep.verdicts[0].pass)
    rep.verdicts[0].detail = "ack channel differs from the received packets' bits";

  std::vector<D> expected_o;
  std::optional<bool> last;
  for (const auto& p : t.dr) {
    if (!last || *last != p.bit) {
      expected_o.push_back(p.payload);
      last = p.bit;
    }
  }
  rep.verdicts[1].pass = (expected_o == t.o);
  if (!rep.verdicts[1].pass)
    rep.verdicts[1].detail = "delivered stream " + detail::render_seq(t.o) +
                             " differs from expected " + detail::render_seq(expected_o);

  return rep;
}

// Safety: the delivered stream is a prefix of the input, and a completed
// run delivered everything.
template <typename D>
CheckVerdict overall_check(const AbpTrace<D>& t) {
  CheckVerdict v{"overall", true, ""};
  bool prefix = t.o.size() <= t.i.size() && std::equal(t.o.begin(), t.o.end(), t.i.begin());
  if (!prefix) {
    v.pass = false;
    v.detail = "delivered stream is not a prefix of the input";
  } else if (t.completed && t.o != t.i) {
    v.pass = false;
    v.detail = "completed run did not deliver the whole input";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Dataflow form
// ---------------------------------------------------------------------------

// Sender emissions as a function of the complete input and acknowledgment
// histories; prefix-monotone in both arguments. A correct ack advances to
// the next datum, a wrong one triggers a retransmission.
template <typename D>
std::vector<DataPacket<D>> sender_history(const std::vector<D>& data,
                                          const std::vector<bool>& acks, bool initial_bit) {
  std::vector<DataPacket<D>> out;
  std::size_t cur = 0;
  bool bit = initial_bit;
  if (cur < data.size()) out.push_back({data[cur], bit});
  for (bool a : acks) {
    if (cur >= data.size()) break;
    if (a == bit) {
      ++cur;
      bit = !bit;
      if (cur < data.size()) out.push_back({data[cur], bit});
    } else {
      out.push_back({data[cur], bit});
    }
  }
  return out;
}

// Channel value for the dataflow form of the protocol. D itself must not be
// bool or DataPacket<D>.
template <typename D>
using AbpValue = std::variant<D, DataPacket<D>, bool>;

// The protocol as a feedback network over channels i -> sender -> ds ->
// data medium -> dr -> receiver -> ar -> ack medium -> as -> sender, with
// external input "i" and external output "o". Solvable with fixpoint_solve.
template <typename D>
Network<AbpValue<D>> make_abp_network(bool sender_initial_bit, const OracleStream& data_oracle,
                                      const OracleStream& ack_oracle) {
  using V = AbpValue<D>;
  Network<V> net;

  net.add_component(
      "sender", {"i", "as"}, {"ds"},
      [sender_initial_bit](const std::vector<std::vector<V>>& ins) {
        std::vector<D> data;
        for (const auto& v : ins[0]) data.push_back(std::get<D>(v));
        std::vector<bool> acks;
        for (const auto& v : ins[1]) acks.push_back(std::get<bool>(v));
        std::vector<V> out;
        for (auto& p : sender_history(data, acks, sender_initial_bit)) out.emplace_back(p);
        return std::vector<std::vector<V>>{std::move(out)};
      });

  auto medium = [](const OracleStream& p) {
    return [p](const std::vector<std::vector<V>>& ins) {
      std::vector<V> out;
      for (std::size_t k = 0; k < ins[0].size(); ++k) {
        if (p.at(k)) out.push_back(ins[0][k]);
      }
      return std::vector<std::vector<V>>{std::move(out)};
    };
  };
  net.add_component("data_medium", {"ds"}, {"dr"}, medium(data_oracle));

  net.add_component("receiver", {"dr"}, {"ar", "o"},
                    [](const std::vector<std::vector<V>>& ins) {
                      std::vector<V> acks, delivered;
                      std::optional<bool> last;
                      for (const auto& v : ins[0]) {
                        const auto& p = std::get<DataPacket<D>>(v);
                        acks.emplace_back(p.bit);
                        if (!last || *last != p.bit) {
                          delivered.emplace_back(p.payload);
                          last = p.bit;
                        }
                      }
                      return std::vector<std::vector<V>>{std::move(acks), std::move(delivered)};
                    });

  net.add_component("ack_medium", {"ar"}, {"as"}, medium(ack_oracle));

  net.declare_input("i");
  net.declare_output("o");
  return net;
}

}  // namespace streamkit
