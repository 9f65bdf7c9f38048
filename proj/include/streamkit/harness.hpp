#pragma once

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "streamkit/abp.hpp"
#include "streamkit/automata.hpp"
#include "streamkit/timed.hpp"

namespace streamkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

inline constexpr int kTraceFormatVersion = 1;

struct RunConfig {
  std::vector<std::string> payloads;
  std::uint64_t seed_data = 1;
  std::uint64_t seed_ack = 2;
  double theta_data = 1.0;
  double theta_ack = 1.0;
  bool initial_bit = false;
  std::size_t max_rounds = 1000;
  std::string output_path;
};

// empty string when the config is valid
inline std::string config_error(const RunConfig& c) {
  if (!(c.theta_data > 0.0 && c.theta_data <= 1.0)) return "theta_data must be in (0, 1]";
  if (!(c.theta_ack > 0.0 && c.theta_ack <= 1.0)) return "theta_ack must be in (0, 1]";
  if (c.max_rounds == 0) return "max_rounds must be >= 1";
  return "";
}

// ---------------------------------------------------------------------------
// Trace file format: one JSON record per line. First line is the header
// carrying the config and format version, then one record per simulation
// round with that round's per-channel emissions, and a final footer with the
// completion status and summary counts. Replaying a header's config
// reproduces the file byte for byte.
// ---------------------------------------------------------------------------

struct TraceParseError : std::runtime_error {
  int line;
  TraceParseError(int line_no, const std::string& msg)
      : std::runtime_error(msg), line(line_no) {}
};

namespace detail {

using json = nlohmann::json;

inline json packet_to_json(const DataPacket<std::string>& p) {
  return json{{"b", p.bit}, {"p", p.payload}};
}

inline DataPacket<std::string> packet_from_json(const json& j) {
  return {j.at("p").get<std::string>(), j.at("b").get<bool>()};
}

}  // namespace detail

inline std::string write_trace_text(const AbpTrace<std::string>& t, const RunConfig& c) {
  using detail::json;
  std::ostringstream out;

  json header{{"record", "header"},
              {"version", kTraceFormatVersion},
              {"payloads", c.payloads},
              {"seed_data", c.seed_data},
              {"seed_ack", c.seed_ack},
              {"theta_data", c.theta_data},
              {"theta_ack", c.theta_ack},
              {"initial_bit", c.initial_bit},
              {"max_rounds", c.max_rounds}};
  out << header.dump() << "\n";

  for (std::size_t k = 0; k < t.round_log.size(); ++k) {
    const auto& r = t.round_log[k];
    json rec{{"record", "round"}, {"n", k + 1}};
    rec["sent"] = r.sent ? detail::packet_to_json(*r.sent) : json(nullptr);
    rec["recv"] = r.received ? detail::packet_to_json(*r.received) : json(nullptr);
    rec["ack"] = r.ack_sent ? json(*r.ack_sent) : json(nullptr);
    rec["ack_thru"] = r.ack_through ? json(*r.ack_through) : json(nullptr);
    rec["deliver"] = r.delivered ? json(*r.delivered) : json(nullptr);
    out << rec.dump() << "\n";
  }

  json footer{{"record", "footer"},
              {"completed", t.completed},
              {"rounds", t.rounds},
              {"delivered", t.o.size()},
              {"drops_data", t.ds.size() - t.dr.size()},
              {"drops_ack", t.ar.size() - t.as_.size()}};
  out << footer.dump() << "\n";
  return out.str();
}

struct ParsedTrace {
  AbpTrace<std::string> trace;
  RunConfig config;
};

// Rebuilds the trace from a recorded file. Throws TraceParseError with the
// offending line number on structural problems; semantic violations are the
// checkers' business, not the parser's.
inline ParsedTrace read_trace(std::istream& in) {
  using detail::json;
  ParsedTrace result;
  auto& t = result.trace;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool have_footer = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& ex) {
      throw TraceParseError(line_no, std::string("bad JSON: ") + ex.what());
    }
    try {
      const auto kind = rec.at("record").get<std::string>();
      if (kind == "header") {
        if (have_header) throw TraceParseError(line_no, "duplicate header");
        if (rec.at("version").get<int>() != kTraceFormatVersion)
          throw TraceParseError(line_no, "unsupported format version");
        auto& c = result.config;
        c.payloads = rec.at("payloads").get<std::vector<std::string>>();
        c.seed_data = rec.at("seed_data").get<std::uint64_t>();
        c.seed_ack = rec.at("seed_ack").get<std::uint64_t>();
        c.theta_data = rec.at("theta_data").get<double>();
        c.theta_ack = rec.at("theta_ack").get<double>();
        c.initial_bit = rec.at("initial_bit").get<bool>();
        c.max_rounds = rec.at("max_rounds").get<std::size_t>();
        t.i = c.payloads;
        t.data_oracle = OracleStream::seeded(c.seed_data, c.theta_data).desc();
        t.ack_oracle = OracleStream::seeded(c.seed_ack, c.theta_ack).desc();
        have_header = true;
      } else if (kind == "round") {
        if (!have_header) throw TraceParseError(line_no, "round record before header");
        if (have_footer) throw TraceParseError(line_no, "round record after footer");
        typename AbpTrace<std::string>::Round r;
        if (!rec.at("sent").is_null()) {
          r.sent = detail::packet_from_json(rec.at("sent"));
          t.ds.push_back(*r.sent);
        }
        if (!rec.at("recv").is_null()) {
          r.received = detail::packet_from_json(rec.at("recv"));
          t.dr.push_back(*r.received);
        }
        if (!rec.at("ack").is_null()) {
          r.ack_sent = rec.at("ack").get<bool>();
          t.ar.push_back(*r.ack_sent);
        }
        if (!rec.at("ack_thru").is_null()) {
          r.ack_through = rec.at("ack_thru").get<bool>();
          t.as_.push_back(*r.ack_through);
        }
        if (!rec.at("deliver").is_null()) {
          r.delivered = rec.at("deliver").get<std::string>();
          t.o.push_back(*r.delivered);
        }
        t.round_log.push_back(std::move(r));
      } else if (kind == "footer") {
        if (!have_header) throw TraceParseError(line_no, "footer before header");
        if (have_footer) throw TraceParseError(line_no, "duplicate footer");
        t.completed = rec.at("completed").get<bool>();
        t.rounds = rec.at("rounds").get<std::size_t>();
        have_footer = true;
      } else {
        throw TraceParseError(line_no, "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& ex) {
      throw TraceParseError(line_no, std::string("bad record: ") + ex.what());
    }
  }
  if (!have_header) throw TraceParseError(line_no, "missing header record");
  if (!have_footer) throw TraceParseError(line_no, "missing footer record (truncated file?)");
  return result;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline AbpTrace<std::string> simulate_from_config(const RunConfig& c) {
  return simulate_abp<std::string>(c.payloads, c.initial_bit,
                                   OracleStream::seeded(c.seed_data, c.theta_data),
                                   OracleStream::seeded(c.seed_ack, c.theta_ack), c.max_rounds);
}

// Runs one simulation, writes the trace file, prints a one-line summary.
inline int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto e = config_error(c);
  if (!e.empty()) {
    err << "invalid config: " << e << "\n";
    return kExitUsage;
  }
  auto t = simulate_from_config(c);
  std::ofstream f(c.output_path, std::ios::binary);
  if (!f) {
    err << "cannot open '" << c.output_path << "' for writing\n";
    return kExitIo;
  }
  f << write_trace_text(t, c);
  f.close();
  if (!f) {
    err << "write failure on '" << c.output_path << "'\n";
    return kExitIo;
  }
  out << "delivered " << t.o.size() << "/" << t.i.size() << " rounds " << t.rounds
      << " drops_data " << (t.ds.size() - t.dr.size()) << " drops_ack "
      << (t.ar.size() - t.as_.size()) << " completed " << (t.completed ? "yes" : "no") << "\n";
  return kExitOk;
}

// All nine verdicts over a reconstructed trace: five sender conjuncts, two
// receiver checks, both media as one soundness verdict, and overall safety.
inline std::vector<CheckVerdict> check_trace(const AbpTrace<std::string>& t) {
  std::vector<CheckVerdict> verdicts;
  auto s = sender_spec_check(t);
  for (auto& v : s.conjuncts) verdicts.push_back(v);
  auto r = receiver_spec_check(t);
  for (auto& v : r.verdicts) verdicts.push_back(v);

  auto md = medium_relation_check(Stream<DataPacket<std::string>>::of(t.ds),
                                  Stream<DataPacket<std::string>>::of(t.dr));
  auto ma = medium_relation_check(Stream<bool>::of(t.ar), Stream<bool>::of(t.as_));
  CheckVerdict medium{"medium", md.holds && ma.holds, ""};
  if (!md.holds) medium.detail = "data medium relation violated";
  if (!ma.holds)
    medium.detail += std::string(medium.detail.empty() ? "" : "; ") + "ack medium relation violated";
  verdicts.push_back(std::move(medium));

  verdicts.push_back(overall_check(t));
  return verdicts;
}

inline int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    err << "cannot open '" << path << "'\n";
    return kExitIo;
  }
  ParsedTrace pt;
  try {
    pt = read_trace(f);
  } catch (const TraceParseError& ex) {
    err << path << ":" << ex.line << ": parse error: " << ex.what() << "\n";
    return kExitUsage;
  }

  auto verdicts = check_trace(pt.trace);
  std::size_t passed = 0;
  for (const auto& v : verdicts) {
    out << "verdict " << v.name << " " << (v.pass ? "pass" : "fail");
    if (!v.pass && !v.detail.empty()) out << " # " << v.detail;
    out << "\n";
    if (v.pass) ++passed;
  }
  out << "summary " << (passed == verdicts.size() ? "pass" : "fail") << " " << passed << "/"
      << verdicts.size() << "\n";
  return passed == verdicts.size() ? kExitOk : kExitViolation;
}

// Prints the first count bits of the seeded oracle as a T/F string.
inline int cmd_gen_oracle(std::uint64_t seed, double theta, std::size_t count, std::ostream& out,
                          std::ostream& err) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    err << "theta must be in (0, 1]\n";
    return kExitUsage;
  }
  if (count == 0) {
    err << "count must be >= 1\n";
    return kExitUsage;
  }
  auto p = OracleStream::seeded(seed, theta);
  std::string bits;
  bits.reserve(count);
  for (std::size_t k = 0; k < count; ++k) bits += p.at(k) ? 'T' : 'F';
  out << bits << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Serialization helpers for the other value families the trace format can
// carry: timed messages with an explicit discriminator, automata as plain
// record tables, and the protocol network derived from a config.
// ---------------------------------------------------------------------------

template <typename M>
nlohmann::json timed_msg_to_json(const TimedMsg<M>& m) {
  if (m.is_tick()) return nlohmann::json{{"tick", true}};
  return nlohmann::json{{"msg", m.message()}};
}

template <typename M>
TimedMsg<M> timed_msg_from_json(const nlohmann::json& j) {
  if (j.contains("tick")) return TimedMsg<M>::tick();
  return TimedMsg<M>::msg(j.at("msg").get<M>());
}

// Automaton as a JSON table; sstr/istr/ostr map states, inputs and outputs
// to strings.
template <typename S, typename I, typename O, typename FS, typename FI, typename FO>
nlohmann::json ioa_to_json(const Ioa<S, I, O>& a, FS sstr, FI istr, FO ostr) {
  using nlohmann::json;
  json j;
  j["states"] = json::array();
  for (const auto& s : a.states) j["states"].push_back(sstr(s));
  j["in_alphabet"] = json::array();
  for (const auto& x : a.in_alphabet) j["in_alphabet"].push_back(istr(x));
  j["out_alphabet"] = json::array();
  for (const auto& o : a.out_alphabet) j["out_alphabet"].push_back(ostr(o));
  j["delta"] = json::array();
  for (const auto& t : a.delta) {
    json outs = json::array();
    for (const auto& o : t.output) outs.push_back(ostr(o));
    j["delta"].push_back(json{{"src", sstr(t.src)},
                              {"input", istr(t.input)},
                              {"dst", sstr(t.dst)},
                              {"output", outs}});
  }
  j["inits"] = json::array();
  for (const auto& in : a.inits) {
    json outs = json::array();
    for (const auto& o : in.output) outs.push_back(ostr(o));
    j["inits"].push_back(json{{"state", sstr(in.state)}, {"output", outs}});
  }
  return j;
}

inline Ioa<std::string, std::string, std::string> ioa_from_json(const nlohmann::json& j) {
  Ioa<std::string, std::string, std::string> a;
  a.states = j.at("states").get<std::vector<std::string>>();
  a.in_alphabet = j.at("in_alphabet").get<std::vector<std::string>>();
  a.out_alphabet = j.at("out_alphabet").get<std::vector<std::string>>();
  for (const auto& t : j.at("delta")) {
    a.delta.push_back({t.at("src").get<std::string>(), t.at("input").get<std::string>(),
                       t.at("dst").get<std::string>(),
                       t.at("output").get<std::vector<std::string>>()});
  }
  for (const auto& in : j.at("inits")) {
    a.inits.push_back(
        {in.at("state").get<std::string>(), in.at("output").get<std::vector<std::string>>()});
  }
  return a;
}

// The protocol network described by a run config: fixed component and wire
// names, oracles from the config's seeds and densities.
inline Network<AbpValue<std::string>> make_abp_network_from_config(const RunConfig& c) {
  return make_abp_network<std::string>(c.initial_bit,
                                       OracleStream::seeded(c.seed_data, c.theta_data),
                                       OracleStream::seeded(c.seed_ack, c.theta_ack));
}

}  // namespace streamkit
