#pragma once

#include <map>
#include <set>
#include <string>

#include "streamkit/spf.hpp"

namespace streamkit {

// A dataflow graph of stream components wired by named channels. Every
// channel has exactly one producer: either an external input or one
// component output. Feedback wiring is allowed. Components must be
// prefix-monotone for fixpoint_solve's result to be meaningful; the solver
// does not verify that itself (see check_monotone).
template <typename V>
class Network {
 public:
  // Whole-history evaluation: given the current finite contents of each
  // input channel, produce the full contents of each output channel.
  using RoundFn =
      std::function<std::vector<std::vector<V>>(const std::vector<std::vector<V>>&)>;

  struct Component {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    RoundFn eval;
  };

  void add_component(std::string name, std::vector<std::string> inputs,
                     std::vector<std::string> outputs, RoundFn eval) {
    components_.push_back(
        {std::move(name), std::move(inputs), std::move(outputs), std::move(eval)});
  }

  // Wraps a single-input single-output stream function as a component. The
  // function must map finite streams to finite streams.
  void add_component(std::string name, std::string input, std::string output, Spf<V, V> f) {
    add_component(std::move(name), std::vector<std::string>{std::move(input)},
                  std::vector<std::string>{std::move(output)},
                  [f](const std::vector<std::vector<V>>& ins) {
                    return std::vector<std::vector<V>>{
                        f(Stream<V>::of(ins[0])).force_vector()};
                  });
  }

  void declare_input(std::string channel) { external_inputs_.push_back(std::move(channel)); }
  void declare_output(std::string channel) { external_outputs_.push_back(std::move(channel)); }

  const std::vector<Component>& components() const { return components_; }
  const std::vector<std::string>& external_inputs() const { return external_inputs_; }
  const std::vector<std::string>& external_outputs() const { return external_outputs_; }

  // Every channel mentioned anywhere in the network.
  std::set<std::string> channels() const {
    std::set<std::string> all(external_inputs_.begin(), external_inputs_.end());
    all.insert(external_outputs_.begin(), external_outputs_.end());
    for (const auto& c : components_) {
      all.insert(c.inputs.begin(), c.inputs.end());
      all.insert(c.outputs.begin(), c.outputs.end());
    }
    return all;
  }

  // All wiring defects; empty when the network is well-formed.
  std::vector<std::string> wiring_errors() const {
    std::vector<std::string> errors;
    std::map<std::string, std::size_t> producers;
    for (const auto& ch : external_inputs_) ++producers[ch];
    std::set<std::string> names;
    for (const auto& c : components_) {
      if (!names.insert(c.name).second)
        errors.push_back("duplicate component name '" + c.name + "'");
      for (const auto& ch : c.outputs) ++producers[ch];
    }
    for (const auto& [ch, n] : producers) {
      if (n > 1) errors.push_back("channel '" + ch + "' has " + std::to_string(n) + " producers");
    }
    for (const auto& c : components_) {
      for (const auto& ch : c.inputs) {
        if (producers.find(ch) == producers.end())
          errors.push_back("component '" + c.name + "' reads unconnected channel '" + ch + "'");
      }
    }
    for (const auto& ch : external_outputs_) {
      if (producers.find(ch) == producers.end())
        errors.push_back("external output channel '" + ch + "' has no producer");
    }
    return errors;
  }

 private:
  std::vector<Component> components_;
  std::vector<std::string> external_inputs_;
  std::vector<std::string> external_outputs_;
};

template <typename V>
struct FixpointResult {
  std::map<std::string, std::vector<V>> channels;
  bool converged = false;
  std::size_t rounds = 0;
  // channel contents after each completed round; round_history[k] is the
  // state after round k+1
  std::vector<std::map<std::string, std::vector<V>>> round_history;
};

// Kleene iteration over the network: all component-driven channels start
// empty, each round re-evaluates every component on the previous round's
// channel contents, and iteration stops when no channel grew (fixpoint) or
// when max_rounds is exhausted. With monotone components the per-channel
// contents are prefix-increasing across rounds.
template <typename V>
FixpointResult<V> fixpoint_solve(const Network<V>& net,
                                 const std::map<std::string, std::vector<V>>& external_inputs,
                                 std::size_t max_rounds) {
  auto errors = net.wiring_errors();
  if (!errors.empty()) {
    std::string msg = "fixpoint_solve: bad wiring:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
  for (const auto& [ch, _] : external_inputs) {
    bool declared = false;
    for (const auto& d : net.external_inputs()) declared = declared || d == ch;
    if (!declared)
      throw std::invalid_argument("fixpoint_solve: '" + ch + "' is not an external input");
  }

  std::map<std::string, std::vector<V>> cur;
  for (const auto& ch : net.channels()) cur[ch] = {};
  for (const auto& ch : net.external_inputs()) {
    auto it = external_inputs.find(ch);
    if (it == external_inputs.end())
      throw std::invalid_argument("fixpoint_solve: missing external input '" + ch + "'");
    cur[ch] = it->second;
  }

  FixpointResult<V> result;
  for (std::size_t round = 1; round <= max_rounds; ++round) {
    auto next = cur;
    for (const auto& comp : net.components()) {
      std::vector<std::vector<V>> ins;
      ins.reserve(comp.inputs.size());
      for (const auto& ch : comp.inputs) ins.push_back(cur.at(ch));
      auto outs = comp.eval(ins);
      if (outs.size() != comp.outputs.size())
        throw std::logic_error("fixpoint_solve: component '" + comp.name +
                               "' produced a wrong number of output channels");
      for (std::size_t k = 0; k < outs.size(); ++k) next[comp.outputs[k]] = std::move(outs[k]);
    }
    result.rounds = round;
    bool stable = (next == cur);
    cur = std::move(next);
    result.round_history.push_back(cur);
    if (stable) {
      result.converged = true;
      break;
    }
  }
  result.channels = cur;
  return result;
}

}  // namespace streamkit
