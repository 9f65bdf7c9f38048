#include <catch2/catch_amalgamated.hpp>

#include "streamkit/abp.hpp"
#include "streamkit/network.hpp"
#include "streamkit/spf.hpp"
#include "testutil.hpp"

using namespace streamkit;

namespace {

Stream<int> ints(std::vector<int> v) { return Stream<int>::of(std::move(v)); }

Spf<int, int> identity_lift() {
  return lift_elementwise<int, int>([](const int& x) { return ints({x}); });
}

Spf<int, int> double_emit() {
  return lift_elementwise<int, int>([](const int& x) { return ints({x, x}); });
}

// outputs <0> iff the input has even length; deliberately not monotone
Spf<int, int> length_parity_double() {
  return Spf<int, int>::user([](Stream<int> in) {
    auto n = in.force_vector().size();
    return n % 2 == 0 ? ints({0}) : Stream<int>();
  });
}

std::vector<std::pair<Stream<int>, Stream<int>>> prefix_pairs(std::mt19937_64& g, int count,
                                                              std::size_t max_len) {
  std::vector<std::pair<Stream<int>, Stream<int>>> out;
  for (int k = 0; k < count; ++k) {
    auto whole = testutil::random_ints(g, max_len);
    std::uniform_int_distribution<std::size_t> cut(0, whole.size());
    auto n = cut(g);
    out.emplace_back(ints(std::vector<int>(whole.begin(), whole.begin() + n)), ints(whole));
  }
  return out;
}

}  // namespace

TEST_CASE("lift_elementwise emits out(x) per consumed message", "[spf]") {
  CHECK(identity_lift()(ints({1, 2})).force_vector() == std::vector<int>{1, 2});
  CHECK(double_emit()(ints({1, 2})).force_vector() == std::vector<int>{1, 1, 2, 2});

  auto silent = lift_elementwise<int, int>([](const int&) { return Stream<int>(); });
  CHECK(silent(ints({1, 2, 3})).force_vector().empty());

  SECTION("lazily productive on infinite inputs") {
    auto out = double_emit()(aipower(ints({4})));
    CHECK(out.take_vector(5) == std::vector<int>{4, 4, 4, 4, 4});
  }
}

TEST_CASE("compose_serial chains lazily", "[spf]") {
  CHECK(compose_serial(double_emit(), identity_lift())(ints({1})).force_vector() ==
        std::vector<int>{1, 1});
  CHECK(compose_serial(identity_lift(), identity_lift())(ints({5, 6})).force_vector() ==
        std::vector<int>{5, 6});

  SECTION("filter stage into map stage") {
    // by hand: keep the evens of <1,2,3,4> -> <2,4>, then add one -> <3,5>
    auto keep_even = lift_elementwise<int, int>(
        [](const int& x) { return x % 2 == 0 ? ints({x}) : Stream<int>(); });
    auto add_one = lift_elementwise<int, int>([](const int& x) { return ints({x + 1}); });
    CHECK(compose_serial(keep_even, add_one)(ints({1, 2, 3, 4})).force_vector() ==
          std::vector<int>{3, 5});
  }

  SECTION("composition through an infinite intermediate stream") {
    auto drop_all = lift_elementwise<int, int>([](const int&) { return Stream<int>(); });
    auto composed = compose_serial(identity_lift(), drop_all);
    CHECK(composed(aipower(ints({1}))).take_vector(0).empty());
  }
}

TEST_CASE("check_monotone accepts lifts and catches the parity double", "[spf]") {
  auto g = testutil::make_rng(11);
  auto pairs = prefix_pairs(g, 50, 12);

  CHECK(check_monotone(identity_lift(), pairs).ok());
  CHECK(check_monotone(double_emit(), pairs).ok());

  auto bad = length_parity_double();
  auto rep = check_monotone(bad, {{Stream<int>(), ints({1})}});
  REQUIRE(!rep.ok());
  CHECK(rep.violations[0].sample_index == 0);

  CHECK(check_monotone(identity_lift(), {}).ok());  // vacuous
}

TEST_CASE("check_approximation walks the prefix chain", "[spf]") {
  CHECK(check_approximation(identity_lift(), ints({1, 2, 3})).ok);
  CHECK(check_approximation(double_emit(), ints({1})).ok);

  auto rep = check_approximation(length_parity_double(), ints({1, 2}));
  REQUIRE(!rep.ok);
  CHECK(rep.failing_link == std::size_t{0});
}

TEST_CASE("composing monotone functions stays monotone on samples", "[spf]") {
  auto g = testutil::make_rng(12);
  auto pairs = prefix_pairs(g, 50, 10);
  auto composed = compose_serial(double_emit(), identity_lift());
  CHECK(check_monotone(composed, pairs).ok());
}

TEST_CASE("fixpoint_solve reaches the least fixpoint of simple nets", "[spf]") {
  SECTION("single identity component without feedback") {
    Network<int> net;
    net.add_component("id", "in", "out", identity_lift());
    net.declare_input("in");
    net.declare_output("out");
    auto res = fixpoint_solve(net, {{"in", {1, 2}}}, 10);
    CHECK(res.converged);
    CHECK(res.rounds <= 2);
    CHECK(res.channels.at("out") == std::vector<int>{1, 2});
  }

  SECTION("a silent feedback loop converges to empty channels in one round") {
    Network<int> net;
    net.add_component("silent", "loop", "loop2",
                      lift_elementwise<int, int>([](const int&) { return Stream<int>(); }));
    net.add_component("back", "loop2", "loop", identity_lift());
    auto res = fixpoint_solve(net, {}, 10);
    CHECK(res.converged);
    CHECK(res.rounds == 1);
    CHECK(res.channels.at("loop").empty());
    CHECK(res.channels.at("loop2").empty());
  }

  SECTION("productive feedback through prepend and a truncation converges") {
    Network<int> net;
    net.add_component("seed", "fb", "c", prepend<int>({0}));
    net.add_component("cap", "c", "fb", take_prefix<int>(3));
    net.declare_output("c");
    auto res = fixpoint_solve(net, {}, 32);
    CHECK(res.converged);
    CHECK(res.channels.at("c") == std::vector<int>{0, 0, 0, 0});
  }
}

TEST_CASE("fixpoint rounds are prefix-increasing and input-monotone", "[spf]") {
  Network<int> net;
  net.add_component("dup", "in", "mid", double_emit());
  net.add_component("inc", "mid", "out",
                    lift_elementwise<int, int>([](const int& x) { return ints({x + 1}); }));
  net.declare_input("in");
  net.declare_output("out");

  auto res = fixpoint_solve(net, {{"in", {3, 4}}}, 16);
  REQUIRE(res.converged);
  CHECK(res.channels.at("out") == std::vector<int>{4, 4, 5, 5});

  auto k = EvalBudget(100);
  for (std::size_t r = 1; r < res.round_history.size(); ++r) {
    for (const auto& [ch, prev] : res.round_history[r - 1]) {
      auto verdict = prefix_le(ints(prev), ints(res.round_history[r].at(ch)), k);
      CHECK(verdict == Ternary::yes);
    }
  }

  // extending an external input never shrinks any output
  auto extended = fixpoint_solve(net, {{"in", {3, 4, 5}}}, 16);
  REQUIRE(extended.converged);
  auto verdict = prefix_le(ints(res.channels.at("out")), ints(extended.channels.at("out")), k);
  CHECK(verdict == Ternary::yes);
}

TEST_CASE("fixpoint_solve rejects bad wiring before iterating", "[spf]") {
  SECTION("unconnected input port") {
    Network<int> net;
    net.add_component("id", "nowhere", "out", identity_lift());
    CHECK_THROWS_AS(fixpoint_solve(net, {}, 4), std::invalid_argument);
  }
  SECTION("two producers for one channel") {
    Network<int> net;
    net.add_component("a", "in", "c", identity_lift());
    net.add_component("b", "in", "c", identity_lift());
    net.declare_input("in");
    CHECK_THROWS_AS(fixpoint_solve(net, {{"in", {}}}, 4), std::invalid_argument);
  }
  SECTION("undeclared external input") {
    Network<int> net;
    net.add_component("id", "in", "out", identity_lift());
    net.declare_input("in");
    CHECK_THROWS_AS(fixpoint_solve(net, {{"bogus", {1}}}, 4), std::invalid_argument);
  }
  SECTION("missing external input value") {
    Network<int> net;
    net.add_component("id", "in", "out", identity_lift());
    net.declare_input("in");
    CHECK_THROWS_AS(fixpoint_solve(net, {}, 4), std::invalid_argument);
  }
}

TEST_CASE("the protocol network delivers through perfect media", "[spf]") {
  // by hand, all-true oracles: the sender emits (d1,0); the data medium
  // passes it; the receiver delivers d1 and acks 0; the ack medium passes
  // the ack; the sender retires d1 and goes quiet. The network fixpoint is
  // exactly that exchange.
  using V = AbpValue<std::string>;
  auto net = make_abp_network<std::string>(false, OracleStream::constant(true),
                                           OracleStream::constant(true));
  auto res = fixpoint_solve(net, {{"i", {V{std::string("d1")}}}}, 64);
  REQUIRE(res.converged);
  REQUIRE(res.channels.at("o").size() == 1);
  CHECK(std::get<std::string>(res.channels.at("o")[0]) == "d1");
  CHECK(res.channels.at("ds").size() == 1);
  CHECK(res.channels.at("as").size() == 1);

  SECTION("longer input still converges to full delivery") {
    std::map<std::string, std::vector<V>> in{
        {"i", {V{std::string("a")}, V{std::string("b")}, V{std::string("c")}}}};
    auto more = fixpoint_solve(net, in, 64);
    REQUIRE(more.converged);
    REQUIRE(more.channels.at("o").size() == 3);
    CHECK(std::get<std::string>(more.channels.at("o")[2]) == "c");
  }
}
