#include <iostream>

#include <CLI11.hpp>

#include "streamkit/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"streamkit: alternating-bit protocol simulation and trace checking"};
  app.require_subcommand(1);

  streamkit::RunConfig cfg;
  auto* sim = app.add_subcommand("simulate", "run one simulation and write a trace file");
  sim->add_option("--input", cfg.payloads, "input payloads, in order");
  sim->add_option("--seed-data", cfg.seed_data, "seed of the data medium oracle");
  sim->add_option("--seed-ack", cfg.seed_ack, "seed of the ack medium oracle");
  sim->add_option("--theta-data", cfg.theta_data, "data medium density in (0, 1]");
  sim->add_option("--theta-ack", cfg.theta_ack, "ack medium density in (0, 1]");
  sim->add_option("--initial-bit", cfg.initial_bit, "sender's first bit (0 or 1)");
  sim->add_option("--max-rounds", cfg.max_rounds, "round budget");
  sim->add_option("--out", cfg.output_path, "trace file to write")->required();

  std::string trace_path;
  auto* chk = app.add_subcommand("check", "check a recorded trace against the protocol laws");
  chk->add_option("trace", trace_path, "trace file to check")->required();

  std::uint64_t seed = 0;
  double theta = 1.0;
  std::size_t count = 10;
  auto* gen = app.add_subcommand("gen-oracle", "print a reproducible oracle prefix");
  gen->add_option("--seed", seed, "oracle seed");
  gen->add_option("--theta", theta, "density in (0, 1]");
  gen->add_option("--count", count, "number of bits to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? streamkit::kExitOk : streamkit::kExitUsage;
  }

  if (sim->parsed()) return streamkit::cmd_simulate(cfg, std::cout, std::cerr);
  if (chk->parsed()) return streamkit::cmd_check(trace_path, std::cout, std::cerr);
  return streamkit::cmd_gen_oracle(seed, theta, count, std::cout, std::cerr);
}
