#include <exception>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include <behavsteg/simulator.hpp>

#include "commands.hpp"

namespace cli = behavsteg::cli;

int main(int argc, char** argv) {
  CLI::App app{"Posting-time covert channel codec, behavior auditor and "
               "steganalysis simulator"};
  app.require_subcommand(1);
  std::function<int()> action;

  cli::EncodeOptions enc;
  enc.start = behavsteg::kDefaultSimulationStart;
  auto* encode = app.add_subcommand("encode", "Encode bits into a posting schedule");
  auto* bits = encode->add_option("--bits", enc.bits, "Payload as a 0/1 string");
  auto* bits_file =
      encode->add_option("--bits-file", enc.bits_file, "File holding a 0/1 string")
          ->check(CLI::ExistingFile);
  auto* message = encode->add_option("--message", enc.message_file,
                                     "Raw message file, encoded MSB first")
                      ->check(CLI::ExistingFile);
  bits->excludes(bits_file, message);
  bits_file->excludes(message);
  encode->add_option("--codebook", enc.codebook,
                     "Codebook file (slot<TAB>bits); default: built-in table")
      ->check(CLI::ExistingFile);
  encode->add_option("--start", enc.start,
                     "Schedule start, epoch seconds (UTC)")
      ->capture_default_str();
  encode->add_option("--seed", enc.seed, "Seed for in-hour offsets")->required();
  encode->add_option("--out", enc.out, "Schedule output path (default stdout)");
  encode->callback([&] {
    if (!enc.bits && bits_file->count() == 0 && message->count() == 0) {
      throw CLI::RequiredError("one of --bits, --bits-file, --message");
    }
    action = [&] { return cli::run_encode(enc); };
  });

  cli::DecodeOptions dec;
  auto* decode = app.add_subcommand("decode", "Recover bits from a schedule or a log");
  auto* schedule = decode->add_option("--schedule", dec.schedule, "Schedule file")
                       ->check(CLI::ExistingFile);
  auto* dec_log = decode->add_option("--log", dec.log, "Activity log (jsonl or csv)")
                      ->check(CLI::ExistingFile);
  auto* dec_user = decode->add_option("--user", dec.user, "Sender id in --log");
  schedule->excludes(dec_log);
  dec_log->needs(dec_user);
  decode->add_option("--codebook", dec.codebook,
                     "Codebook file; default: built-in table")
      ->check(CLI::ExistingFile);
  decode->add_option("--count", dec.count,
                     "Payload bit count (overrides the schedule header)");
  decode->callback([&] {
    if (schedule->count() == 0 && dec_log->count() == 0) {
      throw CLI::RequiredError("one of --schedule, --log");
    }
    action = [&] { return cli::run_decode(dec); };
  });

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a labeled population log");
  simulate->add_option("--config", sim.config, "Key-value config file")
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Master seed (required here or in config)");
  simulate->add_option("--normal", sim.normal_users, "Normal users");
  simulate->add_option("--stego-timing", sim.stego_timing_users,
                       "Timing-channel stego users");
  simulate->add_option("--stego-content", sim.stego_content_users,
                       "Random-content stego users");
  simulate->add_option("--payload-bits", sim.payload_bits,
                       "Random payload bits per timing user");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
  simulate->add_option("--out", sim.out, "Activity log output (.jsonl or .csv)")
      ->required();
  simulate->add_option("--labels", sim.labels, "Labels JSON output")->required();
  simulate->add_option("--payloads", sim.payloads,
                       "Optional JSON output of embedded payloads");
  simulate->callback([&] { action = [&] { return cli::run_simulate(sim); }; });

  cli::AuditOptions aud;
  auto* audit = app.add_subcommand(
      "audit", "Audit one user; exit 0 pass, 2 fail, 3 indeterminate");
  audit->add_option("--log", aud.log, "Activity log")->required()->check(CLI::ExistingFile);
  audit->add_option("--user", aud.user, "User to audit")->required();
  audit->add_option("--labels", aud.labels,
                    "Labels JSON; restricts the baseline to normal users")
      ->check(CLI::ExistingFile);
  audit->add_option("--config", aud.config, "Key-value config file")
      ->check(CLI::ExistingFile);
  audit->add_option("--percentile", aud.percentile,
                    "Calibration percentile in (50, 100], default 95");
  audit->add_option("--out", aud.out, "Report output path (default stdout)");
  audit->callback([&] { action = [&] { return cli::run_audit(aud); }; });

  cli::StatsOptions st;
  auto* stats = app.add_subcommand("stats", "Summary statistics of a log");
  stats->add_option("--log", st.log, "Activity log")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", st.out, "Output path (default stdout)");
  stats->callback([&] { action = [&] { return cli::run_stats(st); }; });

  cli::PeOptions pe;
  auto* pe_cmd = app.add_subcommand("pe", "Permutation entropy of a numeric column");
  pe_cmd->add_option("--input", pe.input, "Text file, one row per line")
      ->required()
      ->check(CLI::ExistingFile);
  pe_cmd->add_option("--column", pe.column, "1-based column index")
      ->capture_default_str();
  pe_cmd->add_option("-m,--order", pe.order, "Embedding order")
      ->capture_default_str();
  pe_cmd->add_option("--delay", pe.delay, "Embedding delay")
      ->capture_default_str();
  pe_cmd->callback([&] { action = [&] { return cli::run_pe(pe); }; });

  cli::EveOptions ev;
  auto* eve = app.add_subcommand("eve", "Score a labeled population; ROC and AUC");
  eve->add_option("--log", ev.log, "Activity log")->required()->check(CLI::ExistingFile);
  eve->add_option("--labels", ev.labels, "Labels JSON")
      ->required()
      ->check(CLI::ExistingFile);
  eve->add_option("--config", ev.config, "Key-value config file")
      ->check(CLI::ExistingFile);
  eve->add_option("--constraint", ev.constraint,
                  "Constraint name or number 1-6")
      ->capture_default_str();
  eve->add_option("--out", ev.out, "Report output path (default stdout)");
  eve->callback([&] { action = [&] { return cli::run_eve(ev); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "behavsteg: error: " << e.what() << '\n';
    return 1;
  }
}
