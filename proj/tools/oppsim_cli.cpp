#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oppsim/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTrace = 3;

int cmd_run(const std::string& spec_path, const std::string& out_dir, int jobs,
            std::int64_t seed_base) {
  try {
    oppsim::ExperimentSpec spec = oppsim::load_spec(spec_path);
    std::optional<std::uint64_t> base;
    if (seed_base >= 0) base = static_cast<std::uint64_t>(seed_base);
    auto output = oppsim::run_experiment(spec, out_dir, jobs, base, &std::cout);
    std::cout << "wrote " << output.csv_path.string() << " and "
              << output.metadata_path.string() << "\n";
    return 0;
  } catch (const oppsim::ParseError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTrace;
  } catch (const oppsim::TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTrace;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_validate(const std::string& spec_path) {
  std::vector<oppsim::Diagnostic> diagnostics;
  try {
    oppsim::ExperimentSpec spec = oppsim::load_spec(spec_path);
    diagnostics = oppsim::validate_spec(spec);
  } catch (const std::exception& e) {
    diagnostics.push_back({oppsim::Diagnostic::Severity::Error, e.what()});
  }
  int errors = 0;
  for (const auto& d : diagnostics) {
    bool is_error = d.severity == oppsim::Diagnostic::Severity::Error;
    errors += is_error;
    std::cout << (is_error ? "error: " : "warning: ") << d.message << "\n";
  }
  if (diagnostics.empty()) std::cout << "ok\n";
  return errors ? kExitConfig : 0;
}

int cmd_gen_trace(const std::string& spec_path, const std::string& out_path) {
  try {
    oppsim::ExperimentSpec spec = oppsim::load_spec(spec_path);
    if (!spec.synthetic) {
      std::cerr << "config error: spec has no synthetic trace section\n";
      return kExitConfig;
    }
    auto trace = oppsim::generate_synthetic(*spec.synthetic);
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "config error: cannot write " << out_path << "\n";
      return kExitConfig;
    }
    oppsim::serialize_trace(out, trace);
    std::cout << "wrote " << trace.size() << " contacts to " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_trace_stats(const std::string& trace_path) {
  try {
    auto trace = oppsim::load_trace_file(trace_path);
    auto stats = oppsim::trace_stats(trace);
    std::cout << "contacts: " << stats.contacts << "\n"
              << "span_hours: " << stats.span_hours << "\n"
              << "contacts_per_hour: " << stats.contacts_per_hour << "\n";
    std::cout << "duration_histogram_s:";
    for (std::size_t i = 0; i < stats.histogram_counts.size(); ++i) {
      if (i < stats.histogram_edges_s.size())
        std::cout << " <=" << stats.histogram_edges_s[i] << ":" << stats.histogram_counts[i];
      else
        std::cout << " >" << stats.histogram_edges_s.back() << ":" << stats.histogram_counts[i];
    }
    std::cout << "\npairs: " << stats.per_pair_total_s.size() << "\n";
    for (const auto& [pair, total] : stats.per_pair_total_s)
      std::cout << "pair " << pair.first << " " << pair.second << " total_s " << total << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitTrace;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opportunistic-network routing simulation lab"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, trace_path;
  int jobs = 0;  // 0 = hardware concurrency
  std::int64_t seed_base = -1;

  auto* run = app.add_subcommand("run", "run an experiment sweep and write CSV results");
  run->add_option("--spec", spec_path, "experiment spec (JSON)")
      ->required()
      ->envname("OPPSIM_SPEC");
  run->add_option("--out", out_dir, "output directory")->required()->envname("OPPSIM_OUT");
  run->add_option("--jobs", jobs, "parallel runs (default: available cores)")
      ->envname("OPPSIM_JOBS");
  run->add_option("--seed-base", seed_base, "override the spec's first seed")
      ->envname("OPPSIM_SEED_BASE");

  auto* validate = app.add_subcommand("validate", "check a spec without running it");
  validate->add_option("--spec", spec_path, "experiment spec (JSON)")
      ->required()
      ->envname("OPPSIM_SPEC");

  auto* gen = app.add_subcommand("gen-trace", "generate a synthetic contact trace");
  gen->add_option("--spec", spec_path, "spec with a trace.synthetic section")
      ->required()
      ->envname("OPPSIM_SPEC");
  gen->add_option("--out", trace_path, "trace file to write")
      ->required()
      ->envname("OPPSIM_OUT");

  auto* stats = app.add_subcommand("trace-stats", "print contact statistics for a trace file");
  stats->add_option("trace", trace_path, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(spec_path, out_dir, jobs, seed_base);
  if (validate->parsed()) return cmd_validate(spec_path);
  if (gen->parsed()) return cmd_gen_trace(spec_path, trace_path);
  if (stats->parsed()) return cmd_trace_stats(trace_path);
  return 0;
}
