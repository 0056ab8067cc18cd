#ifndef CSPE_CLI_HPP
#define CSPE_CLI_HPP

// Command-line driver.  Kept in a header so tests can call cli_main with
// string streams instead of spawning a process.
//
//   cspe monitor <spec> [--events FILE|-] [--format lines|json] [--strict]
//   cspe traces  <spec> --depth K
//   cspe step    <spec> [--trace a.b.c] [--dot]
//   cspe check   <spec> --depth K [--seed N] [--count M]
//
// Exit codes: 0 success / final verdict RUNNING, 1 FAILED verdict or failed
// check, 2 usage, input or format error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cspe/conformance.hpp"
#include "cspe/dot.hpp"
#include "cspe/monitor.hpp"
#include "cspe/sos.hpp"
#include "cspe/syntax.hpp"
#include "cspe/trace_set.hpp"

namespace cspe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

struct CliError {
  std::string message;
};

inline SpecFile load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{path + ": cannot open spec file"};
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_spec(buf.str());
  } catch (const ParseError& e) {
    throw CliError{path + ":" + e.what()};
  }
}

/// Reads one event per record.  Blank lines are skipped in both formats.
class EventReader {
 public:
  EventReader(std::istream& in, bool json) : in_(in), json_(json) {}

  bool next(Event& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      if (!json_) {
        auto b = line.find_first_not_of(" \t");
        auto e = line.find_last_not_of(" \t");
        out = Event{line.substr(b, e - b + 1)};
        return true;
      }
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& err) {
        throw CliError{"events:" + std::to_string(line_no_) + ": invalid JSON: " + err.what()};
      }
      if (!rec.is_object() || !rec.contains("event") || !rec["event"].is_string()) {
        throw CliError{"events:" + std::to_string(line_no_) +
                       ": expected an object with a string \"event\" field"};
      }
      out = Event{rec["event"].get<std::string>()};
      return true;
    }
    return false;
  }

 private:
  std::istream& in_;
  bool json_;
  std::size_t line_no_ = 0;
};

inline int cmd_monitor(const std::string& spec_path, const std::string& events_path,
                       const std::string& format, bool strict, std::size_t max_residuals,
                       std::istream& in, std::ostream& out) {
  SpecFile spec = load_spec(spec_path);
  std::ifstream file;
  std::istream* src = &in;
  if (events_path != "-") {
    file.open(events_path, std::ios::binary);
    if (!file) throw CliError{events_path + ": cannot open event stream"};
    src = &file;
  }
  MonitorOptions opts;
  opts.strict = strict;
  opts.max_residuals = max_residuals;
  MonitorState state = init_monitor(spec.root, spec.alphabet(), opts);
  EventReader reader(*src, format == "json");
  Event e;
  std::size_t index = 0;
  while (reader.next(e)) {
    try {
      state = feed(std::move(state), e);
    } catch (const UnknownEventError& err) {
      throw CliError{"event " + std::to_string(index + 1) + ": " + err.what()};
    }
    out << ++index << ' ' << e.name << ' ' << to_string(state.verdict()) << '\n';
  }
  return state.verdict() == Verdict::kRunning ? kExitOk : kExitFailed;
}

inline int cmd_traces(const std::string& spec_path, std::size_t depth, std::ostream& out) {
  SpecFile spec = load_spec(spec_path);
  write_trace_set(out, semantics(spec.root, depth, spec.alphabet()));
  return kExitOk;
}

inline int cmd_step(const std::string& spec_path, const std::string& trace, bool dot,
                    std::ostream& out) {
  SpecFile spec = load_spec(spec_path);
  Alphabet alphabet = spec.alphabet();
  Trace s = parse_trace(trace);
  for (const auto& e : s) {
    if (!alphabet.contains(e)) throw CliError{"--trace: event '" + e.name + "' is not in the alphabet"};
  }
  TermSet reached = run(spec.root, s, alphabet);
  if (dot) {
    write_dot(out, explore(reached, alphabet));
    return kExitOk;
  }
  for (const auto& p : reached) {
    for (const auto& t : internal_successors(p, alphabet)) {
      out << print_term(t.source) << " --" << to_string(t.action) << "--> "
          << print_term(t.target) << '\n';
    }
  }
  return kExitOk;
}

inline int cmd_check(const std::string& spec_path, std::size_t depth, std::uint64_t seed,
                     std::size_t count, std::size_t max_size, std::ostream& out) {
  SpecFile spec = load_spec(spec_path);
  Alphabet alphabet = spec.alphabet();
  bool ok = true;
  auto emit = [&](const std::vector<Report>& reports, const std::string& label) {
    for (const auto& r : reports) {
      ok = ok && r.passed;
      out << format_report(r, label) << '\n';
    }
  };
  emit(check_term(spec.root, depth, alphabet), "spec");
  for (std::size_t i = 0; i < count; ++i) {
    GenConfig cfg;
    cfg.alphabet = alphabet;
    cfg.max_size = max_size;
    cfg.seed = seed + i;
    emit(check_term(gen_term(cfg), depth, alphabet), std::to_string(cfg.seed));
  }
  return ok ? kExitOk : kExitFailed;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"Runtime monitor and semantics toolkit for CSP with explicit failure"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string events_path = "-";
  std::string format = "lines";
  std::string trace;
  bool strict = false;
  bool dot = false;
  std::size_t depth = 0;
  std::size_t max_residuals = MonitorOptions{}.max_residuals;
  std::uint64_t seed = 0;
  std::size_t count = 100;
  std::size_t max_size = 12;

  auto* monitor = app.add_subcommand("monitor", "Check an event stream against the spec");
  monitor->add_option("spec", spec_path, "Spec file")->required();
  monitor->add_option("--events", events_path, "Event stream file, or - for stdin");
  monitor->add_option("--format", format, "Event stream format")
      ->check(CLI::IsMember({"lines", "json"}));
  monitor->add_flag("--strict", strict, "Treat out-of-alphabet events as failures");
  monitor->add_option("--max-residuals", max_residuals, "Residual set cap");

  auto* traces = app.add_subcommand("traces", "Print the trace set up to a depth");
  traces->add_option("spec", spec_path, "Spec file")->required();
  traces->add_option("--depth", depth, "Maximum trace length")->required();

  auto* step = app.add_subcommand("step", "Print transitions of the terms reached by a trace");
  step->add_option("spec", spec_path, "Spec file")->required();
  step->add_option("--trace", trace, "Dot-separated events to replay first");
  step->add_flag("--dot", dot, "Emit the reachable transition graph as DOT");

  auto* check = app.add_subcommand("check", "Cross-check the semantics on the spec and random terms");
  check->add_option("spec", spec_path, "Spec file")->required();
  check->add_option("--depth", depth, "Trace length bound")->required();
  check->add_option("--seed", seed, "First random seed");
  check->add_option("--count", count, "Number of random terms");
  check->add_option("--max-size", max_size, "Size bound for random terms")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*monitor) return detail::cmd_monitor(spec_path, events_path, format, strict, max_residuals, in, out);
    if (*traces) return detail::cmd_traces(spec_path, depth, out);
    if (*step) return detail::cmd_step(spec_path, trace, dot, out);
    if (*check) return detail::cmd_check(spec_path, depth, seed, count, max_size, out);
  } catch (const detail::CliError& e) {
    err << "cspe: " << e.message << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "cspe: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

inline int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                    std::ostream& err) {
  std::vector<const char*> argv{"cspe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), in, out, err);
}

}  // namespace cspe

#endif  // CSPE_CLI_HPP
