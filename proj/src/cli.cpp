#include "scengen/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "detail/json_read.hpp"
#include "scengen/harness.hpp"
#include "scengen/interchange.hpp"
#include "scengen/parser.hpp"
#include "scengen/service.hpp"

namespace fs = std::filesystem;

namespace scengen {

namespace {

// Usage and IO problems; mapped to exit 2.
struct UsageError : Error {
  using Error::Error;
};

// Already reported to the user; carries the exit code.
struct Reported {
  int code;
};

struct Options {
  std::vector<std::string> inputs;
  std::string output;
  std::string assets;
  std::uint64_t seed = 0;
  std::size_t max_loops = 1;
  std::size_t max_paths = 100000;
  bool json = false;
  std::string host = "0.0.0.0";
  int port = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.output.empty() || opt.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(opt.output, std::ios::binary);
  if (!f || !(f << text)) throw UsageError("cannot write '" + opt.output + "'");
}

bool has_ext(const std::string& path, std::string_view ext) { return fs::path(path).extension() == ext; }

/// .scn source or .json interchange text -> ScenarioDoc; parse errors go to err.
ScenarioDoc load_doc(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  if (has_ext(path, ".json")) {
    try {
      return from_interchange(text);
    } catch (const SchemaError& e) {
      err << path << ": " << e.what() << " at " << e.path() << "\n";
      throw Reported{kExitDiagnostics};
    }
  }
  ParseResult r = parse(text);
  if (!r.ok()) {
    for (const auto& e : r.errors) err << format_error(e, path) << "\n";
    err << r.errors.size() << " parse error(s)\n";
    throw Reported{kExitDiagnostics};
  }
  return std::move(*r.doc);
}

AssetCatalog load_catalog(const Options& opt) {
  if (opt.assets.empty()) return {};
  try {
    return load_manifest(read_file(opt.assets));
  } catch (const ManifestError& e) {
    throw UsageError(opt.assets + ": " + e.what());
  }
}

GameDefinition compile_doc(const ScenarioDoc& doc, const Options& opt, std::ostream& err) {
  const AssetCatalog catalog = load_catalog(opt);
  try {
    GameDefinition def = compile(doc, catalog);
    if (!opt.assets.empty()) {
      for (const auto& w : bind_assets(doc, catalog).warnings) err << "warning: " << w << "\n";
    }
    return def;
  } catch (const RejectedScenario& e) {
    err << format_report(e.report());
    throw Reported{kExitDiagnostics};
  } catch (const InvalidScenario& e) {
    err << "invalid scenario: " << e.what() << "\n";
    throw Reported{kExitDiagnostics};
  }
}

/// A bundle (.game) or anything load_doc accepts, compiled on the fly.
std::shared_ptr<const GameDefinition> load_definition(const std::string& path, const Options& opt,
                                                      std::ostream& err) {
  if (has_ext(path, ".scn") || has_ext(path, ".json")) {
    return std::make_shared<const GameDefinition>(compile_doc(load_doc(path, err), opt, err));
  }
  const std::string text = read_file(path);
  try {
    return std::make_shared<const GameDefinition>(load_bundle(text));
  } catch (const VersionError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw UsageError(path + ": malformed bundle: " + e.what() + " at " + e.path());
  }
}

const std::string& single_input(const Options& opt) {
  if (opt.inputs.size() != 1) throw UsageError("expected exactly one input file");
  return opt.inputs.front();
}

int cmd_validate(const Options& opt, std::ostream& out, std::ostream& err) {
  const DiagnosticReport report = validate(load_doc(single_input(opt), err));
  write_output(opt, opt.json ? report_to_json(report) : format_report(report), out);
  return report.ok ? kExitOk : kExitDiagnostics;
}

int cmd_graph(const Options& opt, std::ostream& out, std::ostream& err) {
  write_output(opt, export_dot(load_doc(single_input(opt), err)), out);
  return kExitOk;
}

int cmd_compile(const Options& opt, std::ostream& out, std::ostream& err) {
  const GameDefinition def = compile_doc(load_doc(single_input(opt), err), opt, err);
  write_output(opt, emit_bundle(def), out);
  return kExitOk;
}

void print_view(const GameSession& s, const std::vector<MenuItem>& menu, std::ostream& out) {
  const GameDefinition& def = s.def();
  const CompiledState& st = def.states[s.current_state];
  out << "\n[Turn " << s.turn << "]";
  if (def.ui.show_score) out << " Score: " << s.score;
  if (def.ui.show_health) out << " Health: " << s.player_health();
  out << "\nState: " << st.name << "\n";
  if (!st.description.empty()) out << st.description << "\n";
  for (std::size_t i = 0; i < menu.size(); ++i) out << "  " << (i + 1) << ") " << menu[i].label << "\n";
}

int cmd_play(const Options& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  auto def = load_definition(single_input(opt), opt, err);
  GameSession session = start_session(def, opt.seed);
  out << "== " << def->scenario_name << " ==\n";
  while (!session.terminal()) {
    const std::vector<MenuItem> menu = available_actions(session);
    print_view(session, menu, out);
    out << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      out << "\nQUIT\n";
      return kExitQuit;
    }
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line == "q" || line == "quit") {
      out << "QUIT\n";
      return kExitQuit;
    }
    std::size_t choice = 0;
    const bool numeric = !line.empty() && line.size() < 9 &&
                         std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isdigit(c); });
    if (numeric) choice = std::stoul(line);
    StepResult step;
    if (choice >= 1 && choice <= menu.size()) {
      step = advance(session, menu[choice - 1].action, menu[choice - 1].target);
    } else {
      out << "invalid choice\n";
      // A dispatch miss still costs a round.
      step = advance(session, "", std::nullopt);
    }
    for (const auto& f : step.feedback) {
      if (f != kUnavailableAction) out << "  * " << f << "\n";
    }
  }
  out << "\nTurns: " << session.turn << "\n";
  out << (session.status == SessionStatus::Won ? "WON" : "LOST") << "\n";
  out << "Final score: " << session.score << "\n";
  return kExitOk;
}

std::string outcome_text(const GameDefinition& def, const Outcome& o) {
  std::ostringstream os;
  os << "status: " << to_string(o.status) << "\n";
  os << "final_score: " << o.final_score << "\n";
  os << "turns: " << o.turns << "\n";
  os << "terminal_state: " << def.states[o.terminal_state].name << "\n";
  os << "visited:";
  for (const auto& v : o.visited) os << " " << v;
  os << "\nrejected_steps:";
  for (auto r : o.rejected_steps) os << " " << r;
  os << "\n";
  return os.str();
}

detail::ojson outcome_json(const GameDefinition& def, const Outcome& o) {
  return {{"status", std::string(to_string(o.status))},
          {"final_score", o.final_score},
          {"turns", o.turns},
          {"terminal_state", def.states[o.terminal_state].name},
          {"visited", o.visited},
          {"rejected_steps", o.rejected_steps},
          {"steps_played", o.steps_played}};
}

// simulate <game> <script> [more scripts...]; one script also writes -o replay.
int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.inputs.size() < 2) throw UsageError("simulate needs a game and at least one script");
  auto def = load_definition(opt.inputs[0], opt, err);
  std::vector<std::vector<ScriptStep>> scripts;
  for (std::size_t i = 1; i < opt.inputs.size(); ++i) {
    try {
      scripts.push_back(parse_script(read_file(opt.inputs[i])));
    } catch (const Error& e) {
      throw UsageError(opt.inputs[i] + ": " + e.what());
    }
  }
  if (scripts.size() == 1) {
    const Outcome o = run_script(def, opt.seed, scripts.front());
    if (!opt.output.empty()) write_output(opt, events_to_replay(o.events), out);
    out << (opt.json ? outcome_json(*def, o).dump(2) + "\n" : outcome_text(*def, o));
    return kExitOk;
  }
  const CompareReport report = compare_runs(*def, scripts, opt.seed);
  if (opt.json) {
    detail::ojson runs = detail::ojson::array();
    for (const auto& o : report.outcomes) runs.push_back(outcome_json(*def, o));
    out << detail::ojson{{"outcomes", runs}, {"verdict", std::string(to_string(report.verdict))}}.dump(2)
        << "\n";
  } else {
    for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
      out << "# " << opt.inputs[i + 1] << "\n" << outcome_text(*def, report.outcomes[i]);
    }
    out << "verdict: " << to_string(report.verdict) << "\n";
  }
  return report.verdict == Verdict::Invariant ? kExitOk : kExitDiagnostics;
}

int cmd_paths(const Options& opt, std::ostream& out, std::ostream& err) {
  auto def = load_definition(single_input(opt), opt, err);
  const PathSet ps = enumerate_paths(*def, opt.max_loops, opt.max_paths, opt.seed);
  std::set<std::size_t> won_terminals;
  std::size_t won = 0;
  std::int64_t lo = 0, hi = 0;
  for (const auto& p : ps.paths) {
    if (p.status != SessionStatus::Won) continue;
    lo = won == 0 ? p.final_score : std::min(lo, p.final_score);
    hi = won == 0 ? p.final_score : std::max(hi, p.final_score);
    ++won;
    won_terminals.insert(p.terminal_state);
  }
  const bool linear = won_terminals.size() <= 1;
  if (opt.json) {
    detail::ojson paths = detail::ojson::array();
    for (const auto& p : ps.paths) {
      detail::ojson steps = detail::ojson::array();
      for (const auto& s : p.actions) steps.push_back(s.target ? s.action + " " + *s.target : s.action);
      paths.push_back({{"actions", steps},
                       {"status", std::string(to_string(p.status))},
                       {"terminal_state", def->states[p.terminal_state].name},
                       {"final_score", p.final_score}});
    }
    out << detail::ojson{{"paths", paths},
                         {"count", ps.paths.size()},
                         {"truncated", ps.truncated},
                         {"pruned", ps.pruned},
                         {"linear", linear}}
               .dump(2)
        << "\n";
  } else {
    out << "paths: " << ps.paths.size() << (ps.truncated ? " (truncated)" : "") << "\n";
    out << "won: " << won << "\n";
    out << "lost: " << ps.paths.size() - won << "\n";
    out << "pruned branches: " << ps.pruned << "\n";
    if (won > 0) out << "score range: " << lo << ".." << hi << "\n";
    out << "won terminal states:";
    for (auto t : won_terminals) out << " " << def->states[t].name;
    out << "\nlinear: " << (linear ? "yes" : "no") << "\n";
  }
  return linear ? kExitOk : kExitDiagnostics;
}

int cmd_metrics(const Options& opt, std::ostream& out, std::ostream& err) {
  const std::string& path = single_input(opt);
  const std::string text = read_file(path);
  PipelineMetrics m;
  try {
    m = measure_pipeline(text, load_catalog(opt));
  } catch (const PipelineError& e) {
    for (const auto& pe : e.errors()) err << format_error(pe, path) << "\n";
    return kExitDiagnostics;
  } catch (const RejectedScenario& e) {
    err << format_report(e.report());
    return kExitDiagnostics;
  }
  if (opt.json) {
    write_output(opt, metrics_to_json(m), out);
  } else {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "parse_ms: " << m.parse_ms << "\nvalidate_ms: " << m.validate_ms << "\ncompile_ms: " << m.compile_ms
       << "\ntotal_ms: " << m.total_ms() << "\nstates: " << m.states << "\ntransitions: " << m.transitions
       << "\nentities: " << m.entities << "\nbundle_bytes: " << m.bundle_bytes << "\n";
    write_output(opt, os.str(), out);
  }
  return kExitOk;
}

int cmd_serve(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.inputs.empty()) throw UsageError("serve needs at least one game or scenario file");
  GameService::DefinitionMap defs;
  for (const auto& path : opt.inputs) {
    const std::string id = fs::path(path).stem().string();
    if (defs.count(id)) throw UsageError("duplicate definition id '" + id + "'");
    defs.emplace(id, load_definition(path, opt, err));
  }
  GameService service(std::move(defs));
  const int port = opt.port > 0 ? opt.port : service_port_from_env();
  out << "serving " << opt.inputs.size() << " definition(s) on " << opt.host << ":" << port << std::endl;
  if (!serve_forever(service, opt.host, port)) {
    err << "cannot listen on " << opt.host << ":" << port << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scenario-based training game generator", "scengen"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, const std::string& inputs_help) {
    sub->add_option("inputs", opt.inputs, inputs_help)->required();
    sub->add_option("-o,--output", opt.output, "Output file (default stdout)");
    return sub;
  };
  auto* validate_cmd = add_common(app.add_subcommand("validate", "Run the analyzer"), ".scn or interchange .json");
  validate_cmd->add_flag("--json", opt.json, "Machine-readable report");
  add_common(app.add_subcommand("graph", "Export the state graph as DOT"), ".scn or interchange .json");
  auto* compile_cmd = add_common(app.add_subcommand("compile", "Compile to a .game bundle"), ".scn or .json");
  compile_cmd->add_option("--assets", opt.assets, "Asset manifest (tsv)");
  auto* play_cmd = add_common(app.add_subcommand("play", "Play in the terminal"), ".game or .scn");
  play_cmd->add_option("--seed", opt.seed, "Session seed");
  play_cmd->add_option("--assets", opt.assets, "Asset manifest (tsv)");
  auto* sim_cmd = add_common(app.add_subcommand("simulate", "Replay scripts"), "game then script files");
  sim_cmd->add_option("--seed", opt.seed, "Session seed");
  sim_cmd->add_flag("--json", opt.json, "Machine-readable outcome");
  auto* paths_cmd = add_common(app.add_subcommand("paths", "Enumerate play paths"), ".game or .scn");
  paths_cmd->add_option("--max-loops", opt.max_loops, "Extra visits allowed per state")->capture_default_str();
  paths_cmd->add_option("--max-paths", opt.max_paths, "Path bound")->capture_default_str();
  paths_cmd->add_option("--seed", opt.seed, "Session seed");
  paths_cmd->add_flag("--json", opt.json, "Machine-readable listing");
  auto* metrics_cmd = add_common(app.add_subcommand("metrics", "Time the pipeline"), ".scn");
  metrics_cmd->add_option("--assets", opt.assets, "Asset manifest (tsv)");
  metrics_cmd->add_flag("--json", opt.json, "Machine-readable metrics");
  auto* serve_cmd = add_common(app.add_subcommand("serve", "Serve the session API"), ".game or .scn files");
  serve_cmd->add_option("--port", opt.port, "Port (default SCENGEN_PORT or 8080)");
  serve_cmd->add_option("--host", opt.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--assets", opt.assets, "Asset manifest (tsv)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "validate") return cmd_validate(opt, out, err);
    if (name == "graph") return cmd_graph(opt, out, err);
    if (name == "compile") return cmd_compile(opt, out, err);
    if (name == "play") return cmd_play(opt, in, out, err);
    if (name == "simulate") return cmd_simulate(opt, out, err);
    if (name == "paths") return cmd_paths(opt, out, err);
    if (name == "metrics") return cmd_metrics(opt, out, err);
    if (name == "serve") return cmd_serve(opt, out, err);
  } catch (const Reported& r) {
    return r.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDiagnostics;
  }
  return kExitUsage;
}

}  // namespace scengen
