// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0
//
// morphkit: parse .sasm assembly, generate behavior-preserving variants,
// package and sign them, and measure simulated detector evasion.
//
// Exit codes: 0 success, 1 input/parse errors, 2 equivalence or runtime
// failure, 3 I/O failure, 4 negative verdict (verify/scan).

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "morphkit/analysis.hpp"
#include "morphkit/detector.hpp"
#include "morphkit/ir.hpp"
#include "morphkit/morph.hpp"
#include "morphkit/package.hpp"
#include "morphkit/sasm.hpp"
#include "morphkit/vm.hpp"

namespace fs = std::filesystem;
using namespace morphkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitEquivalence = 2;
constexpr int kExitIo = 3;
constexpr int kExitNegative = 4;

struct CliError {
  int code;
  std::string message;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot read " + path.string()};
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Sample loading
// ---------------------------------------------------------------------------

std::vector<sasm::SourceUnit> collect_units(const std::vector<fs::path>& dirs) {
  std::vector<sasm::SourceUnit> units;
  for (const fs::path& dir : dirs) {
    if (!fs::exists(dir))
      throw CliError{kExitIo, "no such path: " + dir.string()};
    if (fs::is_regular_file(dir)) {
      units.push_back({dir.string(), read_file(dir)});
      continue;
    }
    std::vector<fs::path> files;
    for (const auto& item : fs::recursive_directory_iterator(dir))
      if (item.is_regular_file() && item.path().extension() == ".sasm")
        files.push_back(item.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) units.push_back({f.string(), read_file(f)});
  }
  return units;
}

std::optional<ir::MethodRef> find_entry(const std::vector<fs::path>& dirs,
                                        const std::string& entry_flag) {
  if (!entry_flag.empty()) return sasm::parse_method_ref_text(entry_flag);
  for (const fs::path& dir : dirs) {
    if (!fs::is_directory(dir)) continue;
    for (const char* name : {"ENTRY", "META/PROGRAM"}) {
      fs::path p = dir / name;
      if (fs::is_regular_file(p))
        return sasm::parse_method_ref_text(read_file(p));
    }
  }
  return std::nullopt;
}

ir::Program load_program(const std::vector<fs::path>& dirs,
                         const std::string& entry_flag) {
  std::optional<ir::MethodRef> entry = find_entry(dirs, entry_flag);
  if (!entry)
    throw CliError{kExitParse,
                   "no entry point: supply --entry or an ENTRY file"};
  std::vector<sasm::SourceUnit> units = collect_units(dirs);
  if (units.empty()) throw CliError{kExitParse, "no .sasm units found"};
  sasm::ParseResult parsed = sasm::parse_program(units, *entry);
  if (!parsed.ok()) {
    for (const sasm::ParseError& e : parsed.errors)
      std::cerr << sasm::to_string(e) << "\n";
    throw CliError{kExitParse,
                   std::to_string(parsed.errors.size()) + " parse error(s)"};
  }
  return std::move(*parsed.program);
}

// ---------------------------------------------------------------------------
// Shared options
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string levels = "all";
  std::uint32_t variants = 1;
  double junk_density = 0.3;
  double opaque_rate = 0.5;
  double proxy_rate = 0.5;
  bool no_reorder = false;
  std::string key_file;
  std::string profiles_file;
  std::uint32_t vectors = 20;
  std::uint64_t budget = vm::kDefaultBudget;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string out_dir;
  std::string config_file;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts, bool with_morph_knobs) {
  cmd->add_option("--seed", opts.seed, "PRNG seed (MORPHKIT_SEED as fallback)");
  cmd->add_option("--config", opts.config_file,
                  "JSON config file (same field names as flags)");
  if (with_morph_knobs) {
    cmd->add_option("--levels", opts.levels,
                    "comma list of class,method,body,callgraph,all");
    cmd->add_option("--variants", opts.variants, "variants per input");
    cmd->add_option("--junk-density", opts.junk_density,
                    "junk insertion probability per gap [0,1]");
    cmd->add_option("--opaque-rate", opts.opaque_rate,
                    "opaque predicate probability per gap [0,1]");
    cmd->add_option("--proxy-rate", opts.proxy_rate,
                    "call proxying probability per edge [0,1]");
    cmd->add_flag("--no-reorder", opts.no_reorder, "disable block reordering");
  }
  cmd->add_option("--jobs", opts.jobs, "worker threads");
}

std::set<morph::Level> parse_levels(const std::string& text) {
  std::set<morph::Level> levels;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string name = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!name.empty()) {
      std::optional<morph::Level> l = morph::level_from_string(name);
      if (!l) throw CliError{kExitParse, "unknown level '" + name + "'"};
      levels.insert(*l);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (levels.empty()) throw CliError{kExitParse, "no levels selected"};
  return levels;
}

/// Precedence: flags > config file > MORPHKIT_SEED (seed only) > defaults.
void apply_config_sources(CLI::App* cmd, CommonOpts& opts) {
  nlohmann::json cfg;
  if (!opts.config_file.empty()) {
    try {
      cfg = nlohmann::json::parse(read_file(opts.config_file));
    } catch (const nlohmann::json::exception& e) {
      throw CliError{kExitParse, std::string("bad --config JSON: ") + e.what()};
    }
  }
  auto unset = [&](const std::string& flag) {
    CLI::Option* o = cmd->get_option_no_throw(flag);
    return o && o->count() == 0;
  };
  auto pull = [&](const std::string& flag, const char* key, auto& slot) {
    if (cfg.contains(key) && unset(flag))
      slot = cfg.at(key).get<std::decay_t<decltype(slot)>>();
  };
  pull("--seed", "seed", opts.seed);
  pull("--levels", "levels", opts.levels);
  pull("--variants", "variants", opts.variants);
  pull("--junk-density", "junk_density", opts.junk_density);
  pull("--opaque-rate", "opaque_rate", opts.opaque_rate);
  pull("--proxy-rate", "proxy_rate", opts.proxy_rate);
  pull("--key-file", "key_file", opts.key_file);
  pull("--profiles", "profiles", opts.profiles_file);
  pull("--vectors", "vectors", opts.vectors);
  pull("--budget", "budget", opts.budget);
  pull("--jobs", "jobs", opts.jobs);
  pull("--out", "out", opts.out_dir);
  if (cfg.contains("reorder") && unset("--no-reorder"))
    opts.no_reorder = !cfg.at("reorder").get<bool>();

  if (unset("--seed") && !cfg.contains("seed")) {
    if (const char* env = std::getenv("MORPHKIT_SEED"))
      opts.seed = std::strtoull(env, nullptr, 0);
  }
}

morph::MorphConfig morph_config_of(const CommonOpts& opts) {
  morph::MorphConfig config;
  config.levels = parse_levels(opts.levels);
  config.seed = opts.seed;
  config.variants = opts.variants;
  config.junk_density = opts.junk_density;
  config.opaque_rate = opts.opaque_rate;
  config.proxy_rate = opts.proxy_rate;
  config.reorder = !opts.no_reorder;
  if (config.junk_density < 0 || config.junk_density > 1 ||
      config.opaque_rate < 0 || config.opaque_rate > 1 ||
      config.proxy_rate < 0 || config.proxy_rate > 1)
    throw CliError{kExitParse, "rates must be within [0,1]"};
  if (config.variants < 1)
    throw CliError{kExitParse, "--variants must be >= 1"};
  return config;
}

std::string load_key(const std::string& key_file) {
  if (key_file.empty()) throw CliError{kExitParse, "--key-file is required"};
  std::string key = read_file(key_file);
  while (!key.empty() && (key.back() == '\n' || key.back() == '\r'))
    key.pop_back();
  if (key.empty()) throw CliError{kExitParse, "empty signing key"};
  return key;
}

std::vector<detector::DetectorProfile> load_roster(const std::string& path) {
  if (path.empty()) return detector::default_roster();
  try {
    return detector::roster_from_json(read_file(path));
  } catch (const std::runtime_error& e) {
    throw CliError{kExitParse, e.what()};
  }
}

/// Index-sliced worker pool; results land in caller-indexed slots, so output
/// order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max<unsigned>(1, std::min<std::size_t>(jobs, n ? n : 1));
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (!failed) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// morph
// ---------------------------------------------------------------------------

/// Test-only hook: smuggle an extra emit into the entry method right before
/// its first return, so the equivalence gate always has something to catch.
void inject_trace_fault(ir::Program& program) {
  auto it = program.classes.find(program.entry.class_name);
  if (it == program.classes.end()) return;
  for (ir::MethodDef& m : it->second.methods) {
    if (!(m.sig == program.entry.sig)) continue;
    for (std::size_t i = 0; i < m.body.size(); ++i) {
      if (m.body[i].op == ir::Opcode::Return ||
          m.body[i].op == ir::Opcode::ReturnVoid) {
        m.body.insert(m.body.begin() + static_cast<std::ptrdiff_t>(i),
                      ir::ins::invoke_static({0}, ir::emit_ref()));
        return;
      }
    }
  }
}

std::string format_vector(const std::vector<std::int32_t>& args) {
  std::string out = "[";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(args[i]);
  }
  return out + "]";
}

int cmd_morph(const CommonOpts& opts, const std::vector<std::string>& inputs,
              const std::string& family_flag, const std::string& entry_flag,
              bool no_verify, bool inject_fault) {
  if (opts.out_dir.empty()) throw CliError{kExitParse, "--out is required"};
  morph::MorphConfig config = morph_config_of(opts);
  std::string key = load_key(opts.key_file);
  fs::path out_root(opts.out_dir);
  std::string label = morph::levels_label(config.levels);

  struct SampleWork {
    std::string family;
    std::string source;
    ir::Program program;
    morph::GenerateResult gen;
  };
  std::vector<SampleWork> samples;
  samples.reserve(inputs.size());
  for (const std::string& input : inputs) {
    fs::path dir(input);
    SampleWork work;
    work.source = dir.filename().string();
    if (work.source.empty())
      work.source = dir.parent_path().filename().string();
    work.family = family_flag.empty() ? dir.parent_path().filename().string()
                                      : family_flag;
    if (work.family.empty()) work.family = "unknown";
    work.program = load_program({dir}, entry_flag);
    samples.push_back(std::move(work));
  }

  parallel_for(samples.size(), opts.jobs, [&](std::size_t s) {
    samples[s].gen = morph::generate_variants(
        samples[s].program, config, {samples[s].family, samples[s].source});
    if (inject_fault && !samples[s].gen.variants.empty())
      inject_trace_fault(samples[s].gen.variants.front().program);
  });
  for (const SampleWork& work : samples)
    if (work.gen.degenerate)
      std::cerr << "DegenerateMorph " << work.family << "/" << work.source
                << ": " << work.gen.degenerate->reason << "\n";

  if (!no_verify) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t s = 0; s < samples.size(); ++s)
      for (std::size_t v = 0; v < samples[s].gen.variants.size(); ++v)
        pairs.emplace_back(s, v);
    std::vector<std::optional<vm::Counterexample>> failures(pairs.size());
    parallel_for(pairs.size(), opts.jobs, [&](std::size_t i) {
      const SampleWork& work = samples[pairs[i].first];
      auto vectors = vm::default_vectors(work.program.entry.sig.params.size(),
                                         opts.vectors);
      vm::EquivalenceResult eq =
          vm::equivalent(work.program,
                         work.gen.variants[pairs[i].second].program, vectors,
                         opts.budget);
      if (!eq.equivalent) failures[i] = eq.counterexample;
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!failures[i]) continue;
      std::cerr << "equivalence gate failed: " << samples[pairs[i].first].source
                << " variant " << pairs[i].second << " on vector "
                << format_vector(failures[i]->args) << ": "
                << failures[i]->description << "\n";
      return kExitEquivalence;
    }
  }

  std::vector<morph::VariantRecord> ledger;
  for (SampleWork& work : samples) {
    for (std::size_t i = 0; i < work.gen.variants.size(); ++i) {
      morph::Variant& v = work.gen.variants[i];
      package::SignedBundle bundle =
          package::sign(package::write_bundle(v.program), key);
      fs::path bundle_dir =
          out_root / (work.source + "-" + label + "-" + std::to_string(i));
      package::write_bundle_dir(bundle, bundle_dir);
      ledger.push_back(v.record);
    }
  }

  package::write_file_atomic(out_root / "ledger.csv",
                             morph::ledger_csv(ledger));
  std::cout << ledger.size() << " variant bundle(s) written to "
            << out_root.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

std::vector<detector::CorpusSample> load_corpus(const fs::path& corpus_dir) {
  std::vector<detector::CorpusSample> corpus;
  if (!fs::is_directory(corpus_dir))
    throw CliError{kExitParse,
                   "no families found in " + corpus_dir.string()};
  std::vector<fs::path> families;
  for (const auto& f : fs::directory_iterator(corpus_dir))
    if (f.is_directory()) families.push_back(f.path());
  std::sort(families.begin(), families.end());
  for (const fs::path& family : families) {
    std::vector<fs::path> samples;
    for (const auto& s : fs::directory_iterator(family))
      if (s.is_directory()) samples.push_back(s.path());
    std::sort(samples.begin(), samples.end());
    for (const fs::path& sample : samples)
      corpus.push_back({family.filename().string(), sample.filename().string(),
                        load_program({sample}, {})});
  }
  if (corpus.empty())
    throw CliError{kExitParse,
                   "no families found in " + corpus_dir.string()};
  return corpus;
}

std::vector<morph::Level> matrix_columns(const std::set<morph::Level>& levels) {
  // Default evaluation columns; a restricted --levels narrows the matrix.
  if (levels == std::set<morph::Level>{morph::Level::All})
    return {morph::Level::Class, morph::Level::Method, morph::Level::Body,
            morph::Level::All};
  std::vector<morph::Level> columns;
  for (morph::Level l :
       {morph::Level::Class, morph::Level::Method, morph::Level::Body,
        morph::Level::CallGraph, morph::Level::All})
    if (levels.count(l)) columns.push_back(l);
  return columns;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& corpus_path) {
  if (opts.out_dir.empty()) throw CliError{kExitParse, "--out is required"};
  morph::MorphConfig config = morph_config_of(opts);
  std::vector<detector::DetectorProfile> roster =
      load_roster(opts.profiles_file);
  std::vector<detector::CorpusSample> corpus = load_corpus(corpus_path);

  detector::EvaluateOutput result = detector::evaluate(
      corpus, roster, config, matrix_columns(config.levels));

  fs::path out_root(opts.out_dir);
  package::write_file_atomic(out_root / "matrix.csv", result.matrix.to_csv());
  package::write_file_atomic(out_root / "ledger.csv",
                             morph::ledger_csv(result.ledger));
  std::cout << result.matrix.to_table();
  if (result.matrix.degenerate_cells > 0) {
    std::cout << result.matrix.degenerate_cells
              << " degenerate (family, level) cell(s) excluded\n";
    for (const std::string& note : result.degenerate_notes)
      std::cerr << note << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run / sign / verify / scan
// ---------------------------------------------------------------------------

int cmd_run(const CommonOpts& opts, const std::vector<std::string>& inputs,
            const std::string& entry_flag,
            const std::vector<std::int32_t>& args, bool dump_cfg) {
  std::vector<fs::path> dirs(inputs.begin(), inputs.end());
  ir::Program program = load_program(dirs, entry_flag);

  if (dump_cfg) {
    for (const auto& [name, cls] : program.classes) {
      if (cls.external) continue;
      for (const ir::MethodDef& m : cls.methods) {
        std::cout << "# " << name << "->" << ir::to_string(m.sig) << "\n";
        for (auto [from, to] : analysis::build_cfg(m).edges())
          std::cout << from << " -> " << to << "\n";
      }
    }
    return kExitOk;
  }

  const ir::ClassDef* cls = program.find_class(program.entry.class_name);
  const ir::MethodDef* entry = cls ? cls->find_method(program.entry.sig) : nullptr;
  if (!entry || args.size() != entry->sig.params.size())
    throw CliError{kExitParse,
                   "--args arity does not match the entry signature"};

  vm::RunResult result = vm::run(program, args, opts.budget);
  for (std::int32_t v : result.trace.emitted) std::cout << v << "\n";
  if (result.error) {
    std::cerr << "error: " << vm::to_string(*result.error) << " after "
              << result.trace.steps << " steps\n";
    return kExitEquivalence;
  }
  if (result.trace.result)
    std::cout << "ret " << *result.trace.result << "\n";
  else
    std::cout << "ret void\n";
  return kExitOk;
}

int cmd_sign(const CommonOpts& opts, const std::string& bundle_dir) {
  std::string key = load_key(opts.key_file);
  package::SignedBundle bundle = package::read_bundle_dir(bundle_dir);
  if (bundle.bundle.entries.empty())
    throw CliError{kExitParse, "empty bundle: " + bundle_dir};
  package::SignedBundle signed_bundle = package::sign(bundle.bundle, key);
  package::write_file_atomic(fs::path(bundle_dir) / "META/MANIFEST",
                             signed_bundle.manifest);
  package::write_file_atomic(fs::path(bundle_dir) / "META/SIG",
                             signed_bundle.sig + "\n");
  std::cout << "signed " << bundle_dir << "\n";
  return kExitOk;
}

int cmd_verify(const CommonOpts& opts, const std::string& bundle_dir) {
  std::string key = load_key(opts.key_file);
  package::SignedBundle bundle = package::read_bundle_dir(bundle_dir);
  package::Verdict verdict = package::verify(bundle, key);
  std::cout << package::to_string(verdict) << "\n";
  return verdict.valid() ? kExitOk : kExitNegative;
}

int cmd_scan(const CommonOpts& opts, const std::string& corpus_path,
             const std::vector<std::string>& inputs,
             const std::string& entry_flag) {
  std::vector<detector::DetectorProfile> roster =
      load_roster(opts.profiles_file);
  std::vector<detector::CorpusSample> corpus = load_corpus(corpus_path);
  std::vector<std::pair<std::string, const ir::Program*>> originals;
  for (const detector::CorpusSample& s : corpus)
    originals.emplace_back(s.family + "/" + s.id, &s.program);

  std::vector<fs::path> dirs(inputs.begin(), inputs.end());
  ir::Program target = load_program(dirs, entry_flag);

  bool any_detected = false;
  for (const detector::DetectorProfile& profile : roster) {
    detector::SignatureDb db = detector::build_db(profile, originals);
    detector::ScanVerdict verdict = detector::scan(db, target);
    char score[32];
    std::snprintf(score, sizeof(score), "%.3f", verdict.score);
    std::cout << profile.id << (verdict.detected ? " detected" : " clean")
              << " score=" << score;
    if (verdict.matched) std::cout << " match=" << *verdict.matched;
    std::cout << "\n";
    any_detected = any_detected || verdict.detected;
  }
  return any_detected ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"morphkit: assembly morphing and detector-evasion toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;

  // morph
  std::vector<std::string> morph_inputs;
  std::string family_flag, entry_flag;
  bool no_verify = false, inject_fault = false;
  CLI::App* morph_cmd =
      app.add_subcommand("morph", "generate signed morphed bundles");
  add_common_flags(morph_cmd, opts, true);
  morph_cmd->add_option("--out", opts.out_dir, "output directory")->required();
  morph_cmd->add_option("--key-file", opts.key_file, "signing key file");
  morph_cmd->add_option("--vectors", opts.vectors, "equivalence vectors");
  morph_cmd->add_option("--budget", opts.budget, "vm step budget");
  morph_cmd->add_option("--family", family_flag, "family name for the ledger");
  morph_cmd->add_option("--entry", entry_flag, "entry ref override");
  morph_cmd->add_flag("--no-verify", no_verify, "skip the equivalence gate");
  morph_cmd->add_flag("--inject-fault", inject_fault, "testing hook")
      ->group("");  // hidden
  morph_cmd->add_option("inputs", morph_inputs, "sample directories")
      ->required();

  // evaluate
  std::string corpus_path;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "detection-rate matrix over a corpus");
  add_common_flags(eval_cmd, opts, true);
  eval_cmd->add_option("--corpus", corpus_path, "corpus root")->required();
  eval_cmd->add_option("--out", opts.out_dir, "output directory")->required();
  eval_cmd->add_option("--profiles", opts.profiles_file, "roster JSON");

  // run
  std::vector<std::string> run_inputs;
  std::vector<std::int32_t> run_args;
  bool dump_cfg = false;
  CLI::App* run_cmd = app.add_subcommand("run", "interpret a sample");
  add_common_flags(run_cmd, opts, false);
  run_cmd->add_option("--budget", opts.budget, "vm step budget");
  run_cmd->add_option("--entry", entry_flag, "entry ref override");
  run_cmd->add_option("--args", run_args, "entry arguments");
  run_cmd->add_flag("--dump-cfg", dump_cfg, "print CFG edges and exit");
  run_cmd->add_option("inputs", run_inputs, "sample directories or units")
      ->required();

  // sign / verify
  std::string bundle_dir;
  CLI::App* sign_cmd = app.add_subcommand("sign", "sign a bundle directory");
  sign_cmd->add_option("--key-file", opts.key_file, "signing key file")
      ->required();
  sign_cmd->add_option("bundle", bundle_dir, "bundle directory")->required();

  std::string verify_dir;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "verify a signed bundle directory");
  verify_cmd->add_option("--key-file", opts.key_file, "signing key file")
      ->required();
  verify_cmd->add_option("bundle", verify_dir, "bundle directory")->required();

  // scan
  std::string scan_corpus;
  std::vector<std::string> scan_inputs;
  CLI::App* scan_cmd =
      app.add_subcommand("scan", "scan a program against detector profiles");
  scan_cmd->add_option("--corpus", scan_corpus, "corpus of known samples")
      ->required();
  scan_cmd->add_option("--profiles", opts.profiles_file, "roster JSON");
  scan_cmd->add_option("--entry", entry_flag, "entry ref override");
  scan_cmd->add_option("inputs", scan_inputs, "bundle or sample directories")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    apply_config_sources(active, opts);
    if (active == morph_cmd)
      return cmd_morph(opts, morph_inputs, family_flag, entry_flag, no_verify,
                       inject_fault);
    if (active == eval_cmd) return cmd_evaluate(opts, corpus_path);
    if (active == run_cmd)
      return cmd_run(opts, run_inputs, entry_flag, run_args, dump_cfg);
    if (active == sign_cmd) return cmd_sign(opts, bundle_dir);
    if (active == verify_cmd) return cmd_verify(opts, verify_dir);
    if (active == scan_cmd)
      return cmd_scan(opts, scan_corpus, scan_inputs, entry_flag);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
