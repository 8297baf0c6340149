// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/morph.hpp"

#include <algorithm>
#include <stdexcept>

#include "morphkit/analysis.hpp"
#include "morphkit/package.hpp"

namespace morphkit::morph {

using ir::Instruction;
using ir::Opcode;

const char* to_string(Level level) {
  switch (level) {
    case Level::Class: return "class";
    case Level::Method: return "method";
    case Level::Body: return "body";
    case Level::CallGraph: return "callgraph";
    case Level::All: return "all";
  }
  return "?";
}

std::optional<Level> level_from_string(std::string_view name) {
  if (name == "class") return Level::Class;
  if (name == "method") return Level::Method;
  if (name == "body") return Level::Body;
  if (name == "callgraph") return Level::CallGraph;
  if (name == "all") return Level::All;
  return std::nullopt;
}

std::vector<Level> expand_levels(const std::set<Level>& levels) {
  bool all = levels.count(Level::All) > 0;
  std::vector<Level> out;
  // Fixed pass order: proxies get morphed names, proxy bodies get body-morphed.
  for (Level l : {Level::Class, Level::Method, Level::CallGraph, Level::Body})
    if (all || levels.count(l)) out.push_back(l);
  return out;
}

std::string levels_label(const std::set<Level>& levels) {
  std::vector<Level> expanded = expand_levels(levels);
  if (expanded.size() == 4) return "all";
  std::string out;
  for (Level l : expanded) {
    if (!out.empty()) out += '+';
    out += to_string(l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Name allocation
// ---------------------------------------------------------------------------

std::string NameAllocator::name_for_index(Kind kind, std::uint64_t index) {
  // Bijective base-26: 0 -> a, 25 -> z, 26 -> aa.
  std::string suffix;
  std::uint64_t n = index + 1;
  while (n > 0) {
    --n;
    suffix += static_cast<char>('a' + n % 26);
    n /= 26;
  }
  std::reverse(suffix.begin(), suffix.end());
  return kind == Kind::Class ? "Lm/" + suffix + ";" : "m" + suffix;
}

std::string NameAllocator::next() {
  std::uint64_t skip = stream_->below(4);
  if (first_) {
    index_ = skip;
    first_ = false;
  } else {
    index_ += 1 + skip;
  }
  std::string name = name_for_index(kind_, index_);
  while (taken_.count(name)) {
    ++index_;
    name = name_for_index(kind_, index_);
  }
  taken_.insert(name);
  return name;
}

// ---------------------------------------------------------------------------
// Class renaming
// ---------------------------------------------------------------------------

namespace {

using Remap = std::map<std::string, std::string>;

std::string remap_name(const Remap& remap, const std::string& name) {
  auto it = remap.find(name);
  return it == remap.end() ? name : it->second;
}

void remap_type(const Remap& remap, ir::TypeDesc& type) {
  if (type.is_ref()) type.class_name = remap_name(remap, type.class_name);
}

void remap_sig(const Remap& remap, ir::MethodSig& sig) {
  for (ir::TypeDesc& p : sig.params) remap_type(remap, p);
  remap_type(remap, sig.ret);
}

ir::Program remap_class_names(const ir::Program& program, const Remap& remap) {
  ir::Program out;
  out.entry.class_name = remap_name(remap, program.entry.class_name);
  out.entry.sig = program.entry.sig;
  remap_sig(remap, out.entry.sig);

  for (const auto& [old_name, cls] : program.classes) {
    ir::ClassDef c = cls;
    c.name = remap_name(remap, c.name);
    c.superclass = remap_name(remap, c.superclass);
    for (ir::Field& f : c.fields) remap_type(remap, f.type);
    for (ir::MethodDef& m : c.methods) {
      remap_sig(remap, m.sig);
      for (Instruction& in : m.body) {
        if (in.method) {
          in.method->class_name = remap_name(remap, in.method->class_name);
          remap_sig(remap, in.method->sig);
        }
        if (in.field) {
          in.field->class_name = remap_name(remap, in.field->class_name);
          remap_type(remap, in.field->type);
        }
        if (in.type) remap_type(remap, *in.type);
      }
    }
    out.classes.emplace(c.name, std::move(c));
  }
  return out;
}

}  // namespace

std::pair<ir::Program, RenameMap> rename_classes(const ir::Program& program,
                                                 SplitMix64& stream) {
  std::set<std::string> taken;
  for (const auto& [name, cls] : program.classes) taken.insert(name);
  for (const ir::ClassDef& rt : ir::runtime_classes()) taken.insert(rt.name);

  NameAllocator alloc(NameAllocator::Kind::Class, stream, std::move(taken));
  RenameMap renames;
  for (const auto& [name, cls] : program.classes)
    if (!cls.external) renames.class_renames.emplace(name, alloc.next());

  return {remap_class_names(program, renames.class_renames), renames};
}

// ---------------------------------------------------------------------------
// Method renaming
// ---------------------------------------------------------------------------

namespace {

/// Union-find over (class, sig) declarations, linking each declaration to the
/// nearest ancestor declaring the same signature. Groups capture whole
/// override families, including siblings joined through a shared ancestor.
class OverrideGroups {
 public:
  explicit OverrideGroups(const ir::Program& program) : program_(program) {
    for (const auto& [cls_name, cls] : program.classes) {
      for (const ir::MethodDef& m : cls.methods) {
        std::string node = key(cls_name, m.sig);
        parent_.emplace(node, node);
        if (const ir::ClassDef* anc = declaring_ancestor(cls, m.sig))
          join(node, key(anc->name, m.sig));
      }
    }
  }

  std::string root(const std::string& node) {
    auto it = parent_.find(node);
    if (it == parent_.end()) return node;
    if (it->second == node) return node;
    std::string r = root(it->second);
    it->second = r;
    return r;
  }

  static std::string key(const std::string& cls, const ir::MethodSig& sig) {
    return cls + "|" + ir::to_string(sig);
  }

 private:
  const ir::ClassDef* declaring_ancestor(const ir::ClassDef& cls,
                                         const ir::MethodSig& sig) {
    std::set<std::string_view> seen;
    seen.insert(cls.name);
    const ir::ClassDef* cur = cls.superclass == cls.name
                                  ? nullptr
                                  : program_.find_class(cls.superclass);
    while (cur && seen.insert(cur->name).second) {
      if (cur->find_method(sig)) return cur;
      if (cur->superclass == cur->name) break;
      cur = program_.find_class(cur->superclass);
    }
    return nullptr;
  }

  void join(const std::string& a, const std::string& b) {
    parent_.emplace(b, b);  // ancestor may be a runtime class
    parent_[root(a)] = root(b);
  }

  const ir::Program& program_;
  std::map<std::string, std::string> parent_;
};

struct MethodRenamePlan {
  // group root -> fresh name
  std::map<std::string, std::string> group_names;
  OverrideGroups groups;
};

/// Decides which override groups get fresh names. Separated from the rewrite
/// so degeneracy checks can run it without a real stream.
std::map<std::string, std::string> plan_method_renames(
    const ir::Program& program, OverrideGroups& groups, SplitMix64& stream) {
  // Group safety: every member of a group must be individually safe.
  std::map<std::string, bool> group_safe;
  for (const auto& [cls_name, cls] : program.classes) {
    for (const ir::MethodDef& m : cls.methods) {
      std::string r = groups.root(OverrideGroups::key(cls_name, m.sig));
      bool safe = !cls.external && analysis::rename_safe(program, cls, m.sig);
      auto [it, fresh] = group_safe.emplace(r, safe);
      if (!fresh) it->second = it->second && safe;
    }
  }

  std::set<std::string> taken;
  for (const auto& [cls_name, cls] : program.classes)
    for (const ir::MethodDef& m : cls.methods) taken.insert(m.sig.name);
  for (const ir::ClassDef& rt : ir::runtime_classes())
    for (const ir::MethodDef& m : rt.methods) taken.insert(m.sig.name);

  NameAllocator alloc(NameAllocator::Kind::Method, stream, std::move(taken));
  std::map<std::string, std::string> names;
  for (const auto& [cls_name, cls] : program.classes) {
    if (cls.external) continue;
    for (const ir::MethodDef& m : cls.methods) {
      std::string r = groups.root(OverrideGroups::key(cls_name, m.sig));
      if (!group_safe[r] || names.count(r)) continue;
      names.emplace(r, alloc.next());
    }
  }
  return names;
}

}  // namespace

std::pair<ir::Program, RenameMap> rename_methods(const ir::Program& program,
                                                 SplitMix64& stream) {
  OverrideGroups groups(program);
  std::map<std::string, std::string> group_names =
      plan_method_renames(program, groups, stream);

  auto new_name_for = [&](const std::string& cls_name,
                          const ir::MethodSig& sig) -> const std::string* {
    auto it = group_names.find(groups.root(OverrideGroups::key(cls_name, sig)));
    return it == group_names.end() ? nullptr : &it->second;
  };

  ir::Program out = program;
  RenameMap renames;

  for (auto& [cls_name, cls] : out.classes) {
    if (cls.external) continue;
    for (ir::MethodDef& m : cls.methods) {
      // Call sites first, against the original declarations.
      for (Instruction& in : m.body) {
        if (!in.method) continue;
        ir::Resolution res = ir::resolve_method(program, *in.method);
        if (!res.cls) continue;
        if (const std::string* n = new_name_for(res.cls->name, in.method->sig))
          in.method->sig.name = *n;
      }
      if (const std::string* n = new_name_for(cls_name, m.sig)) {
        renames.method_renames.emplace(
            std::make_pair(cls_name, ir::to_string(m.sig)), *n);
        m.sig.name = *n;
      }
    }
  }
  return {std::move(out), renames};
}

// ---------------------------------------------------------------------------
// Body morphing
// ---------------------------------------------------------------------------

namespace {

constexpr int kJunkPoolSize = 3;

/// Insertion points: before body[i] for i in [1, n-1], never between an
/// invoke and its move-result.
bool eligible_gap(const std::vector<Instruction>& body, std::size_t i) {
  return i > 0 && i < body.size() && body[i].op != Opcode::MoveResult;
}

/// One junk instruction over the fresh-register pool. Draws land in named
/// locals first: argument evaluation order must not affect the stream.
Instruction draw_junk(SplitMix64& stream, const std::uint16_t pool[]) {
  auto reg = [&] { return pool[stream.below(kJunkPoolSize)]; };
  std::uint64_t pick = stream.below(5);
  if (pick == 0) {
    std::uint16_t a = reg();
    std::int32_t lit = stream.next_i32();
    return ir::ins::const_i32(a, lit);
  }
  if (pick == 4) {
    std::uint16_t a = reg();
    std::uint16_t b = reg();
    std::int32_t lit = stream.next_i32();
    return ir::ins::and_lit(a, b, lit);
  }
  std::uint16_t a = reg();
  std::uint16_t b = reg();
  std::uint16_t c = reg();
  switch (pick) {
    case 1: return ir::ins::add_int(a, b, c);
    case 2: return ir::ins::sub_int(a, b, c);
    default: return ir::ins::mul_int(a, b, c);
  }
}

std::vector<Instruction> draw_junk_run(SplitMix64& stream,
                                       const std::uint16_t pool[]) {
  std::size_t count = 1 + stream.below(3);
  std::vector<Instruction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_junk(stream, pool));
  return out;
}

}  // namespace

ir::MethodDef morph_body(const ir::MethodDef& method, SplitMix64& stream,
                         const BodyParams& params) {
  // Independent substreams: the gap-selection draws stay aligned across
  // different densities under the same seed, so heavier configs insert at a
  // superset of the lighter configs' gaps.
  SplitMix64 gap_stream = stream.split();
  SplitMix64 junk_stream = stream.split();
  SplitMix64 opaque_stream = stream.split();
  SplitMix64 perm_stream = stream.split();

  const std::vector<Instruction>& body = method.body;
  const std::size_t n = body.size();

  std::uint16_t pool[kJunkPoolSize];
  for (int i = 0; i < kJunkPoolSize; ++i)
    pool[i] = static_cast<std::uint16_t>(method.first_param_reg() + i);

  // Phase 1 plan: junk runs keyed by input gap index.
  std::map<std::size_t, std::vector<Instruction>> junk_at;
  for (std::size_t i = 0; i < n; ++i) {
    if (!eligible_gap(body, i)) continue;
    double u = gap_stream.uniform();
    if (u < params.junk_density)
      junk_at.emplace(i, draw_junk_run(junk_stream, pool));
  }

  // Materialize junk (registers renumbered first if anything will grow; the
  // opaque phase below can only fire at post-junk gaps, and needs the pool
  // too, so decide growth after planning it).
  std::vector<Instruction> body1;
  {
    std::vector<Instruction> base = body;
    body1.reserve(n + junk_at.size() * 3);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = junk_at.find(i);
      if (it != junk_at.end())
        body1.insert(body1.end(), it->second.begin(), it->second.end());
      body1.push_back(base[i]);
    }
  }

  // Phase 2 plan: opaque guards at post-junk gaps.
  std::vector<std::size_t> opaque_gaps;
  for (std::size_t i = 0; i < body1.size(); ++i) {
    if (!eligible_gap(body1, i)) continue;
    if (opaque_stream.uniform() < params.opaque_rate) opaque_gaps.push_back(i);
  }

  bool grew = !junk_at.empty() || !opaque_gaps.empty();
  ir::MethodDef out = grew ? ir::grow_registers(method, kJunkPoolSize) : method;

  if (grew) {
    // Rebuild body1 on the grown frame; junk already targets the pool, which
    // only exists in the grown frame, so only the original instructions move.
    std::vector<Instruction> rebuilt;
    rebuilt.reserve(body1.size());
    std::size_t orig = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = junk_at.find(i);
      if (it != junk_at.end())
        rebuilt.insert(rebuilt.end(), it->second.begin(), it->second.end());
      rebuilt.push_back(out.body[orig++]);
    }
    body1 = std::move(rebuilt);
  }

  // Materialize opaque predicates, back to front so gap indices stay valid.
  if (!opaque_gaps.empty()) {
    std::set<std::string> labels;
    for (const Instruction& in : body1)
      if (in.op == Opcode::Label) labels.insert(in.text);

    std::size_t counter = 0;
    std::vector<Instruction> tail;
    struct Guard {
      std::size_t gap;
      std::string jnk, cnt;
      std::int32_t literal;
      std::vector<Instruction> junk;
    };
    std::vector<Guard> guards;
    for (std::size_t gap : opaque_gaps) {
      std::string jnk, cnt;
      while (true) {
        jnk = std::string(kOpaqueJunkLabelPrefix) + std::to_string(counter);
        cnt = std::string(kOpaqueContLabelPrefix) + std::to_string(counter);
        ++counter;
        if (!labels.count(jnk) && !labels.count(cnt)) break;
      }
      labels.insert(jnk);
      labels.insert(cnt);
      guards.push_back({gap, jnk, cnt, opaque_stream.next_i32(),
                        draw_junk_run(opaque_stream, pool)});
    }

    for (auto it = guards.rbegin(); it != guards.rend(); ++it) {
      // (x & 1) == 2 is false for every x under wrapping arithmetic.
      std::vector<Instruction> guard;
      guard.push_back(ir::ins::const_i32(pool[0], it->literal));
      guard.push_back(ir::ins::and_lit(pool[0], pool[0], 1));
      guard.push_back(ir::ins::const_i32(pool[1], 2));
      guard.push_back(ir::ins::if_eq(pool[0], pool[1], it->jnk));
      guard.push_back(ir::ins::label(it->cnt));
      body1.insert(body1.begin() + static_cast<std::ptrdiff_t>(it->gap),
                   guard.begin(), guard.end());
    }
    for (const Guard& g : guards) {
      tail.push_back(ir::ins::label(g.jnk));
      tail.insert(tail.end(), g.junk.begin(), g.junk.end());
      tail.push_back(ir::ins::go_to(g.cnt));
    }
    body1.insert(body1.end(), tail.begin(), tail.end());
  }

  out.body = std::move(body1);

  // Phase 3: block reordering, entry pinned first.
  if (params.reorder) {
    analysis::Cfg cfg = analysis::build_cfg(out);
    if (cfg.blocks.size() >= 3) {
      std::vector<std::size_t> order(cfg.blocks.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size() - 1; i >= 2; --i) {
        std::size_t j = 1 + perm_stream.below(i);  // within [1, i]
        std::swap(order[i], order[j]);
      }
      out.body = analysis::linearize(cfg, order);
    }
  }

  return out;
}

// ---------------------------------------------------------------------------
// Call-graph morphing
// ---------------------------------------------------------------------------

ir::Program morph_callgraph(const ir::Program& program, SplitMix64& stream,
                            double proxy_rate) {
  analysis::CallGraph graph = analysis::build_callgraph(program);

  std::set<std::string> taken;
  for (const auto& [cls_name, cls] : program.classes)
    for (const ir::MethodDef& m : cls.methods) taken.insert(m.sig.name);
  for (const ir::ClassDef& rt : ir::runtime_classes())
    for (const ir::MethodDef& m : rt.methods) taken.insert(m.sig.name);
  NameAllocator alloc(NameAllocator::Kind::Method, stream, std::move(taken));

  ir::Program out = program;
  for (const analysis::CallEdge& edge : graph.edges) {
    double u = stream.uniform();
    if (u >= proxy_rate) continue;

    bool has_receiver = edge.kind != analysis::CallKind::Static;
    if (edge.callee.sig.params.size() + (has_receiver ? 1 : 0) > 64)
      continue;  // proxy signature would exceed the parameter cap

    ir::ClassDef& cls = out.classes.at(edge.caller.class_name);
    ir::MethodDef* caller = nullptr;
    for (ir::MethodDef& m : cls.methods)
      if (m.sig == edge.caller.sig) caller = &m;
    Instruction& site = caller->body.at(edge.site);

    ir::MethodSig proxy_sig;
    proxy_sig.name = alloc.next();
    if (has_receiver)
      proxy_sig.params.push_back(ir::TypeDesc::make_ref(edge.callee.class_name));
    for (const ir::TypeDesc& p : edge.callee.sig.params)
      proxy_sig.params.push_back(p);
    proxy_sig.ret = edge.callee.sig.ret;

    std::size_t nargs = proxy_sig.params.size();
    bool has_result = !proxy_sig.ret.is_void();

    ir::MethodDef proxy;
    proxy.sig = proxy_sig;
    proxy.access.is_public = true;
    proxy.access.is_static = true;
    proxy.registers = static_cast<std::uint16_t>(nargs + (has_result ? 1 : 0));

    std::vector<ir::RegIndex> fwd(nargs);
    for (std::size_t i = 0; i < nargs; ++i)
      fwd[i] = static_cast<ir::RegIndex>(i + (has_result ? 1 : 0));
    Instruction fwd_call;
    switch (edge.kind) {
      case analysis::CallKind::Static:
        fwd_call = ir::ins::invoke_static(fwd, edge.callee);
        break;
      case analysis::CallKind::Virtual:
        fwd_call = ir::ins::invoke_virtual(fwd, edge.callee);
        break;
      case analysis::CallKind::Direct:
        fwd_call = ir::ins::invoke_direct(fwd, edge.callee);
        break;
    }
    proxy.body.push_back(std::move(fwd_call));
    if (has_result) {
      proxy.body.push_back(ir::ins::move_result(0));
      proxy.body.push_back(ir::ins::return_reg(0));
    } else {
      proxy.body.push_back(ir::ins::return_void());
    }

    site = ir::ins::invoke_static(site.regs,
                                  {edge.caller.class_name, proxy_sig});
    cls.methods.push_back(std::move(proxy));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variant generation
// ---------------------------------------------------------------------------

bool level_is_degenerate(const ir::Program& program, Level level) {
  switch (level) {
    case Level::Class: {
      for (const auto& [name, cls] : program.classes)
        if (!cls.external) return false;
      return true;
    }
    case Level::Method: {
      OverrideGroups groups(program);
      SplitMix64 dry(0);
      return plan_method_renames(program, groups, dry).empty();
    }
    case Level::CallGraph: {
      for (const analysis::CallEdge& e : analysis::build_callgraph(program).edges) {
        bool has_receiver = e.kind != analysis::CallKind::Static;
        if (e.callee.sig.params.size() + (has_receiver ? 1 : 0) <= 64)
          return false;
      }
      return true;
    }
    case Level::Body: {
      for (const auto& [name, cls] : program.classes) {
        if (cls.external) continue;
        for (const ir::MethodDef& m : cls.methods) {
          for (std::size_t i = 0; i < m.body.size(); ++i)
            if (eligible_gap(m.body, i)) return false;
          if (analysis::build_cfg(m).blocks.size() >= 3) return false;
        }
      }
      return true;
    }
    case Level::All:
      return level_is_degenerate(program, Level::Class) &&
             level_is_degenerate(program, Level::Method) &&
             level_is_degenerate(program, Level::CallGraph) &&
             level_is_degenerate(program, Level::Body);
  }
  return false;
}

GenerateResult generate_variants(const ir::Program& program,
                                 const MorphConfig& config,
                                 const SampleMeta& meta) {
  if (config.variants < 1)
    throw std::invalid_argument("generate_variants: variants must be >= 1");

  GenerateResult result;
  std::vector<Level> passes = expand_levels(config.levels);

  std::vector<Level> degenerate;
  for (Level l : passes)
    if (level_is_degenerate(program, l)) degenerate.push_back(l);
  if (!degenerate.empty()) {
    std::string reason = "level(s) cannot change this program:";
    for (Level l : degenerate) reason += std::string(" ") + to_string(l);
    result.degenerate = DegenerateMorph{std::move(degenerate), std::move(reason)};
    return result;
  }

  std::string label = levels_label(config.levels);
  BodyParams body_params{config.junk_density, config.opaque_rate,
                         config.reorder};

  for (std::uint32_t i = 0; i < config.variants; ++i) {
    std::uint64_t seed = variant_seed(config.seed, i);
    SplitMix64 stream(seed);

    ir::Program p = program;
    for (Level l : passes) {
      switch (l) {
        case Level::Class:
          p = rename_classes(p, stream).first;
          break;
        case Level::Method:
          p = rename_methods(p, stream).first;
          break;
        case Level::CallGraph:
          p = morph_callgraph(p, stream, config.proxy_rate);
          break;
        case Level::Body:
          for (auto& [name, cls] : p.classes) {
            if (cls.external) continue;
            for (ir::MethodDef& m : cls.methods)
              m = morph_body(m, stream, body_params);
          }
          break;
        case Level::All:
          break;  // expanded already
      }
    }

    std::vector<ir::Violation> violations = ir::validate(p);
    if (!violations.empty())
      throw std::logic_error("generate_variants: morphed program is invalid: " +
                             violations.front().where + ": " +
                             violations.front().message);

    VariantRecord record{meta.family, meta.source, label, seed,
                         package::write_bundle(p).digest()};
    result.variants.push_back({std::move(p), std::move(record)});
  }
  return result;
}

std::string ledger_csv(const std::vector<VariantRecord>& records) {
  std::string out = "family,source,level,seed,digest\n";
  for (const VariantRecord& r : records) {
    out += r.family;
    out += ',';
    out += r.source;
    out += ',';
    out += r.level;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.digest;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Count replay
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  SplitMix64 g(base ^ fnv1a64(tag));
  return g.next();
}

ReplayResult replay_counts(const std::vector<ReplayRequest>& requests,
                           const MorphConfig& base_config) {
  ReplayResult result;
  for (const ReplayRequest& req : requests) {
    for (const auto& [level, count] : req.counts) {
      std::string cell = req.family + "/" + to_string(level);
      if (count == 0) {
        result.degenerate_notes.push_back(
            "DegenerateMorph " + cell + ": zero variants for this cell");
        continue;
      }
      MorphConfig config = base_config;
      config.levels = {level};
      config.variants = count;
      config.seed = derive_seed(base_config.seed, req.family + "/" +
                                                      req.source + "/" +
                                                      to_string(level));
      GenerateResult gen =
          generate_variants(req.program, config, {req.family, req.source});
      if (gen.degenerate) {
        result.degenerate_notes.push_back("DegenerateMorph " + cell + ": " +
                                          gen.degenerate->reason);
        continue;
      }
      for (Variant& v : gen.variants)
        result.records.push_back(std::move(v.record));
    }
  }
  return result;
}

}  // namespace morphkit::morph
