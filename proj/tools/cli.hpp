// Copyright 2026 The tn-slicer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end. Every subcommand reads JSON inputs, writes one
// JSON (or CSV) report and maps library errors to exit codes:
// 0 ok, 2 validation error, 3 infeasible plan.

#ifndef TNSLICER_TOOLS_CLI_HPP_
#define TNSLICER_TOOLS_CLI_HPP_

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tnslicer.hpp"

namespace tnslicer::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

struct Options {
  std::string net, path, out, slices, inputs, finder_pool = "local", format = "json";
  int target = 0;
  std::uint64_t seed = 0;
  double t_initial = 1.0, alpha = 0.95, t_final = 1e-3;
  int max_iters = 100000;
  int chains = 1, workers = 1;
  int capacity = 13;
  double peak_flops = 1e12, bandwidth = 32e9, granularity = 1;
  int element_bytes = 8;
  int instances = 0;
  int min_vertices = 6, max_vertices = 10, max_pool = 12;
  bool verify = false, force = false, timestamps = false, fused = false, leaves_fit = false;
};

/// Loaded network and tree plus the provenance block of the report.
struct Loaded {
  TensorNetwork net;
  ContractionTree tree;
  Json inputs = Json::object();
};

inline Loaded load(const Options& o, bool need_path = true) {
  if (o.net.empty()) throw ValidationError("--net is required");
  Loaded l;
  const auto net_text = read_file(o.net);
  l.net = parse_network(net_text);
  l.inputs["net"] = {{"file", o.net}, {"sha256", sha256_hex(net_text)}};
  if (need_path) {
    if (o.path.empty()) throw ValidationError("--path is required");
    const auto path_text = read_file(o.path);
    l.tree = build_tree(l.net, parse_path(path_text));
    l.inputs["path"] = {{"file", o.path}, {"sha256", sha256_hex(path_text)}};
  }
  if (!o.inputs.empty()) l.inputs["tensors"] = {{"file", o.inputs}, {"sha256", sha256_hex(read_file(o.inputs))}};
  return l;
}

inline IndexSet parse_slices(const TensorNetwork& net, const std::string& csv) {
  IndexSet s;
  std::stringstream ss(csv);
  std::string label;
  while (std::getline(ss, label, ','))
    if (!label.empty()) s.push_back(net.at(label));
  s = sets::normalized(s);
  return s;
}

inline Json label_list(const TensorNetwork& net, const IndexSet& s) {
  Json a = Json::array();
  for (EdgeId e : s) a.push_back(net.label(e));
  return a;
}

inline Json header(const std::string& command, const Options& o) {
  Json j;
  j["format"] = kFormatTag;
  j["command"] = command;
  j["version"] = kVersion;
  if (o.timestamps) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["generated_at"] = buf;
  }
  return j;
}

inline FinderPool finder_pool(const Options& o) {
  if (o.finder_pool == "local") return FinderPool::kLocal;
  if (o.finder_pool == "global") return FinderPool::kGlobal;
  throw ValidationError("--finder-pool must be 'local' or 'global'");
}

inline Json slice_json(const ContractionTree& tree, const SliceSet& s) {
  const auto& net = tree.network();
  const auto c = sliced_cost(tree, s);
  Json j;
  j["target_rank"] = s.target_rank;
  j["indices"] = label_list(net, s.indices);
  j["size"] = s.size();
  j["overhead"] = overhead(tree, s);
  j["log2_flops"] = c.log2_time_total;
  j["flops"] = c.time_total.to_string();
  j["log2_peak_rank"] = c.log2_memory_peak;
  j["provenance"] = to_string(s.provenance);
  return j;
}

inline int require_target(const Options& o) {
  if (o.target < 1) throw ValidationError("--target must be >= 1");
  return o.target;
}

/// Process-level slices: --slices if given, else the finder at --target, else none.
inline IndexSet process_slices(const Loaded& l, const Options& o) {
  if (!o.slices.empty()) return parse_slices(l.net, o.slices);
  if (o.target > 0) return slice_tree(l.tree, o.target, {finder_pool(o)}).indices;
  return {};
}

inline Json cmd_cost(const Options& o) {
  const auto l = load(o);
  auto j = header("cost", o);
  j["inputs"] = l.inputs;
  const auto base = tree_cost(l.tree);
  const auto s = parse_slices(l.net, o.slices);
  const auto c = sliced_cost(l.tree, s);
  j["slices"] = label_list(l.net, s);
  j["log2_flops"] = c.log2_time_total;
  j["flops"] = c.time_total.to_string();
  j["log2_peak_rank"] = c.log2_memory_peak;
  j["overhead"] = base.time_total.is_zero() ? 1.0 : ratio(c.time_total, base.time_total);
  j["unsliced_log2_flops"] = base.log2_time_total;
  j["per_node_log2"] = c.per_node_log2;
  return j;
}

inline Json cmd_lifetimes(const Options& o) {
  const auto l = load(o);
  auto j = header("lifetimes", o);
  j["inputs"] = l.inputs;
  Json list = Json::array();
  for (const auto& [e, lf] : all_lifetimes(l.tree)) {
    Json x;
    x["index"] = l.net.label(e);
    x["open"] = l.net.edge(e).open();
    x["tree_edges"] = lf.tree_edges;
    x["ends"] = {lf.ends[0] == EndKind::kLeaf ? "leaf" : "root",
                 lf.ends[1] == EndKind::kLeaf ? "leaf" : "root"};
    x["correlated_nodes"] = lf.nodes;
    list.push_back(std::move(x));
  }
  j["lifetimes"] = std::move(list);
  return j;
}

inline Json cmd_stem(const Options& o) {
  const auto l = load(o);
  auto j = header("stem", o);
  j["inputs"] = l.inputs;
  const auto stem = extract_stem(l.tree);
  j["tensors"] = stem.tensors;
  j["branches"] = stem.branches;
  j["node_costs_log2"] = stem.node_costs;
  j["stem_flops"] = stem.total_cost.to_string();
  j["total_flops"] = tree_cost(l.tree).time_total.to_string();
  Json iv = Json::array();
  for (const auto& [e, r] : restrict_lifetimes(l.tree, stem))
    iv.push_back({{"index", l.net.label(e)}, {"first", r.first}, {"last", r.last}});
  j["intervals"] = std::move(iv);
  return j;
}

inline Json cmd_slice(const Options& o) {
  const auto l = load(o);
  auto j = header("slice", o);
  j["inputs"] = l.inputs;
  j["finder_pool"] = o.finder_pool;
  const auto s = slice_tree(l.tree, require_target(o), {finder_pool(o)});
  j.update(slice_json(l.tree, s));
  return j;
}

inline AnnealConfig anneal_config(const Options& o) {
  AnnealConfig c;
  c.t_initial = o.t_initial;
  c.t_final = o.t_final;
  c.alpha = o.alpha;
  c.seed = o.seed;
  c.max_outer_iters = o.max_iters;
  c.validate();
  return c;
}

inline Json cmd_refine(const Options& o) {
  const auto l = load(o);
  const int t = require_target(o);
  const auto cfg = anneal_config(o);
  auto j = header("refine", o);
  j["inputs"] = l.inputs;
  j["seed"] = o.seed;
  j["anneal"] = {{"t_initial", cfg.t_initial}, {"t_final", cfg.t_final}, {"alpha", cfg.alpha},
                 {"max_outer_iters", cfg.max_outer_iters}, {"chains", o.chains}};
  const SliceSet initial =
      o.slices.empty() ? slice_tree(l.tree, t, {finder_pool(o)})
                       : SliceSet{parse_slices(l.net, o.slices), t, Provenance::kManual};
  const auto r = refine_chains(l.tree, initial, t, cfg, o.chains, o.workers);
  j["initial"] = slice_json(l.tree, initial);
  j.update(slice_json(l.tree, r.slices));
  j["stats"] = {{"outer_iterations", r.stats.outer_iterations},
                {"evaluations", r.stats.evaluations},
                {"accepted", r.stats.accepted},
                {"uphill_accepted", r.stats.uphill_accepted},
                {"best_found_at", r.stats.best_found_at}};
  return j;
}

inline MemoryLevelModel memory_model(const Options& o) {
  MemoryLevelModel m;
  const double scratch = std::ldexp(static_cast<double>(o.element_bytes), o.capacity);
  m.levels = {{"main", std::max(scratch * 2, 1e15), o.bandwidth},
              {"scratchpad", scratch, o.bandwidth * 8}};
  m.peak_flops = o.peak_flops;
  m.element_bytes = o.element_bytes;
  return m;
}

inline Json fusion_json(const TensorNetwork& net, const FusedPlan& plan) {
  Json groups = Json::array();
  for (const auto& g : plan.groups)
    groups.push_back({{"steps", {g.first_step, g.last_step}},
                      {"secondary_slices", label_list(net, g.secondary_slices)},
                      {"resident_rank", g.resident_rank},
                      {"subtasks", g.subtasks},
                      {"transfers_in", {{"count", g.transfers_in()}, {"log2_elements", g.load_rank - static_cast<int>(g.secondary_slices.size())}}},
                      {"transfers_out", {{"count", g.transfers_out()}, {"log2_elements", g.store_rank - static_cast<int>(g.secondary_slices.size())}}}});
  Json j;
  j["capacity"] = plan.capacity;
  j["process_slices"] = label_list(net, plan.process_slices);
  j["steps"] = plan.steps;
  j["groups"] = std::move(groups);
  j["dma_saved"] = plan.dma_saved;
  j["baseline_transfers"] = plan.baseline_transfers();
  j["fused_transfers"] = plan.fused_transfers();
  return j;
}

inline Json cmd_fuse(const Options& o) {
  const auto l = load(o);
  auto j = header("fuse", o);
  j["inputs"] = l.inputs;
  const auto stem = extract_stem(l.tree);
  const auto plan =
      plan_fusion(l.tree, stem, restrict_lifetimes(l.tree, stem), o.capacity, process_slices(l, o));
  j["plan"] = fusion_json(l.net, plan);
  const auto r = fused_cost_model(l.tree, stem, plan, memory_model(o), o.granularity);
  j["cost_model"] = {{"flops", r.flops},
                     {"bytes_moved", r.bytes_moved},
                     {"arithmetic_intensity", r.arithmetic_intensity},
                     {"baseline_bytes_moved", r.baseline_bytes_moved},
                     {"baseline_arithmetic_intensity", r.baseline_arithmetic_intensity},
                     {"compute_bound_threshold", r.compute_bound_threshold},
                     {"compute_bound", r.compute_bound},
                     {"degenerate", r.degenerate},
                     {"workers", r.workers},
                     {"subtasks_per_worker", r.subtasks_per_worker}};
  return j;
}

/// Order-independent digest of a result tensor for reports.
inline Json tensor_summary(const TensorNetwork& net, const DenseTensor& t) {
  Scalar sum = 0;
  double norm2 = 0;
  for (const auto& x : t.data) {
    sum += x;
    norm2 += std::norm(x);
  }
  Json j;
  j["indices"] = label_list(net, IndexSet(t.order.begin(), t.order.end()));
  j["elements"] = t.data.size();
  j["sum"] = {sum.real(), sum.imag()};
  j["norm"] = std::sqrt(norm2);
  return j;
}

inline Json cmd_exec(const Options& o, std::ostream& out) {
  const auto l = load(o);
  ExecOptions eo;
  eo.workers = o.workers;
  eo.force = o.force;
  eo.max_flops = default_flop_limit();
  const auto inputs =
      o.inputs.empty() ? random_inputs(l.net, o.seed) : read_tensor_manifest(l.net, o.inputs);
  const auto s = process_slices(l, o);
  auto j = header("exec", o);
  j["inputs"] = l.inputs;
  if (o.inputs.empty()) j["seed"] = o.seed;
  j["slices"] = label_list(l.net, s);

  ExecResult run;
  if (o.fused) {
    const auto stem = extract_stem(l.tree);
    const auto plan = plan_fusion(l.tree, stem, restrict_lifetimes(l.tree, stem), o.capacity, s);
    const auto f = execute_fused(l.tree, stem, plan, inputs, eo);
    run = ExecResult{f.result, f.flops};
    j["fusion"] = fusion_json(l.net, plan);
    Json ledger = Json::array();
    for (const auto& g : f.ledger.groups)
      ledger.push_back({{"loads", g.loads}, {"stores", g.stores}, {"subtasks", g.subtasks},
                        {"max_resident_rank", g.max_resident_rank}});
    j["transfer_ledger"] = {{"groups", ledger},
                            {"per_subtask_group", f.ledger.per_subtask_group()},
                            {"baseline_per_stem_pass", f.ledger.baseline_per_stem_pass()},
                            {"fused_per_stem_pass", f.ledger.fused_per_stem_pass()}};
  } else {
    run = contract_sliced(l.tree, s, inputs, eo);
  }
  const auto predicted = sliced_cost(l.tree, s).time_total;
  j["flops_measured"] = run.flops.scalar_multiplies.to_string();
  j["flops_predicted"] = predicted.to_string();
  j["flops_match"] = run.flops.scalar_multiplies == predicted;
  j["result"] = tensor_summary(l.net, run.result);

  if (o.verify) {
    const auto full = contract_full(l.tree, inputs, eo);
    const double measured = ratio(run.flops.scalar_multiplies, full.flops.scalar_multiplies);
    const double expected = overhead(l.tree, s);
    const double err = relative_error(run.result, full.result);
    const bool flops_ok = measured == expected;
    const bool full_ok = full.flops.scalar_multiplies == tree_cost(l.tree).time_total;
    j["verify"] = {{"overhead_measured", measured},
                   {"overhead_predicted", expected},
                   {"unsliced_flops_match", full_ok},
                   {"max_relative_error", err},
                   {"within_tolerance", err <= 1e-10}};
    out << "overhead_measured == overhead_predicted: " << (flops_ok && full_ok ? "true" : "false")
        << "\n";
    if (!(flops_ok && full_ok && err <= 1e-10))
      throw InvariantError("exec --verify: executor disagrees with the cost model");
  }
  return j;
}

inline Json cmd_audit(const Options& o) {
  auto j = header("audit theorem1", o);
  const int want = o.instances > 0 ? o.instances : 50;
  j["seed"] = o.seed;
  j["instances_requested"] = want;
  j["max_pool"] = o.max_pool;
  Json list = Json::array();
  int sets = 0, counter = 0, strict = 0, used = 0;
  for (std::uint64_t k = 0; used < want && k < static_cast<std::uint64_t>(want) * 50; ++k) {
    const std::uint64_t seed = o.seed + k;
    const auto inst = slicing_instance(seed, o.min_vertices, o.max_vertices);
    const auto tree = build_tree(inst.network, inst.path);
    if (static_cast<int>(slicing_candidates(tree, inst.target).size()) > o.max_pool) continue;
    const auto ex = exhaustive_slicer(tree, inst.target, o.max_pool);
    const auto a = audit_smaller_set(ex);
    ++used;
    sets += a.sets_checked;
    counter += a.counterexamples;
    strict += a.strict_failures;
    list.push_back({{"seed", seed}, {"vertices", inst.network.num_vertices()},
                    {"target", inst.target}, {"pool", ex.pool.size()},
                    {"valid_sets", ex.landscape.size()}, {"sets_checked", a.sets_checked},
                    {"counterexamples_le", a.counterexamples},
                    {"counterexamples_lt", a.strict_failures}});
  }
  j["instances"] = used;
  j["sets_checked"] = sets;
  j["counterexamples_le"] = counter;
  j["counterexamples_lt"] = strict;
  j["per_instance"] = std::move(list);
  return j;
}

struct BenchRow {
  std::uint64_t seed = 0;
  int vertices = 0, target = 0;
  std::size_t finder_size = 0, refined_size = 0, greedy_size = 0;
  double finder_overhead = 0, refined_overhead = 0, greedy_overhead = 0;
  double optimum_overhead = -1;  // -1 when the pool is too large
};

inline BenchRow bench_one(std::uint64_t seed, const Options& o) {
  const auto inst = slicing_instance(seed, o.min_vertices, o.max_vertices);
  const auto tree = build_tree(inst.network, inst.path);
  BenchRow r;
  r.seed = seed;
  r.vertices = static_cast<int>(inst.network.num_vertices());
  r.target = inst.target;
  const auto f = slice_tree(tree, inst.target, {finder_pool(o)});
  AnnealConfig cfg = anneal_config(o);
  cfg.seed = seed;
  const auto ref = refine_chains(tree, f, inst.target, cfg, o.chains, 1);
  const auto g = greedy_slicer(tree, inst.target);
  r.finder_size = f.size();
  r.finder_overhead = overhead(tree, f);
  r.refined_size = ref.slices.size();
  r.refined_overhead = ref.overhead;
  r.greedy_size = g.size();
  r.greedy_overhead = overhead(tree, g);
  if (static_cast<int>(slicing_candidates(tree, inst.target).size()) <= o.max_pool)
    r.optimum_overhead = exhaustive_slicer(tree, inst.target, o.max_pool).optimum_overhead;
  return r;
}

/// With --leaves-fit, seeds whose target is below some input tensor's rank
/// are skipped.
inline std::vector<std::uint64_t> bench_seeds(const Options& o) {
  const int n = o.instances > 0 ? o.instances : 200;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = o.seed; static_cast<int>(seeds.size()) < n; ++s) {
    if (o.leaves_fit) {
      const auto inst = slicing_instance(s, o.min_vertices, o.max_vertices);
      const auto tree = build_tree(inst.network, inst.path);
      bool fits = true;
      for (int t = 0; t < tree.num_leaves(); ++t) fits = fits && tree.rank(t) <= inst.target;
      if (!fits) continue;
    }
    seeds.push_back(s);
  }
  return seeds;
}

inline std::vector<BenchRow> bench_rows(const Options& o) {
  const auto seeds = bench_seeds(o);
  std::vector<BenchRow> rows(seeds.size());
  detail::parallel_for(seeds.size(), o.workers,
                       [&](std::uint64_t k) { rows[k] = bench_one(seeds[k], o); });
  return rows;
}

inline std::string cmd_bench(const Options& o) {
  const auto rows = bench_rows(o);
  int le = 0, smaller = 0, exhaustive = 0, optimal = 0;
  for (const auto& r : rows) {
    le += r.refined_overhead <= r.greedy_overhead;
    smaller += r.finder_size <= r.greedy_size;
    if (r.optimum_overhead >= 0) {
      ++exhaustive;
      optimal += r.refined_overhead == r.optimum_overhead;
    }
  }
  std::ostringstream os;
  os << std::setprecision(17);
  if (o.format == "csv") {
    os << "seed,vertices,target,finder_size,finder_overhead,refined_size,refined_overhead,"
          "greedy_size,greedy_overhead,optimum_overhead\n";
    for (const auto& r : rows)
      os << r.seed << ',' << r.vertices << ',' << r.target << ',' << r.finder_size << ','
         << r.finder_overhead << ',' << r.refined_size << ',' << r.refined_overhead << ','
         << r.greedy_size << ',' << r.greedy_overhead << ','
         << (r.optimum_overhead >= 0 ? std::to_string(r.optimum_overhead) : std::string("")) << "\n";
    return os.str();
  }
  if (o.format != "json") throw ValidationError("--format must be 'json' or 'csv'");
  auto j = header("bench slicers", o);
  j["seed"] = o.seed;
  j["leaves_fit"] = o.leaves_fit;
  j["instances"] = rows.size();
  j["refined_overhead_le_greedy"] = le;
  j["finder_size_le_greedy"] = smaller;
  j["exhaustively_checked"] = exhaustive;
  j["refined_equals_optimum"] = optimal;
  Json list = Json::array();
  for (const auto& r : rows)
    list.push_back({{"seed", r.seed}, {"vertices", r.vertices}, {"target", r.target},
                    {"finder_size", r.finder_size}, {"finder_overhead", r.finder_overhead},
                    {"refined_size", r.refined_size}, {"refined_overhead", r.refined_overhead},
                    {"greedy_size", r.greedy_size}, {"greedy_overhead", r.greedy_overhead},
                    {"optimum_overhead", r.optimum_overhead >= 0 ? Json(r.optimum_overhead) : Json()}});
  j["rows"] = std::move(list);
  return j.dump(2) + "\n";
}

inline void add_common(CLI::App* c, Options& o, bool path = true) {
  c->add_option("--net", o.net, "network JSON file")->required();
  if (path) c->add_option("--path", o.path, "SSA path JSON file")->required();
  c->add_option("--out", o.out, "report file (default: stdout)");
  c->add_flag("--timestamps", o.timestamps, "add a generation time to the report");
}

inline void add_anneal(CLI::App* c, Options& o) {
  c->add_option("--t-initial", o.t_initial, "initial temperature");
  c->add_option("--t-final", o.t_final, "final temperature");
  c->add_option("--alpha", o.alpha, "cooling factor in (0, 1)");
  c->add_option("--max-iters", o.max_iters, "outer iteration cap");
  c->add_option("--chains", o.chains, "independent annealing chains")->check(CLI::PositiveNumber);
}

/// Runs the tool; `out` receives reports without --out, `err` diagnostics.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Lifetime-based slicing planner for tensor network contraction"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  auto* cost = app.add_subcommand("cost", "time and memory of a (sliced) contraction");
  add_common(cost, o);
  cost->add_option("--slices", o.slices, "comma-separated sliced index labels");
  auto* lifetimes = app.add_subcommand("lifetimes", "lifetime of every index");
  add_common(lifetimes, o);
  auto* stem = app.add_subcommand("stem", "heaviest leaf-to-root path and its intervals");
  add_common(stem, o);
  auto* slice = app.add_subcommand("slice", "lifetime-guided slice finder");
  add_common(slice, o);
  slice->add_option("--target", o.target, "memory target rank")->required();
  slice->add_option("--finder-pool", o.finder_pool, "candidate pool: local or global");
  auto* refine_cmd = app.add_subcommand("refine", "simulated-annealing slice refiner");
  add_common(refine_cmd, o);
  refine_cmd->add_option("--target", o.target, "memory target rank")->required();
  refine_cmd->add_option("--slices", o.slices, "initial slicing set (default: finder)");
  refine_cmd->add_option("--seed", o.seed, "random seed");
  refine_cmd->add_option("--finder-pool", o.finder_pool, "candidate pool for the initial set");
  refine_cmd->add_option("--workers", o.workers, "threads for the chains")->check(CLI::PositiveNumber);
  add_anneal(refine_cmd, o);
  auto* fuse = app.add_subcommand("fuse", "fused-kernel plan for the stem");
  add_common(fuse, o);
  fuse->add_option("--capacity", o.capacity, "scratchpad rank capacity")->check(CLI::PositiveNumber);
  fuse->add_option("--slices", o.slices, "process-level sliced labels");
  fuse->add_option("--target", o.target, "process-level target (runs the finder)");
  fuse->add_option("--finder-pool", o.finder_pool, "candidate pool: local or global");
  fuse->add_option("--peak-flops", o.peak_flops, "machine peak for the roofline");
  fuse->add_option("--bandwidth", o.bandwidth, "main memory bandwidth in bytes/s");
  fuse->add_option("--granularity", o.granularity, "minimum transfer size in bytes");
  fuse->add_option("--element-bytes", o.element_bytes, "bytes per tensor element");
  auto* exec = app.add_subcommand("exec", "run the dense reference executor");
  add_common(exec, o);
  exec->add_option("--inputs", o.inputs, "tensor manifest (default: seeded random tensors)");
  exec->add_option("--seed", o.seed, "seed for random tensors");
  exec->add_option("--slices", o.slices, "sliced labels");
  exec->add_option("--target", o.target, "slice with the finder at this target");
  exec->add_option("--finder-pool", o.finder_pool, "candidate pool: local or global");
  exec->add_option("--workers", o.workers, "threads for subtasks")->check(CLI::PositiveNumber);
  exec->add_option("--capacity", o.capacity, "scratchpad rank capacity for --fused");
  exec->add_flag("--fused", o.fused, "execute the stem with the fused plan");
  exec->add_flag("--verify", o.verify, "compare against the unsliced run and the cost model");
  exec->add_flag("--force", o.force, "ignore the flop guard");
  auto* audit = app.add_subcommand("audit", "landscape audits");
  auto* smaller_set = audit->add_subcommand("theorem1", "smaller-set overhead audit");
  audit->require_subcommand(1);
  auto* bench = app.add_subcommand("bench", "benchmarks");
  auto* slicers = bench->add_subcommand("slicers", "finder + refiner versus greedy");
  bench->require_subcommand(1);
  for (auto* c : {smaller_set, slicers}) {
    c->add_option("--instances", o.instances, "number of instances")->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed, "first instance seed");
    c->add_option("--min-vertices", o.min_vertices, "smallest network");
    c->add_option("--max-vertices", o.max_vertices, "largest network");
    c->add_option("--max-pool", o.max_pool, "largest candidate pool searched exhaustively");
    c->add_option("--out", o.out, "report file (default: stdout)");
    c->add_flag("--timestamps", o.timestamps, "add a generation time to the report");
  }
  slicers->add_option("--format", o.format, "json or csv");
  slicers->add_flag("--leaves-fit", o.leaves_fit, "only instances whose inputs fit the target");
  slicers->add_option("--workers", o.workers, "threads over instances")->check(CLI::PositiveNumber);
  slicers->add_option("--finder-pool", o.finder_pool, "candidate pool: local or global");
  add_anneal(slicers, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    std::string report;
    if (*cost) report = cmd_cost(o).dump(2) + "\n";
    else if (*lifetimes) report = cmd_lifetimes(o).dump(2) + "\n";
    else if (*stem) report = cmd_stem(o).dump(2) + "\n";
    else if (*slice) report = cmd_slice(o).dump(2) + "\n";
    else if (*refine_cmd) report = cmd_refine(o).dump(2) + "\n";
    else if (*fuse) report = cmd_fuse(o).dump(2) + "\n";
    else if (*exec) report = cmd_exec(o, out).dump(2) + "\n";
    else if (*smaller_set) report = cmd_audit(o).dump(2) + "\n";
    else if (*slicers) report = cmd_bench(o);
    if (o.out.empty()) {
      out << report;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      f << report;
      if (!f) throw ValidationError("cannot write '" + o.out + "'");
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }
}

}  // namespace tnslicer::cli

#endif  // TNSLICER_TOOLS_CLI_HPP_
