#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynppr/embed.hpp"
#include "dynppr/errors.hpp"
#include "dynppr/event_io.hpp"
#include "dynppr/hash_kernel.hpp"
#include "dynppr/ppr_opt.hpp"
#include "dynppr/ppr_oracle.hpp"
#include "dynppr/synth.hpp"
#include "dynppr/track.hpp"

namespace {

using namespace dynppr;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

void report_error(const Error& e) {
  nlohmann::json rec;
  rec["error"] = error_code_name(e.code());
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    rec["line"] = pe->line();
    rec["reason"] = pe->reason();
  } else {
    rec["message"] = e.what();
  }
  std::cerr << rec.dump() << '\n';
}

std::string format_double(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open subset file " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

// Dictionary file: one "id<TAB>label" line per node, ids dense from 0.
void load_dictionary(const std::string& path, NodeDictionary& dict) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "dictionary line needs id<TAB>label");
    const std::string label = line.substr(tab + 1);
    if (std::to_string(dict.intern(label)) != line.substr(0, tab)) {
      throw ParseError(lineno, "dictionary ids must be dense and in order");
    }
  }
}

void save_dictionary(const std::string& path, const NodeDictionary& dict) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write dictionary " + path);
  for (NodeId i = 0; i < dict.size(); ++i) out << i << '\t' << dict.label(i) << '\n';
}

// Opens an output stream, or returns null when no path was requested.
std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*out) throw Error(ErrorCode::kConfig, "cannot open output " + path);
  return out;
}

struct TrackOptions {
  std::string input;
  std::string dict;
  std::size_t batch_size = 0;
  std::string cuts;
  std::string subset;
  std::string subset_file;
  double alpha = 0.15;
  double epsilon = 0.1;
  bool adaptive = true;
  std::string adaptive_scale = "volume";
  std::size_t dim = 512;
  std::uint64_t seed = 0;
  std::string solver = "push";
  std::string embeddings;
  std::string report;
  bool work_counter = false;
  bool double_precision = false;
  double min_degree_change = 10.0;
};

int run_track(const TrackOptions& o) {
  const bool string_ids = !o.dict.empty();
  std::vector<std::string> labels = split_list(o.subset);
  if (!o.subset_file.empty()) {
    const auto more = read_label_file(o.subset_file);
    labels.insert(labels.end(), more.begin(), more.end());
  }
  if (labels.empty()) throw Error(ErrorCode::kConfig, "tracked subset is empty");
  if ((o.batch_size == 0) == o.cuts.empty()) {
    throw Error(ErrorCode::kConfig, "give exactly one of --batch-size or --cuts");
  }

  NodeDictionary dict;
  if (string_ids) load_dictionary(o.dict, dict);
  const auto events = read_events_file(o.input, string_ids ? IdMode::kString : IdMode::kInteger, dict);

  SnapshotSchedule schedule = SnapshotSchedule::by_event_count(std::max<std::size_t>(o.batch_size, 1));
  if (!o.cuts.empty()) {
    std::vector<std::int64_t> cuts;
    for (const std::string& c : split_list(o.cuts)) {
      std::int64_t v = 0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc{} || res.ptr != c.data() + c.size()) {
        throw Error(ErrorCode::kConfig, "bad cut value '" + c + "'");
      }
      cuts.push_back(v);
    }
    schedule = SnapshotSchedule::by_timestamp_cuts(std::move(cuts));
  }
  const std::vector<EventBatch> batches = schedule.split(events);

  TrackerConfig cfg;
  cfg.dim = o.dim;
  cfg.seed = o.seed;
  cfg.ppr.alpha = o.alpha;
  cfg.ppr.epsilon = o.epsilon;
  cfg.ppr.adaptive = o.adaptive;
  if (o.adaptive_scale == "edges") {
    cfg.ppr.scale = AdaptiveScale::kEdgeCount;
  } else if (o.adaptive_scale != "volume") {
    throw Error(ErrorCode::kConfig, "adaptive-scale must be volume or edges");
  }
  if (o.solver == "ista") {
    cfg.solver = PprSolver::kIsta;
  } else if (o.solver != "push") {
    throw Error(ErrorCode::kConfig, "solver must be push or ista");
  }
  // Labels absent from the stream get ids past every stream node, so they
  // never become present and produce no records.
  for (const std::string& label : labels) {
    if (!string_ids) {
      std::uint64_t v = 0;
      const auto res = std::from_chars(label.data(), label.data() + label.size(), v);
      if (res.ec != std::errc{} || res.ptr != label.data() + label.size()) {
        throw Error(ErrorCode::kConfig, "subset id '" + label + "' is not an integer");
      }
      cfg.subset.push_back(dict.intern(std::to_string(v)));
    } else {
      cfg.subset.push_back(dict.intern(label));
    }
  }
  DynamicPpe tracker(cfg);

  auto emb_out = open_output(o.embeddings);
  auto rep_out = open_output(o.report);
  const int digits = o.double_precision ? 17 : 9;

  // Records are ordered by label: numerically for integer ids.
  auto label_less = [&](NodeId a, NodeId b) {
    const std::string& la = dict.label(a);
    const std::string& lb = dict.label(b);
    if (!string_ids && la.size() != lb.size()) return la.size() < lb.size();
    return la < lb;
  };

  if (emb_out) {
    *emb_out << "t\tnode";
    for (std::size_t j = 0; j < cfg.dim; ++j) *emb_out << "\tv" << j;
    *emb_out << '\n';
    emb_out->flush();
  }
  if (rep_out) {
    *rep_out << "t\tnode\tdegree\tdelta_degree\tmovement\tzscore\n";
    rep_out->flush();
  }
  if (o.work_counter) std::cout << "t\tevents\tepsilon\tpushes\tvolume\n";

  std::vector<TrackedSample> previous;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    SnapshotResult snap = b == 0 ? tracker.initialize(batches[0]) : tracker.advance(batches[b]);
    const std::size_t t = snap.snapshot;
    const Graph& g = tracker.graph();
    std::sort(snap.embeddings.begin(), snap.embeddings.end(),
              [&](const Embedding& x, const Embedding& y) { return label_less(x.node, y.node); });

    std::vector<TrackedSample> current;
    for (const Embedding& e : snap.embeddings) current.push_back({e.node, g.degree_of(e.node), e.values});

    if (o.work_counter) {
      PushStats total;
      for (const PushStats& s : snap.work.per_source) total += s;
      std::cout << t << '\t' << snap.work.events << '\t' << format_double(snap.work.epsilon, 9) << '\t'
                << total.pushes << '\t' << format_double(total.volume, 9) << '\n';
    }
    // The first batch only builds the initial graph.
    if (t == 0) {
      previous = std::move(current);
      continue;
    }
    // Each snapshot is formatted in full before it is written.
    if (emb_out) {
      std::string buf;
      for (const Embedding& e : snap.embeddings) {
        buf += std::to_string(t) + '\t' + dict.label(e.node);
        for (double v : e.values) buf += '\t' + format_double(v, digits);
        buf += '\n';
      }
      *emb_out << buf;
      emb_out->flush();
    }
    if (rep_out && t >= 2) {
      const ChangeReport rep = build_change_report(t, previous, current, o.min_degree_change);
      std::string buf;
      for (const ChangeRow& r : rep.rows) {
        buf += std::to_string(t) + '\t' + dict.label(r.node) + '\t' + format_double(r.degree, digits) + '\t' +
               format_double(r.degree_change, digits) + '\t' + format_double(r.movement, digits) + '\t' +
               format_double(r.z_score, digits) + '\n';
      }
      *rep_out << buf;
      rep_out->flush();
    }
    previous = std::move(current);
  }
  if (string_ids) save_dictionary(o.dict, dict);
  return kExitOk;
}

struct CompareOptions {
  std::string input;
  std::string sources;
  double alpha = 0.15;
  double epsilon = 1e-6;
  double power_tol = 1e-12;
};

std::pair<double, double> gaps(const std::vector<double>& a, const std::vector<double>& b) {
  double l1 = 0.0, linf = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    l1 += d;
    linf = std::max(linf, d);
  }
  return {l1, linf};
}

std::vector<double> densify(const SparseVector& v, std::size_t n) {
  std::vector<double> out(n, 0.0);
  v.for_each([&](NodeId i, double x) { out[i] = x; });
  return out;
}

int run_compare(const CompareOptions& o) {
  NodeDictionary dict;
  const auto events = read_events_file(o.input, IdMode::kInteger, dict);
  Graph g;
  g.apply_events(events);
  const DenseOracle oracle(g, o.alpha);
  const std::size_t n = g.node_count();

  std::vector<NodeId> sources;
  if (o.sources.empty()) {
    for (NodeId i = 0; i < std::min<std::size_t>(n, 10); ++i) sources.push_back(i);
  } else {
    for (const std::string& label : split_list(o.sources)) {
      const auto id = dict.find(label);
      if (!id) throw Error(ErrorCode::kUnknownNode, "source " + label + " is not in the graph");
      sources.push_back(*id);
    }
  }

  std::cout << "source\tpush_dense_l1\tpush_dense_linf\tista_dense_l1\tista_dense_linf"
               "\tpower_dense_l1\tpower_dense_linf\tpush_ista_l1\tpush_ista_linf\n";
  for (NodeId s : sources) {
    const auto dense = oracle.ppr(s);
    PprState st = PprState::fresh(s);
    forward_push(g, st, PushConfig{o.alpha, o.epsilon});
    const auto push = densify(st.estimate, n);
    IstaOptions io;
    io.alpha = o.alpha;
    io.epsilon = ista_epsilon_for_push(o.epsilon, o.alpha);
    const auto ista = densify(ista_solve(g, s, io).ppr(g), n);
    const auto power = ppr_power_iteration(g, s, o.alpha, o.power_tol).ppr;
    std::cout << dict.label(s);
    for (const auto& [l1, linf] : {gaps(push, dense), gaps(ista, dense), gaps(power, dense), gaps(push, ista)}) {
      std::cout << '\t' << format_double(l1, 6) << '\t' << format_double(linf, 6);
    }
    std::cout << '\n';
  }
  return kExitOk;
}

struct SynthOptions {
  std::string generator = "er";
  std::size_t nodes = 100;
  std::size_t batches = 10;
  std::size_t batch_size = 50;
  double deletion_fraction = 0.0;
  std::uint64_t seed = 0;
  std::int64_t shock_node = -1;
  std::size_t shock_batch = 0;
  double shock_factor = 3.0;
  double rewire_fraction = 0.5;
  std::string output;
  std::string label;
};

int run_synth(const SynthOptions& o) {
  StreamSpec spec;
  if (o.generator == "er") {
    spec.generator = Generator::kErdosRenyiGrowth;
  } else if (o.generator == "pa") {
    spec.generator = Generator::kPreferentialAttachment;
  } else if (o.generator == "shock") {
    spec.generator = Generator::kShockInjection;
  } else {
    throw Error(ErrorCode::kConfig, "generator must be er, pa or shock");
  }
  spec.nodes = o.nodes;
  spec.batches = o.batches;
  spec.batch_size = o.batch_size;
  spec.deletion_fraction = o.deletion_fraction;
  spec.seed = o.seed;
  if (o.shock_node >= 0) spec.shock.node = static_cast<NodeId>(o.shock_node);
  spec.shock.batch = o.shock_batch;
  spec.shock.factor = o.shock_factor;
  spec.shock.rewire_fraction = o.rewire_fraction;
  const GeneratedStream stream = generate(spec);

  std::ostringstream buf;
  std::vector<EdgeEvent> flat;
  for (const EventBatch& b : stream.batches) flat.insert(flat.end(), b.begin(), b.end());
  write_events(buf, flat);
  if (o.output.empty()) {
    std::cout << buf.str();
  } else {
    auto out = open_output(o.output);
    *out << buf.str();
  }
  if (stream.shocked_node) {
    const std::string line = "shocked_node\t" + std::to_string(*stream.shocked_node) + "\tbatch\t" +
                             std::to_string(stream.shock_batch) + '\n';
    if (o.label.empty()) {
      std::cerr << line;
    } else {
      *open_output(o.label) << line;
    }
  }
  return kExitOk;
}

struct AuditOptions {
  std::size_t dim = 512;
  std::uint64_t seed = 0;
  std::size_t ids = 1000000;
  double significance = 0.001;
};

int run_hash_audit(const AuditOptions& o) {
  if (o.dim == 0) throw Error(ErrorCode::kConfig, "dimension must be >= 1");
  const HashAuditResult r = audit_hash_kernel(HashKernel(o.dim, o.seed), o.ids, o.significance);
  std::cout << "ids\t" << r.ids << '\n'
            << "chi_square\t" << format_double(r.chi_square, 9) << '\n'
            << "chi_square_critical\t" << format_double(r.chi_square_critical, 9) << '\n'
            << "chi_square_p_value\t" << format_double(r.chi_square_p_value, 9) << '\n'
            << "buckets_uniform\t" << (r.buckets_uniform ? "yes" : "no") << '\n'
            << "positive_signs\t" << r.positive_signs << '\n'
            << "sign_z\t" << format_double(r.sign_z, 9) << '\n'
            << "sign_z_critical\t" << format_double(r.sign_z_critical, 9) << '\n'
            << "signs_balanced\t" << (r.signs_balanced ? "yes" : "no") << '\n';
  return r.passed() ? kExitOk : kExitRuntime;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

// Turns each key=value line of a --config file into a --key=value argument
// placed before the user's own, so explicit flags (parsed later, last value
// wins) take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file " + path);
  std::vector<std::string> extra;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") continue;
    extra.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic personalized PageRank embeddings over edge-event streams"};
  app.require_subcommand(1);

  TrackOptions track;
  CLI::App* t = app.add_subcommand("track", "Maintain embeddings for a tracked subset and report changes");
  std::string config_path;
  t->add_option("--config", config_path, "key=value file; command-line flags take precedence");
  t->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  t->add_option("--input", track.input, "Event file")->required();
  t->add_option("--dict", track.dict, "Dictionary file; enables string node ids");
  t->add_option("--batch-size", track.batch_size, "Events per snapshot");
  t->add_option("--cuts", track.cuts, "Comma-separated timestamp cuts");
  t->add_option("--subset", track.subset, "Comma-separated tracked node ids");
  t->add_option("--subset-file", track.subset_file, "File with one tracked node id per line");
  t->add_option("--alpha", track.alpha, "Teleport probability")->capture_default_str();
  t->add_option("--epsilon", track.epsilon, "Global precision")->capture_default_str();
  t->add_flag("--adaptive,!--no-adaptive", track.adaptive, "Scale the push precision with the graph (default on)");
  t->add_option("--adaptive-scale", track.adaptive_scale, "volume (sum of degrees) or edges")
      ->capture_default_str();
  t->add_option("--dim", track.dim, "Embedding dimension")->capture_default_str();
  t->add_option("--seed", track.seed, "Hash seed")->capture_default_str();
  t->add_option("--solver", track.solver, "push or ista")->capture_default_str();
  t->add_option("--embeddings", track.embeddings, "Embedding TSV output");
  t->add_option("--report", track.report, "Change report TSV output");
  t->add_flag("--work-counter", track.work_counter, "Print per-snapshot push work to stdout");
  t->add_flag("--double-precision", track.double_precision, "Write 17 significant digits");
  t->add_option("--min-degree-change", track.min_degree_change,
                "Report only rows with |degree change| above this")
      ->capture_default_str();

  CompareOptions compare;
  CLI::App* c = app.add_subcommand("compare", "Gaps between push, ISTA, power iteration and dense solve");
  c->add_option("--input", compare.input, "Event file")->required();
  c->add_option("--sources", compare.sources, "Comma-separated source ids (default: first 10)");
  c->add_option("--alpha", compare.alpha)->capture_default_str();
  c->add_option("--epsilon", compare.epsilon)->capture_default_str();
  c->add_option("--power-tol", compare.power_tol)->capture_default_str();

  SynthOptions synth;
  CLI::App* s = app.add_subcommand("synth", "Generate a synthetic event stream");
  s->add_option("--generator", synth.generator, "er, pa or shock")->capture_default_str();
  s->add_option("--nodes", synth.nodes)->capture_default_str();
  s->add_option("--batches", synth.batches)->capture_default_str();
  s->add_option("--batch-size", synth.batch_size)->capture_default_str();
  s->add_option("--deletion-fraction", synth.deletion_fraction)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--shock-node", synth.shock_node, "Default: random early node");
  s->add_option("--shock-batch", synth.shock_batch, "Default: batches / 2");
  s->add_option("--shock-factor", synth.shock_factor)->capture_default_str();
  s->add_option("--rewire-fraction", synth.rewire_fraction)->capture_default_str();
  s->add_option("--output", synth.output, "Event file (default stdout)");
  s->add_option("--label", synth.label, "Shock label file (default stderr)");

  AuditOptions audit;
  CLI::App* h = app.add_subcommand("hash-audit", "Distribution tests for the hash kernel");
  h->add_option("--dim", audit.dim)->capture_default_str();
  h->add_option("--seed", audit.seed)->capture_default_str();
  h->add_option("--ids", audit.ids)->capture_default_str();
  h->add_option("--significance", audit.significance)->capture_default_str();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::vector<char*> ptrs;
    for (std::string& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const Error& e) {
    report_error(e);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (t->parsed()) return run_track(track);
    if (c->parsed()) return run_compare(compare);
    if (s->parsed()) return run_synth(synth);
    if (h->parsed()) return run_hash_audit(audit);
  } catch (const Error& e) {
    report_error(e);
    const bool config = e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kInvalidArgument;
    return config ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
